// Copyright 2026 The mtcorpus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand reads its inputs, writes its
// declared outputs and returns 0; runtime failures return 1 with a one-line
// diagnostic and usage errors return 2. Paths of "-" mean stdin/stdout.
//
// Settings resolve as: command-line flag > environment (MTCORPUS_ENDPOINT,
// MTCORPUS_CACHE) > --config file (TOML, flat keys named like the flags) >
// language profile defaults > built-in defaults.

#ifndef MTCORPUS_CLI_H_
#define MTCORPUS_CLI_H_

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtcorpus/clients.h"
#include "mtcorpus/filters.h"

namespace mtcorpus {

struct RunConfig {
  std::string profile = "id";
  LengthBounds bounds = ProfileBounds("id");
  double ratio_cap = 2.0;
  double iqr_k = 3.0;
  std::size_t vocab_size = 50257;
  std::size_t context = 1024;
  std::string endpoint;
  std::string cache_root;
  std::string token;
  std::size_t batch_size = 32;
  std::size_t concurrency = 8;
  int max_attempts = 5;
  int backoff_ms = 200;
};

nlohmann::json ToJson(const RunConfig &c);

using TransportFactory =
    std::function<std::shared_ptr<Transport>(const std::string &endpoint,
                                             const RunConfig &config)>;

struct CliEnvironment {
  std::ostream *out = nullptr;  // defaults to std::cout
  std::ostream *err = nullptr;  // defaults to std::cerr
  // Defaults to HttpTransport.
  TransportFactory transport_factory;
  // Defaults to std::getenv.
  std::function<std::optional<std::string>(const std::string &)> getenv;
};

// argv[0] is the program name.
int RunCli(const std::vector<std::string> &argv,
           const CliEnvironment &env = {});

}  // namespace mtcorpus

#endif  // MTCORPUS_CLI_H_
