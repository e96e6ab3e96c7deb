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

// Content-addressed response cache. Each entry lives in
// <root>/<key[0:2]>/<key>.json where key is the hex SHA-256 of the
// canonicalized request item. Writes go to a temporary file in the same
// directory and are renamed into place, so concurrent writers of one key
// leave exactly one intact entry.

#ifndef MTCORPUS_CACHE_H_
#define MTCORPUS_CACHE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace mtcorpus {

std::string Sha256Hex(std::string_view data);

struct CacheEntry {
  std::string key;
  nlohmann::json value;
  std::int64_t created_at = 0;  // unix seconds
};

class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  // Key for one request item: SHA-256 over the canonical JSON
  // {"kind":..., "params":{sorted}, "text":...}.
  static std::string KeyFor(std::string_view kind,
                            const std::map<std::string, std::string> &params,
                            std::string_view text);

  // Unreadable or corrupt entries are reported on stderr and treated as a
  // miss.
  std::optional<CacheEntry> Get(const std::string &key) const;
  void Put(const std::string &key, const nlohmann::json &value) const;

  std::filesystem::path PathFor(const std::string &key) const;
  const std::filesystem::path &root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace mtcorpus

#endif  // MTCORPUS_CACHE_H_
