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

// Clients for the four neural transformations (translate, simplify, embed,
// score) behind one wire protocol:
//
//   POST <endpoint>/v1/transform
//   {"kind": "translate|simplify|embed|logprob",
//    "params": {"k": "v", ...},
//    "items": [{"id": "...", "text": "..."}, ...]}
//   -> {"items": [{"id": "...", "text"?: "...", "vector"?: [...],
//                  "logprob"?: x}, ...], "dim"?: n}
//
// Items are batched, sent with bounded concurrency, retried with
// exponential backoff, and cached per item by content hash.

#ifndef MTCORPUS_CLIENTS_H_
#define MTCORPUS_CLIENTS_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtcorpus/cache.h"
#include "mtcorpus/error.h"

namespace mtcorpus {

enum class TransformKind { kTranslate, kSimplify, kEmbed, kLogprob };

std::string_view KindName(TransformKind kind);
TransformKind ParseKind(std::string_view name);

using Params = std::map<std::string, std::string>;

struct TransformItem {
  std::string id;
  std::string text;
};

struct TransformRequest {
  TransformKind kind = TransformKind::kTranslate;
  std::vector<TransformItem> items;
  Params params;

  // Throws Error on an empty item list or a repeated id.
  void Validate() const;
};

nlohmann::json ToWire(TransformKind kind, const Params &params,
                      const std::vector<TransformItem> &items);

struct WireItem {
  std::string id;
  std::optional<std::string> text;
  std::optional<std::vector<double>> vector;
  std::optional<double> logprob;
};

struct WireResponse {
  std::vector<WireItem> items;
  std::optional<std::size_t> dim;
};

// Validates the response envelope; throws ProtocolError.
WireResponse ParseWireResponse(const nlohmann::json &body);
nlohmann::json ToWire(const WireResponse &response);

// Network or HTTP-level failure; retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The server broke the wire contract; not retried.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Items still unfinished after the retry budget.
class ClientError : public Error {
 public:
  ClientError(const std::string &what, std::vector<std::string> ids);
  const std::vector<std::string> &unfinished() const { return unfinished_; }

 private:
  std::vector<std::string> unfinished_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Sends one request body, returns the decoded response body.
  virtual nlohmann::json Post(const nlohmann::json &body) = 0;
};

// HTTP(S) transport. `endpoint` is a base URL such as http://host:8080; the
// request goes to <endpoint>/v1/transform.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string endpoint, std::string bearer_token = "",
                         std::chrono::seconds timeout = std::chrono::seconds(120));
  nlohmann::json Post(const nlohmann::json &body) override;

 private:
  std::string base_;
  std::string path_;
  std::string token_;
  std::chrono::seconds timeout_;
};

struct ClientOptions {
  std::size_t batch_size = 32;
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::size_t max_in_flight = 8;
  std::optional<std::filesystem::path> cache_root;
  // Expected embedding dimension; when unset the first response fixes it.
  std::optional<std::size_t> embed_dim;
};

struct SimplifyResult {
  std::string item_id;
  std::string text;
  bool degenerate = false;
  std::optional<double> cosine;
};

// Prompt with an insertion marker. Responses are cut at `end_marker`.
struct PromptTemplate {
  std::string text;
  std::string marker = "<Insert Text Here>";
  std::string end_marker = "<|eot_id|>";

  void Validate() const;
  std::string Instantiate(std::string_view input) const;
  std::string Truncate(std::string_view output) const;
};

PromptTemplate DefaultSimplifyPrompt();

inline constexpr double kDegenerateCosine = 0.5;

// Instruction-leak patterns (output starting with "(Note:" or
// "Simplification of the text", ignoring leading whitespace/quotes) or
// cosine strictly below 0.5.
bool IsDegenerateSimplification(std::string_view output,
                                std::optional<double> cosine = std::nullopt);

struct SimplifyOptions {
  // Embeds both sides and flags outputs with cosine < 0.5.
  bool similarity_check = false;
  Params embed_params;
};

class TransformClient {
 public:
  TransformClient(std::shared_ptr<Transport> transport, ClientOptions options);

  std::vector<std::pair<std::string, std::string>> Translate(
      const TransformRequest &request);
  std::vector<SimplifyResult> Simplify(const TransformRequest &request,
                                       const PromptTemplate &prompt,
                                       const SimplifyOptions &options = {});
  std::vector<std::pair<std::string, std::vector<double>>> Embed(
      const TransformRequest &request);
  // Total log-probability per sentence. Empty sentences score 0 without a
  // request.
  std::vector<std::pair<std::string, double>> Score(
      const TransformRequest &request);

  std::size_t network_calls() const { return calls_.load(); }
  const ClientOptions &options() const { return options_; }

 private:
  // Resolves one payload per item (cache first, then network), in order.
  std::vector<nlohmann::json> Run(TransformKind kind, const Params &params,
                                  const std::vector<TransformItem> &items);
  void CheckPayload(TransformKind kind, const WireItem &item,
                    std::optional<std::size_t> dim);

  std::shared_ptr<Transport> transport_;
  ClientOptions options_;
  std::optional<ResponseCache> cache_;
  std::atomic<std::size_t> calls_{0};
  std::optional<std::size_t> dim_;
};

}  // namespace mtcorpus

#endif  // MTCORPUS_CLIENTS_H_
