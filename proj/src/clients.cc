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

#include "mtcorpus/clients.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "httplib.h"
#include "mtcorpus/metrics.h"

namespace mtcorpus {

using nlohmann::json;

std::string_view KindName(TransformKind kind) {
  switch (kind) {
    case TransformKind::kTranslate: return "translate";
    case TransformKind::kSimplify: return "simplify";
    case TransformKind::kEmbed: return "embed";
    case TransformKind::kLogprob: return "logprob";
  }
  return "";
}

TransformKind ParseKind(std::string_view name) {
  for (auto k : {TransformKind::kTranslate, TransformKind::kSimplify,
                 TransformKind::kEmbed, TransformKind::kLogprob}) {
    if (KindName(k) == name) return k;
  }
  throw ProtocolError("unknown transform kind: " + std::string(name));
}

void TransformRequest::Validate() const {
  if (items.empty()) throw Error("transform request has no items");
  std::unordered_set<std::string_view> ids;
  for (const auto &item : items) {
    if (!ids.insert(item.id).second) {
      throw Error("duplicate item id in request: " + item.id);
    }
  }
}

json ToWire(TransformKind kind, const Params &params,
            const std::vector<TransformItem> &items) {
  json body = {{"kind", std::string(KindName(kind))}, {"params", params}};
  body["items"] = json::array();
  for (const auto &item : items) {
    body["items"].push_back({{"id", item.id}, {"text", item.text}});
  }
  return body;
}

WireResponse ParseWireResponse(const json &body) {
  if (!body.is_object() || !body.contains("items") ||
      !body["items"].is_array()) {
    throw ProtocolError("response lacks an \"items\" array");
  }
  WireResponse out;
  if (body.contains("dim") && !body["dim"].is_null()) {
    if (!body["dim"].is_number_unsigned() && !body["dim"].is_number_integer()) {
      throw ProtocolError("response \"dim\" is not an integer");
    }
    out.dim = body["dim"].get<std::size_t>();
  }
  for (const auto &item : body["items"]) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
      throw ProtocolError("response item lacks a string \"id\"");
    }
    WireItem w;
    w.id = item["id"].get<std::string>();
    if (item.contains("text") && !item["text"].is_null()) {
      if (!item["text"].is_string()) throw ProtocolError("\"text\" not a string");
      w.text = item["text"].get<std::string>();
    }
    if (item.contains("vector") && !item["vector"].is_null()) {
      const auto &v = item["vector"];
      if (!v.is_array()) throw ProtocolError("\"vector\" not an array");
      std::vector<double> vec;
      vec.reserve(v.size());
      for (const auto &x : v) {
        if (!x.is_number()) throw ProtocolError("\"vector\" has a non-number");
        vec.push_back(x.get<double>());
      }
      w.vector = std::move(vec);
    }
    if (item.contains("logprob") && !item["logprob"].is_null()) {
      if (!item["logprob"].is_number()) {
        throw ProtocolError("\"logprob\" not a number");
      }
      w.logprob = item["logprob"].get<double>();
    }
    out.items.push_back(std::move(w));
  }
  return out;
}

json ToWire(const WireResponse &response) {
  json body = {{"items", json::array()}};
  for (const auto &w : response.items) {
    json item = {{"id", w.id}};
    if (w.text) item["text"] = *w.text;
    if (w.vector) item["vector"] = *w.vector;
    if (w.logprob) item["logprob"] = *w.logprob;
    body["items"].push_back(std::move(item));
  }
  if (response.dim) body["dim"] = *response.dim;
  return body;
}

ClientError::ClientError(const std::string &what, std::vector<std::string> ids)
    : Error([&] {
        std::string msg = what + ":";
        for (const auto &id : ids) msg += " " + id;
        return msg;
      }()),
      unfinished_(std::move(ids)) {}

HttpTransport::HttpTransport(std::string endpoint, std::string bearer_token,
                             std::chrono::seconds timeout)
    : token_(std::move(bearer_token)), timeout_(timeout) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error("endpoint must be an http(s) URL: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme + 3);
  base_ = endpoint.substr(0, path_start);
  std::string prefix =
      path_start == std::string::npos ? "" : endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/v1/transform";
}

json HttpTransport::Post(const json &body) {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + base_ + path_ + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    const std::string msg = "POST " + base_ + path_ + " returned HTTP " +
                            std::to_string(res->status);
    if (res->status >= 500 || res->status == 408 || res->status == 429) {
      throw TransportError(msg);
    }
    throw ProtocolError(msg);
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error &e) {
    throw TransportError("response is not JSON: " + std::string(e.what()));
  }
}

void PromptTemplate::Validate() const {
  if (text.find(marker) == std::string::npos) {
    throw Error("prompt template lacks the insertion marker " + marker);
  }
}

std::string PromptTemplate::Instantiate(std::string_view input) const {
  Validate();
  std::string out = text;
  out.replace(out.find(marker), marker.size(), input);
  return out;
}

std::string PromptTemplate::Truncate(std::string_view output) const {
  if (!end_marker.empty()) {
    if (auto pos = output.find(end_marker); pos != std::string_view::npos) {
      output = output.substr(0, pos);
    }
  }
  const auto begin = output.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = output.find_last_not_of(" \t\r\n");
  return std::string(output.substr(begin, end - begin + 1));
}

PromptTemplate DefaultSimplifyPrompt() {
  PromptTemplate p;
  p.text =
      "Rewrite the text below in plain language for a young reader.\n"
      "Keep the meaning and every fact, and add nothing new.\n"
      "Break long sentences into shorter ones where it helps.\n"
      "Reply with the rewritten text only and finish with <|eot_id|>.\n"
      "\n"
      "Text:\n"
      "<Insert Text Here>\n"
      "\n"
      "Rewritten text:\n";
  return p;
}

bool IsDegenerateSimplification(std::string_view output,
                                std::optional<double> cosine) {
  auto begin = output.find_first_not_of(" \t\r\n\"'");
  if (begin == std::string_view::npos) return true;
  const std::string_view body = output.substr(begin);
  if (body.starts_with("(Note:") ||
      body.starts_with("Simplification of the text")) {
    return true;
  }
  return cosine && *cosine < kDegenerateCosine;
}

TransformClient::TransformClient(std::shared_ptr<Transport> transport,
                                 ClientOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  if (options_.max_attempts < 1) options_.max_attempts = 1;
  if (options_.cache_root) cache_.emplace(*options_.cache_root);
  dim_ = options_.embed_dim;
}

void TransformClient::CheckPayload(TransformKind kind, const WireItem &item,
                                   std::optional<std::size_t> dim) {
  switch (kind) {
    case TransformKind::kTranslate:
    case TransformKind::kSimplify:
      if (!item.text) throw ProtocolError("item " + item.id + " lacks \"text\"");
      break;
    case TransformKind::kEmbed: {
      if (!item.vector) {
        throw ProtocolError("item " + item.id + " lacks \"vector\"");
      }
      const std::size_t n = item.vector->size();
      if (dim && *dim != n) {
        throw ProtocolError("item " + item.id + ": vector has dimension " +
                            std::to_string(n) + ", declared " +
                            std::to_string(*dim));
      }
      if (dim_ && *dim_ != n) {
        throw ProtocolError("embedding dimension drift: expected " +
                            std::to_string(*dim_) + ", got " +
                            std::to_string(n) + " for item " + item.id);
      }
      dim_ = n;
      break;
    }
    case TransformKind::kLogprob:
      if (!item.logprob) {
        throw ProtocolError("item " + item.id + " lacks \"logprob\"");
      }
      if (std::isnan(*item.logprob) || *item.logprob > 0.0) {
        throw ProtocolError("item " + item.id + ": log-probability " +
                            std::to_string(*item.logprob) + " is not <= 0");
      }
      break;
  }
}

namespace {

json PayloadOf(TransformKind kind, const WireItem &item) {
  switch (kind) {
    case TransformKind::kTranslate:
    case TransformKind::kSimplify:
      return {{"text", *item.text}};
    case TransformKind::kEmbed:
      return {{"vector", *item.vector}};
    case TransformKind::kLogprob:
      return {{"logprob", *item.logprob}};
  }
  return {};
}

std::optional<WireItem> ItemFromPayload(const std::string &id,
                                        const json &payload) {
  try {
    WireItem w;
    w.id = id;
    if (payload.contains("text")) w.text = payload["text"].get<std::string>();
    if (payload.contains("vector")) {
      w.vector = payload["vector"].get<std::vector<double>>();
    }
    if (payload.contains("logprob")) w.logprob = payload["logprob"].get<double>();
    return w;
  } catch (const json::exception &) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<json> TransformClient::Run(TransformKind kind,
                                       const Params &params,
                                       const std::vector<TransformItem> &items) {
  const std::string kind_name(KindName(kind));
  std::vector<std::optional<json>> results(items.size());
  std::vector<std::string> keys(items.size());
  std::vector<std::size_t> pending;
  std::mutex mu;

  for (std::size_t i = 0; i < items.size(); ++i) {
    keys[i] = ResponseCache::KeyFor(kind_name, params, items[i].text);
    if (cache_) {
      if (auto hit = cache_->Get(keys[i])) {
        auto w = ItemFromPayload(items[i].id, hit->value);
        bool ok = w.has_value();
        if (ok) {
          try {
            CheckPayload(kind, *w, std::nullopt);
          } catch (const ProtocolError &) {
            ok = false;
          }
        }
        if (ok) {
          results[i] = hit->value;
          continue;
        }
        std::cerr << "mtcorpus: warning: discarding unusable cache entry "
                  << keys[i] << "\n";
      }
    }
    pending.push_back(i);
  }

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t b = 0; b < pending.size(); b += options_.batch_size) {
    const auto end = std::min(pending.size(), b + options_.batch_size);
    batches.emplace_back(pending.begin() + b, pending.begin() + end);
  }

  std::vector<std::string> unfinished;
  std::exception_ptr failure;
  std::atomic<std::size_t> next_batch{0};

  auto process = [&](const std::vector<std::size_t> &batch) {
    std::vector<std::size_t> remaining = batch;
    auto backoff = options_.initial_backoff;
    for (int attempt = 1; attempt <= options_.max_attempts && !remaining.empty();
         ++attempt) {
      if (attempt > 1) {
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(static_cast<std::int64_t>(
            static_cast<double>(backoff.count()) * options_.backoff_multiplier));
      }
      std::vector<TransformItem> send;
      send.reserve(remaining.size());
      for (std::size_t i : remaining) send.push_back(items[i]);
      ++calls_;
      WireResponse response;
      try {
        response = ParseWireResponse(transport_->Post(ToWire(kind, params, send)));
      } catch (const TransportError &e) {
        std::cerr << "mtcorpus: " << kind_name << " attempt " << attempt
                  << " failed: " << e.what() << "\n";
        continue;
      }
      std::unordered_map<std::string_view, const WireItem *> by_id;
      for (const auto &w : response.items) {
        if (!by_id.emplace(w.id, &w).second) {
          throw ProtocolError("response repeats item id " + w.id);
        }
      }
      std::vector<std::size_t> still;
      std::size_t matched = 0;
      for (std::size_t i : remaining) {
        auto it = by_id.find(items[i].id);
        if (it == by_id.end()) {
          still.push_back(i);
          continue;
        }
        ++matched;
        json payload;
        {
          std::lock_guard<std::mutex> lock(mu);
          CheckPayload(kind, *it->second, response.dim);
        }
        payload = PayloadOf(kind, *it->second);
        if (cache_) cache_->Put(keys[i], payload);
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(payload);
      }
      if (matched != response.items.size()) {
        throw ProtocolError("response contains ids that were not requested");
      }
      remaining.swap(still);
    }
    std::lock_guard<std::mutex> lock(mu);
    for (std::size_t i : remaining) unfinished.push_back(items[i].id);
  };

  auto worker = [&] {
    while (true) {
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      const std::size_t b = next_batch.fetch_add(1);
      if (b >= batches.size()) return;
      try {
        process(batches[b]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_workers = std::min(options_.max_in_flight, batches.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto &t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  if (!unfinished.empty()) {
    std::vector<std::string> ordered;
    std::unordered_set<std::string> missing(unfinished.begin(), unfinished.end());
    for (const auto &item : items) {
      if (missing.contains(item.id)) ordered.push_back(item.id);
    }
    throw ClientError(kind_name + " failed after " +
                          std::to_string(options_.max_attempts) +
                          " attempts; unfinished items",
                      std::move(ordered));
  }
  std::vector<json> out;
  out.reserve(results.size());
  for (auto &r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<std::pair<std::string, std::string>> TransformClient::Translate(
    const TransformRequest &request) {
  request.Validate();
  const auto payloads = Run(TransformKind::kTranslate, request.params,
                            request.items);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    out.emplace_back(request.items[i].id, payloads[i]["text"].get<std::string>());
  }
  return out;
}

std::vector<SimplifyResult> TransformClient::Simplify(
    const TransformRequest &request, const PromptTemplate &prompt,
    const SimplifyOptions &options) {
  request.Validate();
  prompt.Validate();
  std::vector<TransformItem> prompted;
  prompted.reserve(request.items.size());
  for (const auto &item : request.items) {
    prompted.push_back({item.id, prompt.Instantiate(item.text)});
  }
  const auto payloads = Run(TransformKind::kSimplify, request.params, prompted);
  std::vector<SimplifyResult> out;
  out.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    SimplifyResult r;
    r.item_id = request.items[i].id;
    r.text = prompt.Truncate(payloads[i]["text"].get<std::string>());
    out.push_back(std::move(r));
  }

  if (options.similarity_check) {
    TransformRequest embed;
    embed.kind = TransformKind::kEmbed;
    embed.params = options.embed_params;
    for (std::size_t i = 0; i < out.size(); ++i) {
      embed.items.push_back({"src:" + out[i].item_id, request.items[i].text});
      if (!out[i].text.empty()) {
        embed.items.push_back({"out:" + out[i].item_id, out[i].text});
      }
    }
    const auto vectors = Embed(embed);
    std::unordered_map<std::string, const std::vector<double> *> by_id;
    for (const auto &[id, v] : vectors) by_id[id] = &v;
    for (auto &r : out) {
      auto src = by_id.find("src:" + r.item_id);
      auto dst = by_id.find("out:" + r.item_id);
      if (src == by_id.end() || dst == by_id.end()) continue;
      try {
        r.cosine = CosineSimilarity(*src->second, *dst->second);
      } catch (const Error &) {
        r.cosine.reset();
      }
    }
  }
  for (auto &r : out) r.degenerate = IsDegenerateSimplification(r.text, r.cosine);
  return out;
}

std::vector<std::pair<std::string, std::vector<double>>> TransformClient::Embed(
    const TransformRequest &request) {
  request.Validate();
  const auto payloads = Run(TransformKind::kEmbed, request.params, request.items);
  std::vector<std::pair<std::string, std::vector<double>>> out;
  out.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    out.emplace_back(request.items[i].id,
                     payloads[i]["vector"].get<std::vector<double>>());
  }
  return out;
}

std::vector<std::pair<std::string, double>> TransformClient::Score(
    const TransformRequest &request) {
  request.Validate();
  std::vector<TransformItem> nonempty;
  for (const auto &item : request.items) {
    if (!item.text.empty()) nonempty.push_back(item);
  }
  std::unordered_map<std::string, double> scores;
  if (!nonempty.empty()) {
    const auto payloads = Run(TransformKind::kLogprob, request.params, nonempty);
    for (std::size_t i = 0; i < payloads.size(); ++i) {
      scores[nonempty[i].id] = payloads[i]["logprob"].get<double>();
    }
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(request.items.size());
  for (const auto &item : request.items) {
    out.emplace_back(item.id, item.text.empty() ? 0.0 : scores.at(item.id));
  }
  return out;
}

}  // namespace mtcorpus
