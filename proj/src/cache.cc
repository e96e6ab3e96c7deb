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

#include "mtcorpus/cache.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "mtcorpus/error.h"

namespace mtcorpus {

namespace fs = std::filesystem;

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create cache root " + root_.string());
}

std::string ResponseCache::KeyFor(
    std::string_view kind, const std::map<std::string, std::string> &params,
    std::string_view text) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  nlohmann::json canon = {{"kind", std::string(kind)},
                          {"params", params},
                          {"text", std::string(text)}};
  return Sha256Hex(canon.dump());
}

fs::path ResponseCache::PathFor(const std::string &key) const {
  if (key.size() < 3) throw Error("cache key too short");
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<CacheEntry> ResponseCache::Get(const std::string &key) const {
  const fs::path path = PathFor(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(ss.str());
    CacheEntry e;
    e.key = j.at("key").get<std::string>();
    e.value = j.at("value");
    e.created_at = j.at("created_at").get<std::int64_t>();
    if (e.key != key) throw Error("key mismatch");
    return e;
  } catch (const std::exception &err) {
    std::cerr << "mtcorpus: warning: corrupt cache entry " << path.string()
              << " (" << err.what() << "); refetching\n";
    return std::nullopt;
  }
}

void ResponseCache::Put(const std::string &key,
                        const nlohmann::json &value) const {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path path = PathFor(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string());

  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  const nlohmann::json entry = {
      {"key", key}, {"value", value}, {"created_at", now}};
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << ::getpid() << '.'
           << std::hash<std::thread::id>()(std::this_thread::get_id()) << '.'
           << counter.fetch_add(1);
  const fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write cache entry " + tmp.string());
    out << entry.dump();
    if (!out) throw IoError("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot install cache entry " + path.string());
  }
}

}  // namespace mtcorpus
