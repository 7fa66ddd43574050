#include "vulngraph/semantic/provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <random>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/hash.hpp"
#include "vulngraph/common/rng.hpp"

namespace vulngraph::semantic {

using nlohmann::json;

std::vector<double> StubProvider::embed(const std::string& text) {
  std::mt19937_64 rng(fnv1a64(text));
  std::vector<double> v(dim_);
  double norm_sq = 0.0;
  for (auto& x : v) {
    x = uniform_range(-1.0, 1.0, rng);
    norm_sq += x * x;
  }
  const double inv = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
  for (auto& x : v) x *= inv;
  return v;
}

std::string StubProvider::generate(const std::string& prompt,
                                   std::size_t max_tokens, double temperature) {
  (void)max_tokens;
  (void)temperature;
  if (fnv1a64(prompt) % 2 == 0) {
    return "The code is safe because every input it touches is validated "
           "before reaching a sensitive operation.";
  }
  return "The code is vulnerable because untrusted input flows into a "
         "sensitive operation without sanitization.";
}

FileProvider::FileProvider(const std::string& cache_path)
    : cache_(encoders::EmbeddingCache::load(cache_path)) {}

std::vector<double> FileProvider::embed(const std::string& text) {
  const std::string id = content_hash(text);
  auto hit = cache_.get(id);
  if (!hit) throw MissingEmbeddingError(id);
  return *hit;
}

std::string FileProvider::generate(const std::string&, std::size_t, double) {
  throw ProviderUnavailableError("file provider cannot generate text");
}

HttpProvider::HttpProvider(std::string host, int port, std::string model,
                           int timeout_seconds)
    : host_(std::move(host)),
      port_(port),
      model_(std::move(model)),
      timeout_(timeout_seconds) {}

namespace {

json post_json(const std::string& host, int port, int timeout,
               const std::string& path, const json& body) {
  httplib::Client client(host, port);
  client.set_connection_timeout(timeout, 0);
  client.set_read_timeout(timeout, 0);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw ProviderUnavailableError("no response from " + host + ":" +
                                   std::to_string(port) + path);
  }
  if (res->status != 200) {
    throw ProviderUnavailableError(path + " returned status " +
                                   std::to_string(res->status));
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw ProviderUnavailableError(path + " returned malformed JSON");
  }
  return parsed;
}

}  // namespace

std::vector<double> HttpProvider::embed(const std::string& text) {
  const json body = {{"model", model_}, {"input", text}};
  const json reply = post_json(host_, port_, timeout_, "/embed", body);
  if (!reply.contains("embedding") || !reply["embedding"].is_array()) {
    throw ProviderUnavailableError("/embed reply lacks an embedding array");
  }
  std::vector<double> v;
  v.reserve(reply["embedding"].size());
  for (const auto& x : reply["embedding"]) {
    if (!x.is_number()) {
      throw ProviderUnavailableError("/embed reply has a non-numeric entry");
    }
    v.push_back(x.get<double>());
  }
  return v;
}

std::string HttpProvider::generate(const std::string& prompt,
                                   std::size_t max_tokens,
                                   double temperature) {
  const json body = {{"model", model_},
                     {"prompt", prompt},
                     {"max_tokens", max_tokens},
                     {"temperature", temperature}};
  const json reply = post_json(host_, port_, timeout_, "/generate", body);
  if (!reply.contains("text") || !reply["text"].is_string()) {
    throw ProviderUnavailableError("/generate reply lacks a text field");
  }
  return reply["text"].get<std::string>();
}

CachingProvider::CachingProvider(std::shared_ptr<SemanticProvider> inner)
    : inner_(std::move(inner)) {}

CachingProvider::CachingProvider(std::shared_ptr<SemanticProvider> inner,
                                 const std::string& cache_path)
    : inner_(std::move(inner)) {
  if (std::filesystem::exists(cache_path)) {
    cache_ = encoders::EmbeddingCache::load(cache_path);
  }
}

std::vector<double> CachingProvider::embed(const std::string& text) {
  const std::string id = content_hash(text);
  if (auto hit = cache_.get(id)) {
    ++hits_;
    return *hit;
  }
  std::vector<double> v = inner_->embed(text);
  cache_.put(id, v);  // throws DimensionMismatchError on width change
  ++misses_;
  return v;
}

std::string CachingProvider::generate(const std::string& prompt,
                                      std::size_t max_tokens,
                                      double temperature) {
  return inner_->generate(prompt, max_tokens, temperature);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Safe: return "safe";
    case Verdict::Vulnerable: return "vulnerable";
    case Verdict::Abstain: return "abstain";
  }
  return "abstain";
}

Verdict parse_verdict(std::string_view reply) {
  std::string lower(reply);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  const auto vuln = lower.find("vulnerable");
  const auto safe = lower.find("safe");
  if (vuln == std::string::npos && safe == std::string::npos) {
    return Verdict::Abstain;
  }
  if (vuln == std::string::npos) return Verdict::Safe;
  if (safe == std::string::npos) return Verdict::Vulnerable;
  return vuln < safe ? Verdict::Vulnerable : Verdict::Safe;
}

Verdict classify_zero_shot(SemanticProvider& provider,
                           const std::string& code) {
  const std::string prompt =
      "Is the following Java method vulnerable or safe? "
      "Answer with exactly one word.\nCode: " +
      code + "\nAnswer:";
  const std::string reply = provider.generate(prompt, 8, 0.0);
  return parse_verdict(reply);
}

}  // namespace vulngraph::semantic
