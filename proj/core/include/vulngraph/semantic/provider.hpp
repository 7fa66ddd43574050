#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vulngraph/encoders/embedding_cache.hpp"

namespace vulngraph::semantic {

/// A source of code embeddings and short completions. Implementations
/// must be deterministic for deterministic backends (stub, file) and
/// surface transport problems as ProviderUnavailableError.
class SemanticProvider {
 public:
  virtual ~SemanticProvider() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
  virtual std::string generate(const std::string& prompt,
                               std::size_t max_tokens,
                               double temperature) = 0;
  virtual std::string name() const = 0;
};

/// Hash-seeded fake model: embeddings are unit vectors derived from the
/// input text, generations are a fixed safe/vulnerable sentence chosen
/// by prompt hash parity. Useful for tests and offline runs.
class StubProvider : public SemanticProvider {
 public:
  explicit StubProvider(std::size_t dim = 256) : dim_(dim) {}
  std::vector<double> embed(const std::string& text) override;
  std::string generate(const std::string& prompt, std::size_t max_tokens,
                       double temperature) override;
  std::string name() const override { return "stub"; }

 private:
  std::size_t dim_;
};

/// Serves embeddings from a prebuilt cache file; lookups are by content
/// hash of the text. Cannot generate. Missing entries raise
/// MissingEmbeddingError.
class FileProvider : public SemanticProvider {
 public:
  explicit FileProvider(const std::string& cache_path);
  std::vector<double> embed(const std::string& text) override;
  std::string generate(const std::string& prompt, std::size_t max_tokens,
                       double temperature) override;
  std::string name() const override { return "file"; }

 private:
  encoders::EmbeddingCache cache_;
};

/// Talks to an embedding/completion server:
///   POST /embed    {"model", "input"}                      -> {"embedding": [...]}
///   POST /generate {"model", "prompt", "max_tokens",
///                   "temperature"}                         -> {"text": "..."}
class HttpProvider : public SemanticProvider {
 public:
  HttpProvider(std::string host, int port, std::string model,
               int timeout_seconds = 30);
  std::vector<double> embed(const std::string& text) override;
  std::string generate(const std::string& prompt, std::size_t max_tokens,
                       double temperature) override;
  std::string name() const override { return "http:" + model_; }

 private:
  std::string host_;
  int port_;
  std::string model_;
  int timeout_;
};

/// Write-through embedding cache around any provider. Keys are content
/// hashes of the embedded text; repeated texts never hit the backend
/// twice. The cache enforces a single embedding width for the run.
class CachingProvider : public SemanticProvider {
 public:
  explicit CachingProvider(std::shared_ptr<SemanticProvider> inner);
  CachingProvider(std::shared_ptr<SemanticProvider> inner,
                  const std::string& cache_path);  // loads if present

  std::vector<double> embed(const std::string& text) override;
  std::string generate(const std::string& prompt, std::size_t max_tokens,
                       double temperature) override;
  std::string name() const override { return inner_->name(); }

  void save(const std::string& path) const { cache_.save(path); }
  const encoders::EmbeddingCache& cache() const { return cache_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::shared_ptr<SemanticProvider> inner_;
  encoders::EmbeddingCache cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

enum class Verdict { Safe, Vulnerable, Abstain };
std::string_view to_string(Verdict v);

/// Zero-shot classification: asks the provider whether the code is
/// vulnerable and scans the reply (case-insensitively) for the first
/// occurrence of "vulnerable" or "safe". Neither word means Abstain.
Verdict classify_zero_shot(SemanticProvider& provider,
                           const std::string& code);

/// The parse rule alone, exposed for testing and reuse.
Verdict parse_verdict(std::string_view reply);

}  // namespace vulngraph::semantic
