#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "vulngraph/common/error.hpp"
#include "vulngraph/common/hash.hpp"
#include "vulngraph/encoders/embedding_cache.hpp"
#include "vulngraph/semantic/provider.hpp"

using namespace vulngraph;
using namespace vulngraph::semantic;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Backend that counts calls and can change its embedding width.
class CountingProvider : public SemanticProvider {
 public:
  std::vector<double> embed(const std::string& text) override {
    ++embed_calls;
    return std::vector<double>(next_dim, static_cast<double>(text.size()));
  }
  std::string generate(const std::string&, std::size_t, double) override {
    ++generate_calls;
    return "unsure";
  }
  std::string name() const override { return "counting"; }

  int embed_calls = 0;
  int generate_calls = 0;
  std::size_t next_dim = 4;
};

}  // namespace

TEST_CASE("stub embeddings are deterministic unit vectors") {
  StubProvider a(64);
  StubProvider b(64);
  auto v1 = a.embed("int f() { return 0; }");
  auto v2 = b.embed("int f() { return 0; }");
  auto v3 = a.embed("int g() { return 1; }");
  REQUIRE(v1.size() == 64);
  CHECK(v1 == v2);
  CHECK(v1 != v3);
  CHECK(norm(v1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(v3) == doctest::Approx(1.0).epsilon(1e-12));

  StubProvider wide;  // default width
  CHECK(wide.embed("x").size() == 256);
}

TEST_CASE("stub generations parse to a definite verdict") {
  StubProvider p;
  const std::string r1 = p.generate("prompt one", 8, 0.0);
  const std::string r2 = p.generate("prompt one", 8, 1.0);
  CHECK(r1 == r2);  // temperature ignored, fully deterministic
  CHECK(parse_verdict(r1) != Verdict::Abstain);

  // Both sentences are reachable: hash parity flips across prompts.
  bool saw_safe = false;
  bool saw_vuln = false;
  for (int i = 0; i < 32; ++i) {
    auto v = parse_verdict(p.generate("p" + std::to_string(i), 8, 0.0));
    saw_safe = saw_safe || v == Verdict::Safe;
    saw_vuln = saw_vuln || v == Verdict::Vulnerable;
  }
  CHECK(saw_safe);
  CHECK(saw_vuln);
}

TEST_CASE("verdict parsing picks the first keyword, else abstains") {
  CHECK(parse_verdict("vulnerable") == Verdict::Vulnerable);
  CHECK(parse_verdict("SAFE") == Verdict::Safe);
  CHECK(parse_verdict("This looks Vulnerable to injection.") ==
        Verdict::Vulnerable);
  CHECK(parse_verdict("not vulnerable, it is safe") == Verdict::Vulnerable);
  CHECK(parse_verdict("it is safe, not vulnerable") == Verdict::Safe);
  CHECK(parse_verdict("I cannot tell.") == Verdict::Abstain);
  CHECK(parse_verdict("") == Verdict::Abstain);

  CHECK(to_string(Verdict::Safe) == "safe");
  CHECK(to_string(Verdict::Vulnerable) == "vulnerable");
  CHECK(to_string(Verdict::Abstain) == "abstain");
}

TEST_CASE("zero-shot classification over the stub never abstains") {
  StubProvider p;
  const std::string code = "void run(String s) { exec(s); }";
  Verdict v1 = classify_zero_shot(p, code);
  Verdict v2 = classify_zero_shot(p, code);
  CHECK(v1 == v2);
  CHECK(v1 != Verdict::Abstain);
}

TEST_CASE("file provider serves cached vectors by content hash") {
  const std::string path = temp_path("vg_file_provider.bin");
  const std::string code = "int id(int x) { return x; }";
  encoders::EmbeddingCache cache;
  cache.put(content_hash(code), {1.0, 2.0, 3.0});
  cache.save(path);

  FileProvider provider(path);
  CHECK(provider.embed(code) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(provider.embed("something else"), MissingEmbeddingError);
  CHECK_THROWS_AS(provider.generate("p", 8, 0.0), ProviderUnavailableError);
  std::remove(path.c_str());

  CHECK_THROWS_AS(FileProvider(temp_path("vg_no_such_cache.bin")), ParseError);
}

TEST_CASE("caching provider calls the backend once per distinct text") {
  auto backend = std::make_shared<CountingProvider>();
  CachingProvider cached(backend);

  auto a1 = cached.embed("alpha");
  auto a2 = cached.embed("alpha");
  auto b1 = cached.embed("beta!");
  CHECK(a1 == a2);
  CHECK(backend->embed_calls == 2);
  CHECK(cached.hits() == 1);
  CHECK(cached.misses() == 2);
  CHECK(cached.cache().size() == 2);
  CHECK(b1.size() == 4);

  // generate passes straight through
  CHECK(cached.generate("p", 4, 0.0) == "unsure");
  CHECK(backend->generate_calls == 1);
}

TEST_CASE("caching provider persists and reloads") {
  const std::string path = temp_path("vg_caching_provider.bin");
  {
    auto backend = std::make_shared<CountingProvider>();
    CachingProvider cached(backend);
    cached.embed("persist me");
    cached.save(path);
  }
  auto backend = std::make_shared<CountingProvider>();
  CachingProvider cached(backend, path);
  auto v = cached.embed("persist me");
  CHECK(backend->embed_calls == 0);
  CHECK(cached.hits() == 1);
  CHECK(v == std::vector<double>(4, 10.0));
  std::remove(path.c_str());

  // a missing cache file just starts empty
  CachingProvider fresh(backend, temp_path("vg_absent_cache.bin"));
  fresh.embed("persist me");
  CHECK(backend->embed_calls == 1);
}

TEST_CASE("caching provider rejects a backend that changes width") {
  auto backend = std::make_shared<CountingProvider>();
  CachingProvider cached(backend);
  cached.embed("first");
  backend->next_dim = 7;
  CHECK_THROWS_AS(cached.embed("second"), DimensionMismatchError);
}

TEST_CASE("http provider round-trips embed and generate") {
  httplib::Server server;
  json last_embed_body;
  json last_generate_body;
  server.Post("/embed", [&](const httplib::Request& req,
                            httplib::Response& res) {
    last_embed_body = json::parse(req.body);
    const json reply = {{"embedding", {0.5, -0.5, 0.25}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/generate", [&](const httplib::Request& req,
                               httplib::Response& res) {
    last_generate_body = json::parse(req.body);
    const json reply = {{"text", "vulnerable: tainted data reaches exec"}};
    res.set_content(reply.dump(), "application/json");
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProvider provider("127.0.0.1", port, "test-model", 5);
  auto v = provider.embed("class A {}");
  CHECK(v == std::vector<double>{0.5, -0.5, 0.25});
  CHECK(last_embed_body["model"] == "test-model");
  CHECK(last_embed_body["input"] == "class A {}");

  auto text = provider.generate("why?", 16, 0.25);
  CHECK(text == "vulnerable: tainted data reaches exec");
  CHECK(last_generate_body["model"] == "test-model");
  CHECK(last_generate_body["prompt"] == "why?");
  CHECK(last_generate_body["max_tokens"] == 16);
  CHECK(last_generate_body["temperature"] == doctest::Approx(0.25));
  CHECK(provider.name() == "http:test-model");

  server.stop();
  worker.join();
}

TEST_CASE("http provider reports transport and protocol failures") {
  httplib::Server server;
  server.Post("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  server.Post("/generate",
              [](const httplib::Request&, httplib::Response& res) {
                res.set_content("not json at all", "application/json");
              });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProvider provider("127.0.0.1", port, "m", 5);
  CHECK_THROWS_AS(provider.embed("x"), ProviderUnavailableError);
  CHECK_THROWS_AS(provider.generate("p", 4, 0.0), ProviderUnavailableError);

  server.stop();
  worker.join();

  // nobody listening on the port anymore
  HttpProvider dead("127.0.0.1", port, "m", 1);
  CHECK_THROWS_AS(dead.embed("x"), ProviderUnavailableError);
}

TEST_CASE("http provider rejects malformed embed replies") {
  httplib::Server server;
  server.Post("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"embedding": [1.0, "oops"]})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProvider provider("127.0.0.1", port, "m", 5);
  CHECK_THROWS_AS(provider.embed("x"), ProviderUnavailableError);

  server.stop();
  worker.join();
}
