#pragma once

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bimath/classify.hpp"
#include "bimath/corpus.hpp"
#include "bimath/digest.hpp"
#include "bimath/errors.hpp"
#include "bimath/io.hpp"
#include "bimath/structure.hpp"

namespace bimath {

struct GenerationParams {
  bool sampling = true;
  int top_k = 40;
  double temperature = 0.8;
  double top_p = 0.90;
  int max_length = 4096;

  void validate() const {
    if (temperature < 0) throw ValidationError("temperature must be >= 0");
    if (!(top_p > 0 && top_p <= 1)) throw ValidationError("top_p must lie in (0, 1]");
    if (max_length < 1) throw ValidationError("max_length must be >= 1");
    if (top_k < 0) throw ValidationError("top_k must be >= 0");
  }
  bool operator==(const GenerationParams&) const = default;
};

struct GenerationRequest {
  std::string prompt;
  GenerationParams params;
};

struct GenerationResult {
  std::string text;
  std::string provider_id;
  std::int64_t latency_ms = 0;
  int attempt_count = 1;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
  virtual std::string id() const = 0;
};

inline void check_request(const GenerationRequest& r) {
  if (r.prompt.empty()) throw ValidationError("prompt is empty");
  r.params.validate();
}

/// Deterministic provider: the reply to prompt P is the fixture named
/// sha256(P).txt, looked up in memory first and then in the fixture directory.
class MockProvider : public Provider {
 public:
  MockProvider() = default;
  explicit MockProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string digest(std::string_view prompt) { return sha256_hex(prompt); }

  void add(std::string_view prompt, std::string reply) {
    std::lock_guard lock(mu_);
    fixtures_[digest(prompt)] = std::move(reply);
  }

  /// Writes the in-memory fixtures as digest-named files.
  void save(const std::filesystem::path& dir) const {
    std::lock_guard lock(mu_);
    for (const auto& [d, text] : fixtures_) io::write_file(dir / (d + ".txt"), text);
  }

  GenerationResult generate(const GenerationRequest& request) override {
    check_request(request);
    const auto start = std::chrono::steady_clock::now();
    const std::string d = digest(request.prompt);
    GenerationResult r;
    r.provider_id = id();
    bool found = false;
    {
      std::lock_guard lock(mu_);
      if (auto it = fixtures_.find(d); it != fixtures_.end()) {
        r.text = it->second;
        found = true;
      }
    }
    if (!found) {
      const auto path = dir_ ? *dir_ / (d + ".txt") : std::filesystem::path();
      if (!dir_ || !std::filesystem::exists(path))
        throw ProviderError("missing mock fixture for prompt digest " + d);
      r.text = io::read_file(path);
    }
    r.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    return r;
  }

  std::string id() const override { return "mock"; }

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> fixtures_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::int64_t base_delay_ms = 1000;
  double factor = 2.0;

  std::chrono::milliseconds delay_before(int attempt) const {  // attempt >= 2
    double d = static_cast<double>(base_delay_ms);
    for (int i = 2; i < attempt; ++i) d *= factor;
    return std::chrono::milliseconds(static_cast<std::int64_t>(d));
  }
  bool operator==(const RetryPolicy&) const = default;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Sends one JSON request body; throws TransportError when no response arrives.
using Transport = std::function<HttpResponse(const std::string& body)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct ProviderConfig {
  std::string kind = "mock";  // mock | http
  std::string endpoint;
  std::string credential_env;  // name of the variable holding the API key
  std::string model;
  std::string fixtures;        // mock fixture directory
  int concurrency = 4;
  double rate_limit = 0;       // requests per second, 0 = unlimited
  RetryPolicy retry;

  bool operator==(const ProviderConfig&) const = default;
};

inline nlohmann::json to_json(const ProviderConfig& c) {
  return {{"kind", c.kind},
          {"endpoint", c.endpoint},
          {"credential_env", c.credential_env},
          {"model", c.model},
          {"fixtures", c.fixtures},
          {"concurrency", c.concurrency},
          {"rate_limit", c.rate_limit},
          {"retry",
           {{"max_attempts", c.retry.max_attempts},
            {"base_delay_ms", c.retry.base_delay_ms},
            {"factor", c.retry.factor}}}};
}

inline ProviderConfig provider_config_from_json(const nlohmann::json& j) {
  ProviderConfig c;
  c.kind = j.value("kind", c.kind);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.credential_env = j.value("credential_env", c.credential_env);
  c.model = j.value("model", c.model);
  c.fixtures = j.value("fixtures", c.fixtures);
  c.concurrency = j.value("concurrency", c.concurrency);
  c.rate_limit = j.value("rate_limit", c.rate_limit);
  if (j.contains("retry")) {
    const auto& r = j.at("retry");
    c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
    c.retry.base_delay_ms = r.value("base_delay_ms", c.retry.base_delay_ms);
    c.retry.factor = r.value("factor", c.retry.factor);
  }
  if (c.kind != "mock" && c.kind != "http")
    throw ValidationError("provider kind must be mock or http, got '" + c.kind + "'");
  if (c.concurrency < 1) throw ValidationError("provider concurrency must be >= 1");
  if (c.rate_limit < 0) throw ValidationError("provider rate_limit must be >= 0");
  if (c.retry.max_attempts < 1) throw ValidationError("retry max_attempts must be >= 1");
  if (c.kind == "http" && c.endpoint.empty()) throw ValidationError("http provider needs an endpoint");
  return c;
}

/// Blocking httplib transport posting to `endpoint` with an optional bearer token.
inline Transport make_http_transport(const std::string& endpoint, std::string token) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, url_re)) throw ValidationError("bad endpoint URL " + endpoint);
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/";
  return [base, path, token = std::move(token)](const std::string& body) {
    httplib::Client cli(base);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(120);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    auto res = cli.Post(path, headers, body, "application/json");
    if (!res) throw TransportError("request to " + base + path + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
  };
}

/// Generic JSON-over-HTTP provider. Transient failures (no response, 429,
/// 5xx) are retried with exponential backoff; other error statuses and
/// replies carrying an "error" field surface verbatim.
class HttpProvider : public Provider {
 public:
  HttpProvider(ProviderConfig cfg, Transport transport, Sleeper sleeper = default_sleeper())
      : cfg_(std::move(cfg)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {}

  /// Reads the credential from the configured environment variable.
  static std::unique_ptr<HttpProvider> from_config(const ProviderConfig& cfg) {
    std::string token;
    if (!cfg.credential_env.empty()) {
      const char* v = std::getenv(cfg.credential_env.c_str());
      if (!v || !*v) throw ProviderError("credential variable " + cfg.credential_env + " is not set");
      token = v;
    }
    return std::make_unique<HttpProvider>(cfg, make_http_transport(cfg.endpoint, token));
  }

  static Sleeper default_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

  /// Called with the in-flight count each time a request enters the window.
  void set_in_flight_hook(std::function<void(int)> hook) { hook_ = std::move(hook); }

  GenerationResult generate(const GenerationRequest& request) override {
    check_request(request);
    const std::string body = io::dump({{"model", cfg_.model},
                                       {"prompt", request.prompt},
                                       {"sampling", request.params.sampling},
                                       {"top_k", request.params.top_k},
                                       {"temperature", request.params.temperature},
                                       {"top_p", request.params.top_p},
                                       {"max_length", request.params.max_length}});
    const auto start = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 1; attempt <= cfg_.retry.max_attempts; ++attempt) {
      if (attempt > 1) sleeper_(cfg_.retry.delay_before(attempt));
      std::optional<HttpResponse> res;
      {
        Slot slot(*this);
        wait_for_rate_slot();
        try {
          res = transport_(body);
        } catch (const TransportError& e) {
          last_error = e.what();
        }
      }
      if (!res) continue;
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body);
      GenerationResult out;
      out.provider_id = id();
      out.attempt_count = attempt;
      out.text = parse_reply(res->body);
      out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      return out;
    }
    throw TransportError("giving up after " + std::to_string(cfg_.retry.max_attempts) +
                         " attempts: " + last_error);
  }

  std::string id() const override { return cfg_.model.empty() ? "http" : "http:" + cfg_.model; }

  int max_in_flight_seen() const { return max_seen_.load(); }

 private:
  struct Slot {
    explicit Slot(HttpProvider& p) : p_(p) {
      std::unique_lock lock(p_.mu_);
      p_.cv_.wait(lock, [&] { return p_.in_flight_ < p_.cfg_.concurrency; });
      const int now = ++p_.in_flight_;
      if (now > p_.max_seen_) p_.max_seen_ = now;
      if (p_.hook_) p_.hook_(now);
    }
    ~Slot() {
      {
        std::lock_guard lock(p_.mu_);
        --p_.in_flight_;
      }
      p_.cv_.notify_one();
    }
    HttpProvider& p_;
  };

  void wait_for_rate_slot() {
    if (cfg_.rate_limit <= 0) return;
    const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / cfg_.rate_limit));
    std::chrono::steady_clock::time_point mine;
    {
      std::lock_guard lock(rate_mu_);
      const auto now = std::chrono::steady_clock::now();
      mine = std::max(now, next_slot_);
      next_slot_ = mine + interval;
    }
    const auto wait = mine - std::chrono::steady_clock::now();
    if (wait > std::chrono::steady_clock::duration::zero())
      sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(wait));
  }

  static std::string parse_reply(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
      throw ProviderError("unparseable provider reply: " + body);
    }
    if (j.contains("error")) {
      const auto& e = j.at("error");
      throw ProviderError(e.is_string() ? e.get<std::string>() : e.dump());
    }
    if (!j.contains("text") || !j.at("text").is_string())
      throw ProviderError("provider reply has no text field: " + body);
    return j.at("text").get<std::string>();
  }

  ProviderConfig cfg_;
  Transport transport_;
  Sleeper sleeper_;
  std::function<void(int)> hook_;
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::atomic<int> max_seen_{0};
  std::mutex rate_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

inline std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg) {
  if (cfg.kind == "mock") {
    if (cfg.fixtures.empty()) return std::make_unique<MockProvider>();
    return std::make_unique<MockProvider>(cfg.fixtures);
  }
  return HttpProvider::from_config(cfg);
}

// ---------------------------------------------------------------------------
// Augmentation
// ---------------------------------------------------------------------------

struct GeneratedProblem {
  std::string question;
  std::string answer;
};

/// Reads "Question: ... Answer: ..." from a generation. A leading
/// "New Problem:" label is tolerated; Hindi labels are accepted too.
inline std::optional<GeneratedProblem> parse_generation(std::string_view text) {
  static const std::regex answer_re(R"((^|\n)[ \t*#]*(Answer|New Answer|उत्तर)\s*[:：])");
  static const std::regex question_re(R"(^\s*[*#]*\s*(New Problem\s*:\s*)?(Question|प्रश्न)?\s*[:：]?\s*)");
  const std::string s(text);
  std::smatch m;
  if (!std::regex_search(s, m, answer_re)) return std::nullopt;
  std::string q = s.substr(0, static_cast<std::size_t>(m.position(0)));
  std::string a = s.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
  q = std::regex_replace(q, question_re, "", std::regex_constants::format_first_only);
  GeneratedProblem g{std::string(detail::trim(q)), std::string(detail::trim(a))};
  if (g.question.empty() || g.answer.empty()) return std::nullopt;
  return g;
}

/// The prompt sent for one seed: the seed is its own one-shot exemplar.
inline std::string augment_prompt(const PromptTemplate& tpl, const Problem& seed) {
  return render_prompt(tpl, {{"Example", seed.question},
                             {"refined_solution", solution_text(seed).value_or("")},
                             {"Question", ""}});
}

struct AugmentOptions {
  std::size_t target = 0;
  std::size_t concurrency = 4;  // generations per wave
  double min_yield = 0.5;
  std::size_t min_attempts_for_abort = 10;
  GenerationParams params;
};

struct AugmentResult {
  CorpusManifest manifest;  // the new Synthetic problems only
  std::size_t attempts = 0;
  std::size_t discarded = 0;
};

/// Cycles through seeds (records with a solution) in manifest order until
/// `target` problems parse. Each wave runs concurrently; results are taken
/// in attempt order, so output is independent of scheduling.
inline AugmentResult augment_batch(const CorpusManifest& manifest, Provider& provider,
                                   const PromptTemplate& tpl, const AugmentOptions& opts) {
  if (tpl.name != PromptName::Augment) throw ValidationError("augment_batch needs the augment template");
  std::vector<const Problem*> seeds;
  for (const auto& p : manifest.records())
    if (solution_text(p)) seeds.push_back(&p);
  AugmentResult r;
  if (opts.target == 0) {
    r.manifest = derive(manifest, {});
    return r;
  }
  if (seeds.empty()) throw ValidationError("no seed problems with solutions");

  std::vector<Problem> out;
  const std::size_t wave = std::max<std::size_t>(1, opts.concurrency);
  while (out.size() < opts.target) {
    std::vector<std::future<GenerationResult>> futures;
    std::vector<std::size_t> attempt_ids;
    for (std::size_t i = 0; i < wave && out.size() + i < opts.target; ++i) {
      const std::size_t k = r.attempts + i;
      const Problem* seed = seeds[k % seeds.size()];
      GenerationRequest req{augment_prompt(tpl, *seed), opts.params};
      futures.push_back(std::async(std::launch::async,
                                   [&provider, req = std::move(req)] { return provider.generate(req); }));
      attempt_ids.push_back(k);
    }
    // Collect every future before rethrowing, so no task outlives the call.
    std::vector<std::optional<GenerationResult>> results;
    std::exception_ptr failure;
    for (auto& f : futures) {
      try {
        results.emplace_back(f.get());
      } catch (...) {
        if (!failure) failure = std::current_exception();
        results.emplace_back();
      }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < results.size(); ++i) {
      const std::size_t k = attempt_ids[i];
      ++r.attempts;
      const Problem* seed = seeds[k % seeds.size()];
      auto g = parse_generation(results[i]->text);
      if (!g) {
        ++r.discarded;
        continue;
      }
      Problem p;
      p.id = "syn-" + seed->id + "-" + std::to_string(k / seeds.size() + 1);
      p.language = seed->language;
      p.source = Source::Synthetic;
      p.question = unicode::nfc(g->question);
      p.raw_solution = unicode::nfc(g->answer);
      p.difficulty = seed->difficulty;
      p.topic = seed->topic;
      p.review_status = ReviewStatus::Pending;
      p.extras = {{"seed_id", seed->id}, {"provider", results[i]->provider_id}};
      out.push_back(std::move(p));
    }
    if (r.attempts >= opts.min_attempts_for_abort &&
        static_cast<double>(out.size()) < opts.min_yield * static_cast<double>(r.attempts)) {
      throw ValidationError("augmentation yield too low: " + std::to_string(out.size()) + " of " +
                            std::to_string(r.attempts) + " generations parsed (" +
                            std::to_string(r.discarded) + " discarded)");
    }
  }
  r.manifest = derive(manifest, std::move(out));
  return r;
}

/// Review decisions, one `id<TAB>status` per line.
inline std::map<std::string, ReviewStatus> parse_review_file(std::string_view text) {
  std::map<std::string, ReviewStatus> out;
  std::size_t lineno = 0;
  for (auto line : answer_detail::split_lines(text)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError("review line " + std::to_string(lineno) + ": expected id<TAB>status");
    out[std::string(detail::trim(line.substr(0, tab)))] =
        parse_review_status(detail::trim(line.substr(tab + 1)));
  }
  return out;
}

inline CorpusManifest apply_review(const CorpusManifest& manifest,
                                   const std::map<std::string, ReviewStatus>& decisions) {
  std::vector<std::string> unknown;
  for (const auto& [id, _] : decisions)
    if (!manifest.find(id)) unknown.push_back(id);
  if (!unknown.empty()) {
    std::string msg = "review names unknown ids:";
    for (const auto& id : unknown) msg += " " + id;
    throw ValidationError(msg);
  }
  std::vector<Problem> out = manifest.records();
  for (auto& p : out)
    if (auto it = decisions.find(p.id); it != decisions.end()) p.review_status = it->second;
  return derive(manifest, std::move(out));
}

/// Keeps problems that were never under review or were approved.
inline CorpusManifest approved_only(const CorpusManifest& manifest) {
  std::vector<Problem> out;
  for (const auto& p : manifest.records())
    if (!p.review_status || *p.review_status == ReviewStatus::Approved) out.push_back(p);
  return derive(manifest, std::move(out));
}

// ---------------------------------------------------------------------------
// LLM-judged complexity
// ---------------------------------------------------------------------------

inline std::string judge_prompt(const Problem& p) {
  return "Rate the following math problem on each criterion from 1 (lowest) to 5 (highest).\n"
         "Reply with five lines of the form `Criterion: score`.\n"
         "Language Understanding, Mathematical Complexity, Reasoning Complexity, "
         "Number of Variables, Conceptual Complexity.\n\n"
         "Problem:\n" +
         p.question + "\n";
}

/// Parses the five criterion scores from a judge reply; total is their mean.
inline ComplexityScore parse_judgement(std::string_view reply) {
  static const std::array<std::pair<const char*, int>, 5> names = {{
      {"language understanding", 0},
      {"mathematical complexity", 1},
      {"reasoning complexity", 2},
      {"number of variables", 3},
      {"conceptual complexity", 4},
  }};
  std::array<std::optional<int>, 5> got;
  for (auto line : answer_detail::split_lines(reply)) {
    const std::string low = detail::lower(line);
    for (const auto& [name, idx] : names) {
      const auto at = low.find(name);
      if (at == std::string::npos) continue;
      const auto digit = low.find_first_of("12345", at + std::string_view(name).size());
      if (digit != std::string::npos) got[idx] = low[digit] - '0';
    }
  }
  ComplexityScore s;
  std::array<double*, 5> slots = {&s.language_understanding, &s.mathematical_complexity,
                                  &s.reasoning_complexity, &s.num_variables,
                                  &s.conceptual_complexity};
  double sum = 0;
  for (int i = 0; i < 5; ++i) {
    if (!got[i]) throw ProviderError("judge reply lacks score for " + std::string(names[i].first));
    *slots[i] = *got[i];
    sum += *got[i];
  }
  s.total = sum / 5;
  return s;
}

inline ComplexityScore judge_complexity(Provider& provider, const Problem& p,
                                        const GenerationParams& params = {}) {
  return parse_judgement(provider.generate({judge_prompt(p), params}).text);
}

}  // namespace bimath
