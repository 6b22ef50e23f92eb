#include "lyra/backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lyra/logging.hpp"
#include "lyra/metrics.hpp"
#include "lyra/utf8.hpp"

namespace lyra {

void BackendConfig::validate() const {
  if (decoding != "greedy") {
    throw ConfigError("decoding '" + decoding + "' is not supported; only greedy decoding is");
  }
  if (max_inflight < 1) throw ConfigError("max_inflight must be positive");
  if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be positive");
  if (max_tokens && *max_tokens < 1) throw ConfigError("max_tokens must be positive");
  if (kind == BackendKind::http) {
    if (endpoint.empty()) throw ConfigError("http backend needs an endpoint");
    parse_url(endpoint);
    if (model.empty()) throw ConfigError("http backend needs a model identifier");
  }
}

int default_max_tokens(std::string_view query) {
  const auto n = static_cast<int>(tokenize(query).size());
  return std::max(64, 4 * n);
}

// HTTP ---------------------------------------------------------------------

HttpChatBackend::HttpChatBackend(BackendConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!config_.auth_env.empty()) {
    if (const char* token = std::getenv(config_.auth_env.c_str())) token_ = token;
  }
}

std::string HttpChatBackend::request_body(const CompletionRequest& request) const {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  nlohmann::json body = {
      {"model", config_.model},
      {"messages", messages},
      {"temperature", 0},
      {"top_p", 1},
      {"n", 1},
      {"stream", false},
      {"max_tokens", request.max_tokens},
  };
  if (!request.stop.empty()) body["stop"] = request.stop;
  return body.dump();
}

Completion HttpChatBackend::complete(const CompletionRequest& request) {
  const std::string body = request_body(request);
  HttpHeaders headers;
  if (!token_.empty()) headers.emplace_back("Authorization", "Bearer " + token_);
  spdlog::debug("POST {} Authorization: {} body: {}", config_.endpoint,
                token_.empty() ? "<none>" : "Bearer ***", redact(excerpt(body, 4000), token_));

  const auto response = transport_->post_json(config_.endpoint, body, headers, config_.timeout);
  spdlog::debug("HTTP {} body: {}", response.status, redact(excerpt(response.body, 4000), token_));
  if (response.status < 200 || response.status >= 300) {
    throw ServiceError(response.status, excerpt(response.body));
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(response.body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("completion response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    throw ProtocolError("completion response has no choices");
  }
  const auto& choice = doc["choices"][0];
  Completion out;
  if (choice.contains("message") && choice["message"].is_object() &&
      choice["message"].contains("content") && choice["message"]["content"].is_string()) {
    out.text = choice["message"]["content"].get<std::string>();
  } else if (choice.contains("text") && choice["text"].is_string()) {
    out.text = choice["text"].get<std::string>();
  } else {
    throw ProtocolError("completion choice carries no text");
  }
  nlohmann::json meta = nlohmann::json::object();
  for (const char* key : {"id", "model"}) {
    if (doc.contains(key)) meta[key] = doc[key];
  }
  if (choice.contains("finish_reason")) meta["finish_reason"] = choice["finish_reason"];
  if (doc.contains("usage")) meta["usage"] = doc["usage"];
  out.meta = meta.dump();
  return out;
}

// Mock ---------------------------------------------------------------------

MockBackend::MockBackend(std::map<std::string, std::string> table, PromptTemplate tmpl)
    : table_(std::move(table)), template_(std::move(tmpl)) {}

void MockBackend::set_latency(std::function<std::chrono::microseconds(const std::string&)> latency) {
  latency_ = std::move(latency);
}

void MockBackend::set_fault(const std::string& query, Fault fault) {
  std::lock_guard lock(mutex_);
  faults_[query] = fault;
}

int MockBackend::calls_for(const std::string& query) const {
  std::lock_guard lock(mutex_);
  auto it = seen_.find(query);
  return it == seen_.end() ? 0 : it->second;
}

std::string MockBackend::query_of(const CompletionRequest& request) const {
  if (request.messages.empty()) return {};
  const std::string& content = request.messages.back().content;
  for (const auto& src : supported_languages()) {
    for (const auto& tgt : supported_languages()) {
      if (src == tgt) continue;
      if (auto q = extract_query(content, template_, {src, tgt})) return *q;
    }
  }
  return std::string(utf8::trim(content));
}

Completion MockBackend::complete(const CompletionRequest& request) {
  ++calls_;
  const int now = ++inflight_;
  int seen_max = max_inflight_.load();
  while (now > seen_max && !max_inflight_.compare_exchange_weak(seen_max, now)) {
  }
  struct Leave {
    std::atomic<int>& counter;
    ~Leave() { --counter; }
  } leave{inflight_};

  const std::string query = query_of(request);
  if (latency_) std::this_thread::sleep_for(latency_(query));

  int call_no = 0;
  Fault fault;
  {
    std::lock_guard lock(mutex_);
    call_no = ++seen_[query];
    if (auto it = faults_.find(query); it != faults_.end()) fault = it->second;
  }
  if (call_no <= fault.failures) {
    if (fault.status == 0) throw TransportError("mock transport failure for '" + query + "'", 1);
    throw ServiceError(fault.status, "mock failure");
  }

  Completion out;
  if (auto it = table_.find(query); it != table_.end()) {
    out.text = it->second;
    out.meta = R"({"mock":"table"})";
  } else {
    out.text = unknown_ == Unknown::echo ? query : std::string();
    out.meta = R"({"mock":"unknown"})";
  }
  return out;
}

// Translation ----------------------------------------------------------------

std::string extract_hypothesis(std::string_view completion, std::span<const std::string> stop) {
  std::string_view text = completion;
  const auto trimmed = utf8::trim(text);
  if (trimmed.empty()) return {};
  // Leading whitespace only; a stop sequence may sit right after the answer.
  text = text.substr(static_cast<std::size_t>(trimmed.data() - text.data()));
  std::size_t cut = text.size();
  for (const auto& s : stop) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  return std::string(utf8::trim(text.substr(0, cut)));
}

TranslationResult translate(const TranslationRequest& request, const BackendConfig& config,
                            Backend& backend, const Sleeper& sleep) {
  CompletionRequest call;
  call.messages = request.messages.empty()
                      ? std::vector<ChatMessage>{{"user", request.prompt_text}}
                      : request.messages;
  call.max_tokens = config.max_tokens.value_or(
      default_max_tokens(request.query_text.empty() ? request.prompt_text : request.query_text));
  call.stop = config.stop;

  TranslationResult result;
  result.query_id = request.query_id;
  const auto start = std::chrono::steady_clock::now();
  const Completion completion =
      with_retry(config.retry, [&] { return backend.complete(call); }, result.attempts, sleep);
  result.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  result.hypothesis = extract_hypothesis(completion.text, config.stop);
  result.backend_meta = completion.meta;
  if (result.hypothesis.empty()) {
    throw EmptyOutputError("empty completion for '" + request.query_id + "'");
  }
  return result;
}

std::vector<TranslationResult> translate_batch(std::span<const TranslationRequest> requests,
                                               const BackendConfig& config, Backend& backend,
                                               const Sleeper& sleep) {
  {
    std::unordered_set<std::string> ids;
    for (const auto& r : requests) {
      if (!ids.insert(r.query_id).second) {
        throw ValidationError("duplicate query id '" + r.query_id + "' in batch");
      }
    }
  }
  std::vector<TranslationResult> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      int attempts = 0;
      try {
        results[i] = translate(requests[i], config, backend, sleep);
      } catch (const TransportError& e) {
        attempts = e.attempts();
        results[i].error = TranslationFailure{e.category(), e.what()};
      } catch (const ServiceError& e) {
        attempts = e.attempts();
        results[i].error = TranslationFailure{e.category(), e.what()};
      } catch (const Error& e) {
        attempts = 1;
        results[i].error = TranslationFailure{e.category(), e.what()};
      } catch (const std::exception& e) {
        attempts = 1;
        results[i].error = TranslationFailure{ErrorCategory::internal, e.what()};
      }
      if (results[i].error) {
        results[i].query_id = requests[i].query_id;
        results[i].attempts = attempts;
        spdlog::warn("translation of '{}' failed: {}", requests[i].query_id, results[i].error->message);
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.max_inflight, 1)),
                                             requests.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (!results.empty() &&
      std::none_of(results.begin(), results.end(), [](const auto& r) { return r.ok(); })) {
    const auto& first = *results.front().error;
    throw Error(first.category, "all " + std::to_string(results.size()) +
                                    " translations failed; first error: " + first.message);
  }
  return results;
}

}  // namespace lyra
