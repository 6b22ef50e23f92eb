#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyra/error.hpp"
#include "lyra/http_transport.hpp"
#include "lyra/prompting.hpp"
#include "lyra/retry.hpp"

namespace lyra {

enum class BackendKind { http, mock };

struct BackendConfig {
  BackendKind kind = BackendKind::mock;
  /// Full chat-completions URL, e.g. http://localhost:8000/v1/chat/completions
  std::string endpoint;
  std::string model;
  /// Environment variable holding the bearer token. Secrets never travel
  /// through config files or flags.
  std::string auth_env = "LYRA_API_TOKEN";
  std::chrono::milliseconds timeout{60000};
  int max_inflight = 4;
  /// Only "greedy" is accepted.
  std::string decoding = "greedy";
  RetryPolicy retry;
  /// Completion cut points; when empty the template's stop list is used.
  std::vector<std::string> stop;
  /// Fixed generation budget. Unset means max(64, 4 x query token count).
  std::optional<int> max_tokens;

  /// Throws ConfigError on a non-greedy decoding mode, a bad endpoint or a
  /// non-positive in-flight limit.
  void validate() const;
};

/// max(64, 4 x number of tokens in `query`).
int default_max_tokens(std::string_view query);

struct CompletionRequest {
  std::vector<ChatMessage> messages;
  int max_tokens = 64;
  std::vector<std::string> stop;
};

struct Completion {
  std::string text;
  std::string meta;
};

/// Greedy completion service. Must tolerate concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  /// Throws TransportError / ServiceError / ProtocolError. No retries here.
  virtual Completion complete(const CompletionRequest& request) = 0;
};

/// Chat-completion JSON over HTTP: model, messages, temperature 0, top_p 1,
/// n 1, max_tokens, stop. Reads choices[0].message.content, falling back to
/// choices[0].text for text-in/text-out adapters.
class HttpChatBackend final : public Backend {
 public:
  HttpChatBackend(BackendConfig config, std::shared_ptr<HttpTransport> transport);
  Completion complete(const CompletionRequest& request) override;

  /// Request body as sent (exposed for tests and debug output).
  std::string request_body(const CompletionRequest& request) const;

 private:
  BackendConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::string token_;
};

/// Offline backend: recovers the query from the prompt and answers from a
/// lookup table. Latency, failures and concurrency are instrumentable.
class MockBackend final : public Backend {
 public:
  struct Fault {
    /// Number of leading calls for this query that fail.
    int failures = 0;
    /// 0 fails with a transport error, otherwise with this HTTP status.
    int status = 0;
  };

  enum class Unknown { echo, empty };

  explicit MockBackend(std::map<std::string, std::string> table,
                       PromptTemplate tmpl = TemplateRegistry::builtin().get("plain"));

  void set_latency(std::function<std::chrono::microseconds(const std::string& query)> latency);
  void set_fault(const std::string& query, Fault fault);
  void set_unknown_policy(Unknown policy) { unknown_ = policy; }

  Completion complete(const CompletionRequest& request) override;

  int max_observed_inflight() const noexcept { return max_inflight_.load(); }
  int calls() const noexcept { return calls_.load(); }
  int calls_for(const std::string& query) const;

 private:
  std::string query_of(const CompletionRequest& request) const;

  std::map<std::string, std::string> table_;
  PromptTemplate template_;
  Unknown unknown_ = Unknown::echo;
  std::function<std::chrono::microseconds(const std::string&)> latency_;

  mutable std::mutex mutex_;
  std::map<std::string, Fault> faults_;
  std::map<std::string, int> seen_;
  std::atomic<int> inflight_{0};
  std::atomic<int> max_inflight_{0};
  std::atomic<int> calls_{0};
};

struct TranslationRequest {
  std::string query_id;
  /// Source-language text being translated, used for the token budget.
  std::string query_text;
  std::string prompt_text;
  /// When empty, prompt_text is sent as a single user message.
  std::vector<ChatMessage> messages;
};

struct TranslationFailure {
  ErrorCategory category = ErrorCategory::internal;
  std::string message;
};

struct TranslationResult {
  std::string query_id;
  std::string hypothesis;
  double latency_ms = 0.0;
  std::string backend_meta;
  int attempts = 0;
  std::optional<TranslationFailure> error;

  bool ok() const noexcept { return !error.has_value(); }
};

/// Extracted hypothesis: leading whitespace dropped, cut at the first stop
/// sequence, trimmed.
std::string extract_hypothesis(std::string_view completion, std::span<const std::string> stop);

/// One greedy translation with the configured retry policy. Throws the last
/// error once retries are exhausted, EmptyOutputError on an empty extraction.
TranslationResult translate(const TranslationRequest& request, const BackendConfig& config,
                            Backend& backend, const Sleeper& sleep = real_sleep);

/// Results come back in input order. At most config.max_inflight requests
/// are outstanding. Failed items carry `error`; the call only throws when
/// every item failed, or on duplicate query ids.
std::vector<TranslationResult> translate_batch(std::span<const TranslationRequest> requests,
                                               const BackendConfig& config, Backend& backend,
                                               const Sleeper& sleep = real_sleep);

}  // namespace lyra
