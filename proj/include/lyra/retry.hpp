#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <thread>
#include <vector>

#include "lyra/error.hpp"

namespace lyra {

/// Bounded retry with a fixed backoff schedule. Only transport failures and
/// HTTP 5xx responses are retried; everything else propagates immediately.
struct RetryPolicy {
  int max_attempts = 3;
  /// Delay before attempt n+1 is delays[n-1]; the last entry repeats.
  std::vector<std::chrono::milliseconds> delays{std::chrono::milliseconds(500),
                                                std::chrono::milliseconds(2000)};

  std::chrono::milliseconds delay_after(int attempt) const {
    if (delays.empty()) return std::chrono::milliseconds(0);
    const auto i = static_cast<std::size_t>(std::max(attempt, 1) - 1);
    return delays[std::min(i, delays.size() - 1)];
  }
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Runs `call` under `policy`. `attempts` receives the number of calls made,
/// also when the final one throws. Exhausted retries rethrow the last error
/// with the attempt count attached.
template <typename Call>
auto with_retry(const RetryPolicy& policy, Call&& call, int& attempts,
                const Sleeper& sleep = real_sleep) -> decltype(call()) {
  attempts = 0;
  const int limit = std::max(policy.max_attempts, 1);
  while (true) {
    ++attempts;
    try {
      return call();
    } catch (const TransportError& e) {
      if (attempts >= limit) {
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempts) +
                                 " attempts)",
                             attempts);
      }
    } catch (const ServiceError& e) {
      if (!e.retryable() || attempts >= limit) {
        throw ServiceError(e.status(), e.body_excerpt(), attempts);
      }
    }
    sleep(policy.delay_after(attempts));
  }
}

}  // namespace lyra
