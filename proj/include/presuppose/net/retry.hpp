#pragma once

#include "presuppose/net/provider_error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace presuppose::net {

// Bounded exponential backoff.
struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds initial_delay{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{30'000};

    // Delay before attempt number `attempt + 1`, given that `attempt` (1-based)
    // just failed.
    std::chrono::milliseconds delay_after(int attempt) const
    {
        const double raw = static_cast<double>(initial_delay.count()) *
                           std::pow(multiplier, static_cast<double>(attempt - 1));
        const double capped = std::min(raw, static_cast<double>(max_delay.count()));
        return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
    }
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

// Calls fn until it succeeds, a non-retriable ProviderError escapes, or the
// policy runs out of attempts. The surfaced error carries the attempt count.
template <class Fn>
auto with_retry(Fn&& fn, const RetryPolicy& policy, const Sleeper& sleep = real_sleep)
    -> decltype(fn())
{
    for (int attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (ProviderError& e) {
            e.set_attempts(attempt);
            if (!e.retriable() || attempt >= policy.max_attempts)
                throw;
            auto delay = policy.delay_after(attempt);
            if (e.retry_after())
                delay = std::max(delay, *e.retry_after());
            sleep(delay);
        }
    }
}

}  // namespace presuppose::net
