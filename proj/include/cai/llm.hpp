/*
 * Copyright 2026 The CAI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <thread>

#include "cai/error.hpp"
#include "cai/pattern.hpp"
#include "cai/prompt.hpp"
#include "cai/text.hpp"

namespace cai::llm {

struct LlmRequest {
    std::string prompt;
    double temperature = 0.0;
    double top_p = 0.0;
    int top_k = 1;
    int max_output_tokens = 1024;
    std::optional<std::int64_t> seed;
};

struct LlmResponse {
    std::string text;
};

/// Worth retrying: timeouts, connection resets, 429 and 5xx responses.
class TransientError : public BackendError {
public:
    using BackendError::BackendError;
};

class AuthError : public BackendError {
public:
    using BackendError::BackendError;
};

class TokenLimitError : public BackendError {
public:
    using BackendError::BackendError;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual LlmResponse complete(const LlmRequest& request) const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic mock
// ---------------------------------------------------------------------------

inline const std::set<std::string>& corporate_suffixes() {
    static const std::set<std::string> kSuffixes{"inc", "corp", "corporation", "ltd",
                                                 "plc", "co",   "group"};
    return kSuffixes;
}

/// Case-insensitive token-set containment (either direction) after dropping
/// corporate suffixes.
inline bool entity_matches(std::string_view entity_name, std::string_view company_name) {
    auto tokens = [](std::string_view s) {
        std::set<std::string> out;
        for (auto& t : text::alnum_tokens(s)) {
            if (!corporate_suffixes().count(t)) out.insert(std::move(t));
        }
        return out;
    };
    const auto e = tokens(entity_name);
    const auto c = tokens(company_name);
    if (e.empty() || c.empty()) return false;
    return std::includes(c.begin(), c.end(), e.begin(), e.end()) ||
           std::includes(e.begin(), e.end(), c.begin(), c.end());
}

/// True when the text names a part of the company: a subsidiary, division,
/// facility, plant, site, country or region, or "our <X> business".
inline bool mentions_partial_boundary(std::string_view sub_context) {
    static const std::regex kQualifier(
        R"(\b(?:subsidiar(?:y|ies)|divisions?|facilit(?:y|ies)|plants?|sites?|factor(?:y|ies)|our(?: [a-z]+){1,2} business(?:es)?|(?:germany|german|france|french|italy|italian|spain|spanish|netherlands|dutch|uk|united kingdom|british|united states|american|canada|canadian|mexico|brazil|china|chinese|india|indian|japan|japanese|korea|korean|australia|australian|europe|european|emea|apac|asia|asian|africa|african|north america|latin america|middle east))\b)");
    return std::regex_search(text::lower(sub_context), kQualifier);
}

/// Answers extraction prompts with pattern_extract on the input section and
/// the two auxiliary prompts with their lexical rules. Sampling parameters are
/// ignored; output depends only on the prompt.
class MockLlmBackend final : public LlmBackend {
public:
    LlmResponse complete(const LlmRequest& request) const override {
        const std::string_view prompt = request.prompt;
        if (prompt.substr(0, extract::kEntityInstruction.size()) == extract::kEntityInstruction) {
            const auto entity = extract::last_labeled(prompt, "Entity name");
            const auto company = extract::last_labeled(prompt, "Company name");
            return {entity_matches(entity, company) ? "yes" : "no"};
        }
        if (prompt.substr(0, extract::kBoundaryInstruction.size()) ==
            extract::kBoundaryInstruction) {
            const auto sub = extract::last_labeled(prompt, "Sub-context");
            return {mentions_partial_boundary(sub) ? "non_corporate_wide" : "corporate_wide"};
        }
        return {extract::serialize(extract::pattern_extract(extract::input_section(prompt)))};
    }
};

// ---------------------------------------------------------------------------
// Retrying client
// ---------------------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{250};
};

/// Roughly four characters per token.
inline std::size_t estimate_tokens(std::string_view s) noexcept { return (s.size() + 3) / 4; }

/// Sends the request, retrying transient failures with exponential backoff.
/// Auth and token-limit rejections are not retried.
inline LlmResponse call_llm(const LlmRequest& req, const LlmBackend& backend,
                            const RetryPolicy& policy = {}) {
    auto delay = policy.base_delay;
    for (int attempt = 1;; ++attempt) {
        try {
            return backend.complete(req);
        } catch (const TransientError& e) {
            if (attempt >= policy.max_attempts) {
                throw ExtractionError("llm call failed after " + std::to_string(attempt) +
                                      " attempts: " + e.what());
            }
        } catch (const AuthError& e) {
            throw ExtractionError(std::string("llm authentication failed: ") + e.what());
        } catch (const TokenLimitError& e) {
            throw ExtractionError(std::string("llm rejected request size: ") + e.what());
        } catch (const BackendError& e) {
            throw ExtractionError(std::string("llm backend error: ") + e.what());
        }
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

struct ClientOptions {
    RetryPolicy retry;
    std::size_t max_concurrency = 4;
    std::size_t requests_per_minute = 0;  // 0 = unlimited
    std::size_t max_input_tokens = 8192;
};

/// Shared front door to a backend: caps in-flight calls, enforces a
/// per-minute request budget and the input token limit, and tags errors with
/// the caller's provenance.
class LlmClient {
public:
    LlmClient(const LlmBackend& backend, ClientOptions options)
        : backend_(backend), options_(options) {
        if (options_.max_concurrency == 0) options_.max_concurrency = 1;
    }

    LlmResponse call(const LlmRequest& req, std::string_view provenance = {}) const {
        if (estimate_tokens(req.prompt) > options_.max_input_tokens) {
            throw ExtractionError(tag(provenance) + "prompt of ~" +
                                  std::to_string(estimate_tokens(req.prompt)) +
                                  " tokens exceeds llm.max_input_tokens (" +
                                  std::to_string(options_.max_input_tokens) + ")");
        }
        Slot slot(*this);
        wait_for_budget();
        try {
            return call_llm(req, backend_, options_.retry);
        } catch (const ExtractionError& e) {
            throw ExtractionError(tag(provenance) + e.what());
        }
    }

    const ClientOptions& options() const noexcept { return options_; }

private:
    struct Slot {
        explicit Slot(const LlmClient& c) : client(c) {
            std::unique_lock lock(client.mutex_);
            client.cv_.wait(lock, [&] { return client.in_flight_ < client.options_.max_concurrency; });
            ++client.in_flight_;
        }
        ~Slot() {
            {
                std::lock_guard lock(client.mutex_);
                --client.in_flight_;
            }
            client.cv_.notify_one();
        }
        const LlmClient& client;
    };

    void wait_for_budget() const {
        if (options_.requests_per_minute == 0) return;
        using clock = std::chrono::steady_clock;
        std::unique_lock lock(rate_mutex_);
        for (;;) {
            const auto now = clock::now();
            while (!sent_.empty() && now - sent_.front() >= std::chrono::minutes(1)) sent_.pop_front();
            if (sent_.size() < options_.requests_per_minute) {
                sent_.push_back(now);
                return;
            }
            const auto wake = sent_.front() + std::chrono::minutes(1);
            lock.unlock();
            std::this_thread::sleep_until(wake);
            lock.lock();
        }
    }

    static std::string tag(std::string_view provenance) {
        return provenance.empty() ? std::string{} : "[" + std::string(provenance) + "] ";
    }

    const LlmBackend& backend_;
    ClientOptions options_;
    mutable std::mutex mutex_;
    mutable std::condition_variable cv_;
    mutable std::size_t in_flight_ = 0;
    mutable std::mutex rate_mutex_;
    mutable std::deque<std::chrono::steady_clock::time_point> sent_;
};

} // namespace cai::llm
