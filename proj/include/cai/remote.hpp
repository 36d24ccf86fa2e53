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

// HTTP backends for relevance scoring, embeddings and completion. Define
// CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL) to enable https:// endpoints.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "cai/embedding.hpp"
#include "cai/error.hpp"
#include "cai/llm.hpp"
#include "cai/relevance.hpp"

namespace cai::remote {

struct Endpoint {
    std::string url;    // e.g. https://models.example.com:8443/v1/score
    std::string token;  // bearer token, may be empty
    std::chrono::seconds timeout{60};
};

/// Reads `<url_var>` (required) and `<token_var>` (optional) from the
/// environment.
inline Endpoint endpoint_from_env(const char* url_var, const char* token_var,
                                  std::chrono::seconds timeout = std::chrono::seconds(60)) {
    const char* url = std::getenv(url_var);
    if (url == nullptr || *url == '\0') {
        throw ConfigError(std::string("remote backend selected but ") + url_var + " is not set");
    }
    const char* token = std::getenv(token_var);
    return {url, token ? token : "", timeout};
}

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

/// POSTs JSON bodies to one endpoint, at most `max_in_flight` at a time, and
/// maps HTTP failures onto the backend error types: 401/403 are auth errors,
/// 413 or a 400 mentioning tokens is a token-limit error, 408/429/5xx and
/// connection failures are transient.
class JsonEndpoint {
public:
    JsonEndpoint(Endpoint ep, std::size_t max_in_flight)
        : ep_(std::move(ep)),
          split_(split_url(ep_.url)),
          slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, max_in_flight))) {}

    nlohmann::json post(const nlohmann::json& body) const {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{slots_};

        httplib::Client client(split_.origin);
        client.set_connection_timeout(ep_.timeout);
        client.set_read_timeout(ep_.timeout);
        client.set_write_timeout(ep_.timeout);
        httplib::Headers headers;
        if (!ep_.token.empty()) headers.emplace("Authorization", "Bearer " + ep_.token);

        auto res = client.Post(split_.path, headers, body.dump(), "application/json");
        if (!res) {
            throw llm::TransientError(ep_.url + ": " + httplib::to_string(res.error()));
        }
        const int status = res->status;
        const std::string where = ep_.url + ": HTTP " + std::to_string(status);
        if (status == 401 || status == 403) throw llm::AuthError(where);
        if (status == 413 || (status == 400 && text::lower(res->body).find("token") != std::string::npos)) {
            throw llm::TokenLimitError(where + " " + res->body);
        }
        if (status == 408 || status == 429 || status >= 500) throw llm::TransientError(where);
        if (status < 200 || status >= 300) throw BackendError(where + " " + res->body);
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw BackendError(ep_.url + ": malformed JSON response: " + e.what());
        }
    }

    const Endpoint& endpoint() const noexcept { return ep_; }

private:
    Endpoint ep_;
    SplitUrl split_;
    mutable std::counting_semaphore<> slots_;
};

/// Retries transient failures with exponential backoff; other errors pass
/// through unchanged.
inline nlohmann::json post_with_retry(const JsonEndpoint& ep, const nlohmann::json& body,
                                      const llm::RetryPolicy& policy) {
    auto delay = policy.base_delay;
    for (int attempt = 1;; ++attempt) {
        try {
            return ep.post(body);
        } catch (const llm::TransientError& e) {
            if (attempt >= policy.max_attempts) {
                throw BackendError(std::string(e.what()) + " (after " + std::to_string(attempt) +
                                   " attempts)");
            }
        }
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

/// `{"contexts": [...]}` -> `{"scores": [...]}`, sent in batches.
class RemoteRelevanceBackend final : public relevance::RelevanceBackend {
public:
    RemoteRelevanceBackend(Endpoint ep, double threshold, std::size_t batch_size,
                           std::size_t max_in_flight, llm::RetryPolicy retry = {})
        : ep_(std::move(ep), max_in_flight),
          threshold_(threshold),
          batch_(std::max<std::size_t>(1, batch_size)),
          retry_(retry) {}

    std::vector<double> score(std::span<const std::string> texts) const override {
        std::vector<double> out;
        out.reserve(texts.size());
        for (std::size_t i = 0; i < texts.size(); i += batch_) {
            const auto n = std::min(batch_, texts.size() - i);
            nlohmann::json body{{"contexts", std::vector<std::string>(texts.begin() + i,
                                                                      texts.begin() + i + n)}};
            const auto resp = post_with_retry(ep_, body, retry_);
            if (!resp.contains("scores") || !resp["scores"].is_array() || resp["scores"].size() != n) {
                throw BackendError(ep_.endpoint().url + ": response lacks " + std::to_string(n) +
                                   " scores");
            }
            for (const auto& s : resp["scores"]) {
                if (!s.is_number()) throw BackendError(ep_.endpoint().url + ": non-numeric score");
                out.push_back(s.get<double>());
            }
        }
        return out;
    }

    double threshold() const override { return threshold_; }

private:
    JsonEndpoint ep_;
    double threshold_;
    std::size_t batch_;
    llm::RetryPolicy retry_;
};

/// `{"texts": [...]}` -> `{"vectors": [[...], ...]}`. Vectors are checked
/// against the configured dimension and L2-normalized; empty texts are not
/// sent and map to the zero vector.
class RemoteEmbeddingBackend final : public embedding::EmbeddingBackend {
public:
    RemoteEmbeddingBackend(Endpoint ep, std::size_t dimension, std::size_t max_in_flight,
                           llm::RetryPolicy retry = {})
        : ep_(std::move(ep), max_in_flight), dim_(dimension), retry_(retry) {}

    std::size_t dimension() const override { return dim_; }

    std::vector<embedding::EmbeddingVector> embed_batch(
        std::span<const std::string> texts) const override {
        std::vector<embedding::EmbeddingVector> out(
            texts.size(), embedding::EmbeddingVector{std::vector<double>(dim_, 0.0)});
        std::vector<std::string> send;
        std::vector<std::size_t> where;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (text::trim(texts[i]).empty()) continue;
            send.push_back(texts[i]);
            where.push_back(i);
        }
        if (send.empty()) return out;
        const auto resp = post_with_retry(ep_, nlohmann::json{{"texts", send}}, retry_);
        if (!resp.contains("vectors") || !resp["vectors"].is_array() ||
            resp["vectors"].size() != send.size()) {
            throw BackendError(ep_.endpoint().url + ": response lacks " +
                               std::to_string(send.size()) + " vectors");
        }
        for (std::size_t k = 0; k < send.size(); ++k) {
            const auto& v = resp["vectors"][k];
            if (!v.is_array() || v.size() != dim_) {
                throw BackendError(ep_.endpoint().url + ": vector dimension " +
                                   std::to_string(v.is_array() ? v.size() : 0) + " != " +
                                   std::to_string(dim_));
            }
            auto& dst = out[where[k]];
            for (std::size_t d = 0; d < dim_; ++d) dst.values[d] = v[d].get<double>();
            embedding::normalize(dst);
        }
        return out;
    }

private:
    JsonEndpoint ep_;
    std::size_t dim_;
    llm::RetryPolicy retry_;
};

/// `{"prompt", "temperature", "top_p", "top_k", "max_tokens", "seed"?}` ->
/// `{"text"}`. Retries belong to the caller (llm::call_llm).
class RemoteLlmBackend final : public llm::LlmBackend {
public:
    RemoteLlmBackend(Endpoint ep, std::size_t max_in_flight) : ep_(std::move(ep), max_in_flight) {}

    llm::LlmResponse complete(const llm::LlmRequest& req) const override {
        nlohmann::json body{{"prompt", req.prompt},
                            {"temperature", req.temperature},
                            {"top_p", req.top_p},
                            {"top_k", req.top_k},
                            {"max_tokens", req.max_output_tokens}};
        if (req.seed) body["seed"] = *req.seed;
        const auto resp = ep_.post(body);
        if (!resp.contains("text") || !resp["text"].is_string()) {
            throw BackendError(ep_.endpoint().url + ": response lacks a \"text\" string");
        }
        return {resp["text"].get<std::string>()};
    }

private:
    JsonEndpoint ep_;
};

} // namespace cai::remote
