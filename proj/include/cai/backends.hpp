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

// Builds the configured backends. Includes the HTTP backends, so users of
// this header need cpp-httplib (and OpenSSL for https endpoints).

#include <chrono>
#include <memory>

#include "cai/config.hpp"
#include "cai/corpus.hpp"
#include "cai/embedding.hpp"
#include "cai/llm.hpp"
#include "cai/pipeline.hpp"
#include "cai/relevance.hpp"
#include "cai/remote.hpp"

namespace cai {

/// Owns one instance of each backend plus the shared LLM client.
struct BackendSet {
    std::unique_ptr<corpus::TextConverter> converter;
    std::unique_ptr<relevance::RelevanceBackend> relevance;
    std::unique_ptr<embedding::EmbeddingBackend> embedder;
    std::unique_ptr<llm::LlmBackend> llm_backend;
    std::unique_ptr<llm::LlmClient> llm;

    pipeline::Backends view() const { return {*converter, *relevance, *embedder, *llm}; }
};

inline llm::RetryPolicy retry_policy(const config::PipelineConfig& cfg) {
    return {cfg.llm_max_attempts, std::chrono::milliseconds(cfg.llm_retry_base_ms)};
}

/// Remote endpoints and tokens come from the environment only.
inline BackendSet make_backends(const config::PipelineConfig& cfg) {
    BackendSet b;
    const std::chrono::seconds timeout(cfg.http_timeout_s);
    b.converter = std::make_unique<corpus::DefaultConverter>(cfg.ingest_pdf_command);

    if (cfg.relevance_backend == "remote") {
        b.relevance = std::make_unique<remote::RemoteRelevanceBackend>(
            remote::endpoint_from_env("CAI_RELEVANCE_URL", "CAI_RELEVANCE_TOKEN", timeout),
            cfg.relevance_threshold, cfg.relevance_batch_size, cfg.relevance_max_in_flight,
            retry_policy(cfg));
    } else {
        relevance::LexicalVocabulary vocab;
        vocab.threshold = cfg.relevance_lexical_threshold;
        b.relevance = std::make_unique<relevance::LexicalBackend>(vocab);
    }

    if (cfg.embedding_backend == "remote") {
        b.embedder = std::make_unique<remote::RemoteEmbeddingBackend>(
            remote::endpoint_from_env("CAI_EMBED_URL", "CAI_EMBED_TOKEN", timeout),
            cfg.embedding_dimension, cfg.embedding_max_in_flight, retry_policy(cfg));
    } else {
        b.embedder = std::make_unique<embedding::HashedBagOfWords>(cfg.embedding_dimension);
    }

    if (cfg.llm_backend == "remote") {
        b.llm_backend = std::make_unique<remote::RemoteLlmBackend>(
            remote::endpoint_from_env("CAI_LLM_URL", "CAI_LLM_TOKEN", timeout),
            cfg.llm_max_concurrency);
    } else {
        b.llm_backend = std::make_unique<llm::MockLlmBackend>();
    }
    llm::ClientOptions opts;
    opts.retry = retry_policy(cfg);
    opts.max_concurrency = cfg.llm_max_concurrency;
    opts.requests_per_minute = cfg.llm_requests_per_minute;
    opts.max_input_tokens = cfg.llm_max_input_tokens;
    b.llm = std::make_unique<llm::LlmClient>(*b.llm_backend, opts);
    return b;
}

} // namespace cai
