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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "cai/error.hpp"

namespace cai::config {

/// Every tunable of a pipeline run. Keys in config files use the dotted names
/// shown next to each member.
struct PipelineConfig {
    std::size_t chunk_window_words = 80;    // chunk.window_words
    std::size_t chunk_overlap_words = 20;   // chunk.overlap_words

    std::string relevance_backend = "lexical";  // relevance.backend: lexical | remote
    double relevance_threshold = 0.5;           // relevance.threshold (remote scores)
    double relevance_lexical_threshold = 0.7;   // relevance.lexical_threshold
    std::size_t relevance_batch_size = 32;      // relevance.batch_size
    std::size_t relevance_max_in_flight = 4;    // relevance.max_in_flight

    std::string embedding_backend = "baseline";  // embedding.backend: baseline | remote
    std::size_t embedding_dimension = 1024;      // embedding.dimension
    std::size_t embedding_max_in_flight = 4;     // embedding.max_in_flight

    std::string llm_backend = "mock";  // llm.backend: mock | remote
    double llm_temperature = 0.0;
    double llm_top_p = 0.0;
    int llm_top_k = 1;
    std::optional<std::int64_t> llm_seed;
    std::size_t llm_max_concurrency = 4;
    std::size_t llm_requests_per_minute = 0;  // 0 = unlimited
    std::size_t llm_max_input_tokens = 8192;
    int llm_max_output_tokens = 1024;
    int llm_max_attempts = 3;
    int llm_retry_base_ms = 250;
    int http_timeout_s = 60;  // http.timeout_s, all remote backends

    std::size_t prompt_k_shots = 6;

    double dedup_threshold = 0.95;

    int rules_min_year = 1990;
    int rules_max_year = 2100;
    double rules_max_percent = 100.0;
    int rules_fy_pivot = 49;

    std::string ingest_pdf_command;  // ingest.pdf_command, e.g. "pdftotext {input} -"

    std::string paths_cache = "cache";           // relative to paths.output
    std::string paths_examples;
    std::string paths_golden;
    std::string paths_output = "out";
    std::string paths_debug = "debug.jsonl";      // relative to paths.output
    std::string paths_rejects = "rejects.jsonl";  // relative to paths.output

    std::uint64_t bench_seed = 0;
    std::size_t bench_cv_samples = 6;
    double bench_train_fraction = 0.7;
    std::size_t bench_k_min = 1;
    std::size_t bench_k_max = 10;

    std::size_t workers = 1;  // run.workers

    /// Throws ConfigError naming the first offending key.
    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
        if (chunk_overlap_words == 0 || chunk_overlap_words >= chunk_window_words) {
            fail("chunk.overlap_words must satisfy 0 < overlap < chunk.window_words");
        }
        auto unit = [&](double v, const char* key) {
            if (!(v >= 0.0 && v <= 1.0)) fail(std::string(key) + " must be in [0, 1]");
        };
        unit(relevance_threshold, "relevance.threshold");
        unit(relevance_lexical_threshold, "relevance.lexical_threshold");
        unit(dedup_threshold, "dedup.threshold");
        unit(bench_train_fraction, "bench.train_fraction");
        unit(llm_top_p, "llm.top_p");
        if (relevance_backend != "lexical" && relevance_backend != "remote") {
            fail("relevance.backend must be 'lexical' or 'remote'");
        }
        if (embedding_backend != "baseline" && embedding_backend != "remote") {
            fail("embedding.backend must be 'baseline' or 'remote'");
        }
        if (llm_backend != "mock" && llm_backend != "remote") {
            fail("llm.backend must be 'mock' or 'remote'");
        }
        if (embedding_dimension == 0) fail("embedding.dimension must be positive");
        if (relevance_batch_size == 0) fail("relevance.batch_size must be positive");
        if (llm_temperature < 0.0) fail("llm.temperature must be non-negative");
        if (llm_top_k < 1) fail("llm.top_k must be at least 1");
        if (llm_max_attempts < 1) fail("llm.max_attempts must be at least 1");
        if (llm_max_output_tokens < 1) fail("llm.max_output_tokens must be positive");
        if (rules_min_year > rules_max_year) fail("rules.min_year exceeds rules.max_year");
        if (rules_fy_pivot < 0 || rules_fy_pivot > 99) fail("rules.fy_pivot must be in [0, 99]");
        if (bench_k_min < 1 || bench_k_max < bench_k_min) fail("bench.k_min/k_max range is invalid");
        if (bench_cv_samples == 0) fail("bench.cv_samples must be positive");
        if (workers == 0) fail("run.workers must be positive");
    }

    std::filesystem::path output_dir() const { return paths_output; }

    std::filesystem::path under_output(const std::string& p) const {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : output_dir() / path;
    }
};

namespace detail {

using Setter = std::function<void(PipelineConfig&, const nlohmann::json&)>;

template <typename T>
Setter set(T PipelineConfig::*member) {
    return [member](PipelineConfig& c, const nlohmann::json& v) { c.*member = v.get<T>(); };
}

inline const std::map<std::string, Setter>& setters() {
    using C = PipelineConfig;
    static const std::map<std::string, Setter> kSetters{
        {"chunk.window_words", set(&C::chunk_window_words)},
        {"chunk.overlap_words", set(&C::chunk_overlap_words)},
        {"relevance.backend", set(&C::relevance_backend)},
        {"relevance.threshold", set(&C::relevance_threshold)},
        {"relevance.lexical_threshold", set(&C::relevance_lexical_threshold)},
        {"relevance.batch_size", set(&C::relevance_batch_size)},
        {"relevance.max_in_flight", set(&C::relevance_max_in_flight)},
        {"embedding.backend", set(&C::embedding_backend)},
        {"embedding.dimension", set(&C::embedding_dimension)},
        {"embedding.max_in_flight", set(&C::embedding_max_in_flight)},
        {"llm.backend", set(&C::llm_backend)},
        {"llm.temperature", set(&C::llm_temperature)},
        {"llm.top_p", set(&C::llm_top_p)},
        {"llm.top_k", set(&C::llm_top_k)},
        {"llm.seed",
         [](C& c, const nlohmann::json& v) {
             if (v.is_null()) c.llm_seed.reset();
             else c.llm_seed = v.get<std::int64_t>();
         }},
        {"llm.max_concurrency", set(&C::llm_max_concurrency)},
        {"llm.requests_per_minute", set(&C::llm_requests_per_minute)},
        {"llm.max_input_tokens", set(&C::llm_max_input_tokens)},
        {"llm.max_output_tokens", set(&C::llm_max_output_tokens)},
        {"llm.max_attempts", set(&C::llm_max_attempts)},
        {"llm.retry_base_ms", set(&C::llm_retry_base_ms)},
        {"http.timeout_s", set(&C::http_timeout_s)},
        {"prompt.k_shots", set(&C::prompt_k_shots)},
        {"dedup.threshold", set(&C::dedup_threshold)},
        {"rules.min_year", set(&C::rules_min_year)},
        {"rules.max_year", set(&C::rules_max_year)},
        {"rules.max_percent", set(&C::rules_max_percent)},
        {"rules.fy_pivot", set(&C::rules_fy_pivot)},
        {"ingest.pdf_command", set(&C::ingest_pdf_command)},
        {"paths.cache", set(&C::paths_cache)},
        {"paths.examples", set(&C::paths_examples)},
        {"paths.golden", set(&C::paths_golden)},
        {"paths.output", set(&C::paths_output)},
        {"paths.debug", set(&C::paths_debug)},
        {"paths.rejects", set(&C::paths_rejects)},
        {"bench.seed", set(&C::bench_seed)},
        {"bench.cv_samples", set(&C::bench_cv_samples)},
        {"bench.train_fraction", set(&C::bench_train_fraction)},
        {"bench.k_min", set(&C::bench_k_min)},
        {"bench.k_max", set(&C::bench_k_max)},
        {"run.workers", set(&C::workers)},
    };
    return kSetters;
}

inline void flatten(const nlohmann::json& j, const std::string& prefix,
                    std::map<std::string, nlohmann::json>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) flatten(*it, key, out);
        else out[key] = *it;
    }
}

} // namespace detail

/// Applies a single dotted key. Unknown keys and mistyped values are errors.
inline void set_value(PipelineConfig& cfg, const std::string& key, const nlohmann::json& value) {
    const auto& table = detail::setters();
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    try {
        it->second(cfg, value);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

/// Accepts dotted keys ({"llm.top_k": 1}), nested objects ({"llm": {"top_k": 1}}),
/// or a mix of both.
inline void apply_json(PipelineConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    std::map<std::string, nlohmann::json> flat;
    detail::flatten(j, "", flat);
    for (const auto& [k, v] : flat) set_value(cfg, k, v);
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    PipelineConfig cfg;
    try {
        apply_json(cfg, nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::ordered_json to_json(const PipelineConfig& c) {
    nlohmann::ordered_json j;
    j["chunk.window_words"] = c.chunk_window_words;
    j["chunk.overlap_words"] = c.chunk_overlap_words;
    j["relevance.backend"] = c.relevance_backend;
    j["relevance.threshold"] = c.relevance_threshold;
    j["relevance.lexical_threshold"] = c.relevance_lexical_threshold;
    j["relevance.batch_size"] = c.relevance_batch_size;
    j["relevance.max_in_flight"] = c.relevance_max_in_flight;
    j["embedding.backend"] = c.embedding_backend;
    j["embedding.dimension"] = c.embedding_dimension;
    j["embedding.max_in_flight"] = c.embedding_max_in_flight;
    j["llm.backend"] = c.llm_backend;
    j["llm.temperature"] = c.llm_temperature;
    j["llm.top_p"] = c.llm_top_p;
    j["llm.top_k"] = c.llm_top_k;
    j["llm.seed"] = c.llm_seed ? nlohmann::ordered_json(*c.llm_seed) : nlohmann::ordered_json(nullptr);
    j["llm.max_concurrency"] = c.llm_max_concurrency;
    j["llm.requests_per_minute"] = c.llm_requests_per_minute;
    j["llm.max_input_tokens"] = c.llm_max_input_tokens;
    j["llm.max_output_tokens"] = c.llm_max_output_tokens;
    j["llm.max_attempts"] = c.llm_max_attempts;
    j["llm.retry_base_ms"] = c.llm_retry_base_ms;
    j["http.timeout_s"] = c.http_timeout_s;
    j["prompt.k_shots"] = c.prompt_k_shots;
    j["dedup.threshold"] = c.dedup_threshold;
    j["rules.min_year"] = c.rules_min_year;
    j["rules.max_year"] = c.rules_max_year;
    j["rules.max_percent"] = c.rules_max_percent;
    j["rules.fy_pivot"] = c.rules_fy_pivot;
    j["ingest.pdf_command"] = c.ingest_pdf_command;
    j["paths.cache"] = c.paths_cache;
    j["paths.examples"] = c.paths_examples;
    j["paths.golden"] = c.paths_golden;
    j["paths.output"] = c.paths_output;
    j["paths.debug"] = c.paths_debug;
    j["paths.rejects"] = c.paths_rejects;
    j["bench.seed"] = c.bench_seed;
    j["bench.cv_samples"] = c.bench_cv_samples;
    j["bench.train_fraction"] = c.bench_train_fraction;
    j["bench.k_min"] = c.bench_k_min;
    j["bench.k_max"] = c.bench_k_max;
    j["run.workers"] = c.workers;
    return j;
}

} // namespace cai::config
