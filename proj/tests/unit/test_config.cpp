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

#include <catch_amalgamated.hpp>

#include "cai/config.hpp"
#include "test_support.hpp"

using namespace cai;
using namespace cai::config;
using cai::testing::TempDir;
using cai::testing::write_file;

TEST_CASE("config defaults") {
    const PipelineConfig c;
    CHECK(c.chunk_window_words == 80);
    CHECK(c.chunk_overlap_words == 20);
    CHECK(c.relevance_backend == "lexical");
    CHECK(c.relevance_threshold == 0.5);
    CHECK(c.embedding_backend == "baseline");
    CHECK(c.embedding_dimension == 1024);
    CHECK(c.llm_backend == "mock");
    CHECK(c.llm_temperature == 0.0);
    CHECK(c.llm_top_p == 0.0);
    CHECK(c.llm_top_k == 1);
    CHECK_FALSE(c.llm_seed);
    CHECK(c.llm_max_input_tokens == 8192);
    CHECK(c.llm_max_output_tokens == 1024);
    CHECK(c.prompt_k_shots == 6);
    CHECK(c.dedup_threshold == 0.95);
    CHECK(c.rules_fy_pivot == 49);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("dotted and nested keys are equivalent") {
    PipelineConfig dotted, nested;
    apply_json(dotted, nlohmann::json::parse(
                           R"({"llm.top_k": 3, "chunk.window_words": 100, "llm.seed": 42, "paths.output": "x"})"));
    apply_json(nested, nlohmann::json::parse(
                           R"({"llm": {"top_k": 3, "seed": 42}, "chunk": {"window_words": 100}, "paths": {"output": "x"}})"));
    CHECK(to_json(dotted) == to_json(nested));
    CHECK(dotted.llm_top_k == 3);
    CHECK(dotted.llm_seed == 42);
    CHECK(dotted.chunk_window_words == 100);
    CHECK(dotted.under_output("records.jsonl") == std::filesystem::path("x") / "records.jsonl");
    CHECK(dotted.under_output("/abs/debug.jsonl") == std::filesystem::path("/abs/debug.jsonl"));

    PipelineConfig nulled = dotted;
    set_value(nulled, "llm.seed", nullptr);
    CHECK_FALSE(nulled.llm_seed);
}

TEST_CASE("every serialized key can be set back") {
    PipelineConfig c;
    c.llm_seed = 7;
    const auto j = to_json(c);
    PipelineConfig back;
    apply_json(back, nlohmann::json(j));
    CHECK(to_json(back) == j);
    CHECK(j.size() == detail::setters().size());
}

TEST_CASE("unknown keys and bad values are configuration errors") {
    PipelineConfig c;
    CHECK_THROWS_AS(set_value(c, "llm.topk", 1), ConfigError);
    CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"chunk": {"size": 1}})")), ConfigError);
    CHECK_THROWS_AS(set_value(c, "llm.top_k", "three"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, nlohmann::json::array()), ConfigError);
}

TEST_CASE("validation rejects out-of-range settings") {
    auto bad = [](auto mutate) {
        PipelineConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](auto& c) { c.chunk_overlap_words = 80; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.chunk_overlap_words = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.relevance_threshold = 1.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.dedup_threshold = -0.1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.llm_backend = "gpt"; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.relevance_backend = "bert"; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.embedding_backend = "x"; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.llm_top_k = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.rules_fy_pivot = 100; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.workers = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.bench_k_max = 0; }).validate(), ConfigError);
    CHECK_NOTHROW(bad([](auto& c) { c.relevance_threshold = 1.0; }).validate());
    try {
        bad([](auto& c) { c.dedup_threshold = 2.0; }).validate();
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("dedup.threshold") != std::string::npos);
    }
}

TEST_CASE("load_config reads and validates a file") {
    TempDir dir;
    const auto good = dir.path() / "good.json";
    write_file(good, R"({"prompt": {"k_shots": 4}, "dedup.threshold": 0.9})");
    const auto c = load_config(good);
    CHECK(c.prompt_k_shots == 4);
    CHECK(c.dedup_threshold == 0.9);

    const auto invalid = dir.path() / "invalid.json";
    write_file(invalid, R"({"dedup.threshold": 3})");
    CHECK_THROWS_AS(load_config(invalid), ConfigError);

    const auto broken = dir.path() / "broken.json";
    write_file(broken, "{not json");
    CHECK_THROWS_AS(load_config(broken), ConfigError);
    CHECK_THROWS_AS(load_config(dir.path() / "missing.json"), ConfigError);
}
