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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cai/commitment.hpp"
#include "cai/embedding.hpp"
#include "cai/error.hpp"
#include "cai/text.hpp"

namespace cai::extract {

struct GoldenExample {
    std::string context;
    std::string sub_context;
    std::vector<RawCommitment> expected;
    embedding::EmbeddingVector sub_context_embedding;
};

/// Parses one store line `{"context", "sub_context", "expected": [...]}`.
/// Text is whitespace-normalized; the embedding is left empty.
inline GoldenExample example_from_json(const nlohmann::json& j) {
    GoldenExample ex;
    ex.context = text::clean(j.at("context").get<std::string>());
    ex.sub_context = text::clean(j.at("sub_context").get<std::string>());
    for (const auto& r : j.at("expected")) ex.expected.push_back(raw_from_json(r));
    if (ex.expected.empty()) throw ConfigError("golden example has no expected commitments");
    if (text::lower(ex.context).find(text::lower(ex.sub_context)) == std::string::npos) {
        throw ConfigError("golden example sub_context is not part of its context: '" +
                          ex.sub_context + "'");
    }
    return ex;
}

inline nlohmann::ordered_json example_to_json(const GoldenExample& ex) {
    nlohmann::ordered_json j;
    j["context"] = ex.context;
    j["sub_context"] = ex.sub_context;
    j["expected"] = nlohmann::ordered_json::array();
    for (const auto& r : ex.expected) j["expected"].push_back(to_json(r));
    return j;
}

inline void embed_examples(std::vector<GoldenExample>& store,
                           const embedding::EmbeddingBackend& backend) {
    std::vector<std::string> subs;
    subs.reserve(store.size());
    for (const auto& ex : store) subs.push_back(ex.sub_context);
    auto vecs = backend.embed_batch(subs);
    if (vecs.size() != store.size()) throw BackendError("embedding batch size mismatch");
    for (std::size_t i = 0; i < store.size(); ++i) store[i].sub_context_embedding = std::move(vecs[i]);
}

/// Loads a JSON-lines example store and embeds every sub_context.
inline std::vector<GoldenExample> load_example_store(const std::filesystem::path& path,
                                                     const embedding::EmbeddingBackend& backend) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open example store '" + path.string() + "'");
    std::vector<GoldenExample> store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            store.push_back(example_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    embed_examples(store, backend);
    return store;
}

/// The k store entries whose sub_context is most similar to `context`,
/// most similar first; equal scores keep store order. k larger than the store
/// returns the whole store.
inline std::vector<GoldenExample> select_examples(const std::string& context,
                                                  const std::vector<GoldenExample>& store,
                                                  std::size_t k,
                                                  const embedding::EmbeddingBackend& backend) {
    if (store.empty()) throw ConfigError("example store is empty");
    if (k < 1) throw ConfigError("k-shot count must be at least 1");
    const auto query = backend.embed(context);
    std::vector<double> sims(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        sims[i] = embedding::cosine(query, store[i].sub_context_embedding);
    }
    std::vector<std::size_t> order(store.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
    order.resize(std::min(k, order.size()));
    std::vector<GoldenExample> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(store[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Prompt rendering
// ---------------------------------------------------------------------------

inline constexpr std::string_view kExtractionInstruction =
    "Extract every corporate carbon emission reduction commitment stated in the input text. "
    "Use only information contained in the input text and ignore any other knowledge. "
    "Respond with a JSON array of objects that follows the output schema exactly.";

inline constexpr std::string_view kNoAnswerRule =
    "If an attribute cannot be extracted from the input, return \"NO_ANSWER\" for that "
    "attribute.";

inline constexpr std::string_view kSchemaBlock =
    "Output schema: a JSON array of objects with exactly these keys:\n"
    "- target_year: the year by which the target is to be met\n"
    "- base_year: the baseline year the reduction is measured against\n"
    "- target_percent: the reduction percentage, for example \"30%\"\n"
    "- target_type: one of \"absolute\", \"intensity\" or \"net zero\"\n"
    "- scope: the emission scopes covered as digits, for example \"12\" for scope 1 and 2\n"
    "- target_wording: a short label for the commitment, for example \"Net Zero emissions\"\n"
    "- sub_context: the exact sentence from the input that states the commitment\n"
    "- entity_name: the company or entity making the commitment\n";

inline constexpr std::string_view kEmptyRule = "If the input states no commitment, return [].";

inline constexpr std::string_view kInputMarker = "Input: ";
inline constexpr std::string_view kOutputMarker = "Output:";

struct PromptSpec {
    std::string instruction{kExtractionInstruction};
    std::string schema_block{std::string(kSchemaBlock) + std::string(kNoAnswerRule) + "\n" +
                             std::string(kEmptyRule)};
    std::vector<GoldenExample> examples;
    std::string input_context;
};

/// Instruction, schema, the examples as input/output pairs, then the input.
/// Byte-identical for identical specs.
inline std::string build_prompt(const PromptSpec& spec) {
    std::string p;
    p += spec.instruction;
    p += "\n\n";
    p += spec.schema_block;
    p += "\n\n";
    for (std::size_t i = 0; i < spec.examples.size(); ++i) {
        const auto& ex = spec.examples[i];
        p += "Example " + std::to_string(i + 1) + ":\n";
        p += kInputMarker;
        p += ex.context;
        p += "\n";
        p += kOutputMarker;
        p += " ";
        p += serialize(ex.expected);
        p += "\n\n";
    }
    p += kInputMarker;
    p += spec.input_context;
    p += "\n";
    p += kOutputMarker;
    return p;
}

/// Text following the last "Input: " marker, up to the next "Output:".
inline std::string input_section(std::string_view prompt) {
    const auto pos = prompt.rfind(std::string("\n") + std::string(kInputMarker));
    std::size_t start = 0;
    if (pos != std::string_view::npos) {
        start = pos + 1 + kInputMarker.size();
    } else if (prompt.substr(0, kInputMarker.size()) == kInputMarker) {
        start = kInputMarker.size();
    } else {
        return std::string(prompt);
    }
    auto end = prompt.find(std::string("\n") + std::string(kOutputMarker), start);
    if (end == std::string_view::npos) end = prompt.size();
    return std::string(prompt.substr(start, end - start));
}

// Auxiliary classification prompts ---------------------------------------------

inline constexpr std::string_view kEntityInstruction =
    "Decide whether the entity name refers to the same company as the company name. "
    "Answer yes or no.";

inline constexpr std::string_view kBoundaryInstruction =
    "Decide whether the commitment covers the whole corporation or only part of it, such as "
    "a subsidiary, division, country, region or facility. Answer corporate_wide or "
    "non_corporate_wide.";

inline std::string build_entity_prompt(std::string_view entity_name, std::string_view company_name) {
    std::string p(kEntityInstruction);
    p += "\n\nEntity name: Acme Corp\nCompany name: Acme Corporation\nAnswer: yes\n";
    p += "\nEntity name: Globex Europe\nCompany name: Initech Group\nAnswer: no\n";
    p += "\nEntity name: ";
    p += entity_name;
    p += "\nCompany name: ";
    p += company_name;
    p += "\nAnswer:";
    return p;
}

inline std::string build_boundary_prompt(std::string_view target_wording,
                                         std::string_view sub_context) {
    std::string p(kBoundaryInstruction);
    p += "\n\nTarget wording: Net Zero emissions\nSub-context: We aim to reach net zero "
         "emissions across all our operations by 2050.\nAnswer: corporate_wide\n";
    p += "\nTarget wording: absolute emissions reduction\nSub-context: Our German subsidiary "
         "will cut emissions by 40% by 2030.\nAnswer: non_corporate_wide\n";
    p += "\nTarget wording: ";
    p += target_wording;
    p += "\nSub-context: ";
    p += sub_context;
    p += "\nAnswer:";
    return p;
}

/// Value of the last "<label>: " line in a prompt.
inline std::string last_labeled(std::string_view prompt, std::string_view label) {
    const std::string key = "\n" + std::string(label) + ": ";
    const auto pos = prompt.rfind(key);
    if (pos == std::string_view::npos) return {};
    const auto start = pos + key.size();
    auto end = prompt.find('\n', start);
    if (end == std::string_view::npos) end = prompt.size();
    return std::string(prompt.substr(start, end - start));
}

} // namespace cai::extract
