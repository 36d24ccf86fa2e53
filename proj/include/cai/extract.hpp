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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cai/commitment.hpp"
#include "cai/embedding.hpp"
#include "cai/llm.hpp"
#include "cai/prompt.hpp"
#include "cai/relevance.hpp"

namespace cai::extract {

enum class Boundary { corporate_wide, non_corporate_wide };

inline std::string_view to_string(Boundary b) noexcept {
    return b == Boundary::corporate_wide ? "corporate_wide" : "non_corporate_wide";
}

inline Boundary parse_boundary(std::string_view s) {
    if (s == "corporate_wide") return Boundary::corporate_wide;
    if (s == "non_corporate_wide") return Boundary::non_corporate_wide;
    throw ConfigError("unknown boundary '" + std::string(s) + "'");
}

struct SamplingParams {
    double temperature = 0.0;
    double top_p = 0.0;
    int top_k = 1;
    int max_output_tokens = 1024;
    std::optional<std::int64_t> seed;

    llm::LlmRequest request(std::string prompt) const {
        return {std::move(prompt), temperature, top_p, top_k, max_output_tokens, seed};
    }
};

inline bool classify_entity_match(std::string_view entity_name, std::string_view company_name,
                                  const llm::LlmClient& client, const SamplingParams& params = {},
                                  std::string_view provenance = {}) {
    if (company_name.empty()) throw ContractError("entity match: company name is empty");
    const auto resp = client.call(params.request(build_entity_prompt(entity_name, company_name)),
                                  provenance);
    const auto answer = text::lower(text::trim(resp.text));
    if (answer.rfind("yes", 0) == 0 || answer == "true") return true;
    if (answer.rfind("no", 0) == 0 || answer == "false") return false;
    throw ExtractionError(std::string(provenance) + " entity match: unexpected answer '" +
                          resp.text + "'");
}

inline Boundary classify_boundary(std::string_view target_wording, std::string_view sub_context,
                                  const llm::LlmClient& client, const SamplingParams& params = {},
                                  std::string_view provenance = {}) {
    const auto resp = client.call(
        params.request(build_boundary_prompt(target_wording, sub_context)), provenance);
    const auto answer = text::lower(text::trim(resp.text));
    if (answer.find("non_corporate_wide") != std::string::npos ||
        answer.find("non-corporate") != std::string::npos) {
        return Boundary::non_corporate_wide;
    }
    if (answer.find("corporate_wide") != std::string::npos ||
        answer.find("corporate-wide") != std::string::npos) {
        return Boundary::corporate_wide;
    }
    throw ExtractionError(std::string(provenance) + " boundary: unexpected answer '" + resp.text +
                          "'");
}

struct ExtractedRecord {
    RawCommitment raw;
    bool entity_match = true;
    Boundary boundary = Boundary::corporate_wide;
};

struct ContextExtraction {
    std::string doc_id;
    std::size_t chunk_index = 0;
    std::string context;
    std::string response;
    std::vector<ExtractedRecord> records;
    std::optional<std::string> parse_error;
};

struct ExtractorSettings {
    std::size_t k_shots = 6;
    SamplingParams sampling;
};

/// Dynamic k-shot prompt, model call, output parsing, then the entity and
/// boundary prompts once per parsed record. A record without an entity name
/// is a first-person disclosure by the reporting company and counts as a
/// match. Unparseable output is reported in `parse_error` instead of thrown.
inline ContextExtraction extract_context(const relevance::EnrichedContext& ctx,
                                         std::string_view company_name,
                                         const std::vector<GoldenExample>& store,
                                         const embedding::EmbeddingBackend& embedder,
                                         const llm::LlmClient& client,
                                         const ExtractorSettings& settings) {
    const std::string provenance = ctx.doc_id + "#" + std::to_string(ctx.center_index);
    ContextExtraction out;
    out.doc_id = ctx.doc_id;
    out.chunk_index = ctx.center_index;
    out.context = ctx.text;

    PromptSpec spec;
    if (settings.k_shots > 0) spec.examples = select_examples(ctx.text, store, settings.k_shots, embedder);
    spec.input_context = ctx.text;
    out.response = client.call(settings.sampling.request(build_prompt(spec)), provenance).text;

    std::vector<RawCommitment> raws;
    try {
        raws = parse_output(out.response);
    } catch (const ParseError& e) {
        out.parse_error = e.what();
        return out;
    }
    for (auto& raw : raws) {
        ExtractedRecord rec;
        if (raw.entity_name != kNoAnswer && !text::trim(raw.entity_name).empty()) {
            rec.entity_match = classify_entity_match(raw.entity_name, company_name, client,
                                                     settings.sampling, provenance);
        }
        const std::string wording = raw.target_wording == kNoAnswer ? "" : raw.target_wording;
        const std::string sub = raw.sub_context == kNoAnswer ? "" : raw.sub_context;
        rec.boundary = classify_boundary(wording, sub, client, settings.sampling, provenance);
        rec.raw = std::move(raw);
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace cai::extract
