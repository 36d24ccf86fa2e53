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

#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cai/corpus.hpp"
#include "cai/error.hpp"
#include "cai/text.hpp"

namespace cai::relevance {

enum class Label { relevant, irrelevant };

inline std::string_view to_string(Label l) noexcept {
    return l == Label::relevant ? "relevant" : "irrelevant";
}

struct RelevanceResult {
    std::string doc_id;
    std::size_t index = 0;
    double score = 0.0;
    Label label = Label::irrelevant;
};

struct EnrichedContext {
    corpus::Chunk center;
    std::string text;
    std::string doc_id;
    std::size_t center_index = 0;
};

/// Scores chunk texts in [0,1]; a chunk is relevant when score >= threshold().
class RelevanceBackend {
public:
    virtual ~RelevanceBackend() = default;
    virtual std::vector<double> score(std::span<const std::string> texts) const = 0;
    virtual double threshold() const = 0;
};

/// Vocabulary for the lexical baseline. Terms are matched against lowercase
/// alphanumeric tokens; a term ending in '*' matches any token with that
/// prefix, and multi-word terms match consecutive tokens.
struct LexicalVocabulary {
    std::vector<std::string> emission{"emission*", "carbon", "ghg", "co2", "net zero", "scope"};
    std::vector<std::string> commitment{"reduc*", "target*", "commit*", "aim*", "goal*",
                                        "achiev*"};
    // weights in tenths so the sum is exact
    int emission_weight = 4;
    int commitment_weight = 3;
    int quantitative_weight = 3;
    double threshold = 0.7;
};

namespace detail {

inline bool term_matches(const std::vector<std::string>& tokens, std::size_t i,
                         const std::vector<std::string>& term_parts) {
    if (i + term_parts.size() > tokens.size()) return false;
    for (std::size_t k = 0; k < term_parts.size(); ++k) {
        const auto& part = term_parts[k];
        const auto& tok = tokens[i + k];
        if (!part.empty() && part.back() == '*') {
            if (tok.compare(0, part.size() - 1, part, 0, part.size() - 1) != 0) return false;
        } else if (tok != part) {
            return false;
        }
    }
    return true;
}

inline bool any_term(const std::vector<std::string>& tokens, const std::vector<std::string>& terms) {
    for (const auto& term : terms) {
        const auto parts = text::split_words(term);
        if (parts.empty()) continue;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (term_matches(tokens, i, parts)) return true;
        }
    }
    return false;
}

inline bool has_quantity(const std::string& lowered) {
    static const std::regex kPercent(R"((^|[^0-9.])[0-9]+(\.[0-9]+)?\s?(%|percent\b|per cent\b))");
    static const std::regex kYear(R"((^|[^0-9])(19|20|21)[0-9]{2}([^0-9]|$))");
    return std::regex_search(lowered, kPercent) || std::regex_search(lowered, kYear);
}

} // namespace detail

/// Weighted presence of emission vocabulary, commitment vocabulary and a
/// quantity (percent or four-digit year): 0.4 / 0.3 / 0.3 by default.
inline double lexical_score(std::string_view text, const LexicalVocabulary& vocab = {}) {
    const auto tokens = text::alnum_tokens(text);
    if (tokens.empty()) return 0.0;
    int tenths = 0;
    if (detail::any_term(tokens, vocab.emission)) tenths += vocab.emission_weight;
    if (detail::any_term(tokens, vocab.commitment)) tenths += vocab.commitment_weight;
    if (detail::has_quantity(text::lower(text))) tenths += vocab.quantitative_weight;
    return static_cast<double>(tenths) / 10.0;
}

class LexicalBackend final : public RelevanceBackend {
public:
    LexicalBackend() = default;
    explicit LexicalBackend(LexicalVocabulary vocab) : vocab_(std::move(vocab)) {}

    std::vector<double> score(std::span<const std::string> texts) const override {
        std::vector<double> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(lexical_score(t, vocab_));
        return out;
    }

    double threshold() const override { return vocab_.threshold; }

private:
    LexicalVocabulary vocab_;
};

/// One result per chunk, in input order. Any backend failure aborts the whole
/// call; nothing is silently dropped.
inline std::vector<RelevanceResult> classify_chunks(std::span<const corpus::Chunk> chunks,
                                                    const RelevanceBackend& backend) {
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);

    std::vector<double> scores;
    try {
        scores = backend.score(texts);
    } catch (const BackendError& e) {
        std::string refs;
        for (const auto& c : chunks) {
            if (!refs.empty()) refs += ",";
            refs += c.doc_id + "#" + std::to_string(c.index);
        }
        throw BackendError(std::string(e.what()) + " [unclassified: " + refs + "]");
    }
    if (scores.size() != chunks.size()) {
        throw BackendError("relevance backend returned " + std::to_string(scores.size()) +
                           " scores for " + std::to_string(chunks.size()) + " chunks");
    }

    std::vector<RelevanceResult> results;
    results.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const double s = scores[i];
        if (!(s >= 0.0 && s <= 1.0)) {
            throw BackendError("relevance score out of [0,1] for " + chunks[i].doc_id + "#" +
                               std::to_string(chunks[i].index));
        }
        results.push_back({chunks[i].doc_id, chunks[i].index, s,
                           s >= backend.threshold() ? Label::relevant : Label::irrelevant});
    }
    return results;
}

/// Parent document retrieval: the relevant chunk padded with its previous and
/// next chunks, which need not be relevant themselves.
inline EnrichedContext enrich(const RelevanceResult& result, const corpus::ChunkCache& cache) {
    const auto& center = cache.at(result.doc_id, result.index);
    const auto around = corpus::neighbors(cache, result.doc_id, result.index);
    std::vector<std::string_view> parts;
    if (around.previous) parts.push_back(around.previous->text);
    parts.push_back(center.text);
    if (around.next) parts.push_back(around.next->text);
    return EnrichedContext{center, text::join(parts, " "), result.doc_id, result.index};
}

} // namespace cai::relevance
