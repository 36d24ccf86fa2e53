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
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "cai/commitment.hpp"
#include "cai/grammar.hpp"
#include "cai/text.hpp"

namespace cai::extract {

namespace detail {

struct Anchor {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool net_zero = false;
    std::string percent;
};

inline const grammar::Mention* last_in(const std::vector<grammar::Mention>& ms, std::size_t lo,
                                       std::size_t hi) {
    const grammar::Mention* best = nullptr;
    for (const auto& m : ms) {
        if (m.begin >= lo && m.end <= hi) best = &m;
    }
    return best;
}

inline const grammar::Mention* first_in(const std::vector<grammar::Mention>& ms, std::size_t lo,
                                        std::size_t hi) {
    for (const auto& m : ms) {
        if (m.begin >= lo && m.end <= hi) return &m;
    }
    return nullptr;
}

inline std::string entity_of(std::string_view sentence) {
    static const std::regex kSubject(
        R"(^([A-Z][A-Za-z0-9&'\-]*(?: [A-Z][A-Za-z0-9&'\-]*)*) (?:plans|will|commits|aims|has|is|targets|intends|pledges|pledged|committed|sets|set)\b)");
    static const std::vector<std::string> kFirstPerson{"We", "Our", "The", "This", "These",
                                                       "It", "In", "By", "As"};
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(sentence.begin(), sentence.end(), m, kSubject)) {
        return std::string(kNoAnswer);
    }
    const std::string subject = m[1].str();
    const auto first = subject.substr(0, subject.find(' '));
    if (std::find(kFirstPerson.begin(), kFirstPerson.end(), first) != kFirstPerson.end()) {
        return std::string(kNoAnswer);
    }
    return subject;
}

inline std::string wording_for(std::string_view type) {
    if (type == "net zero") return "Net Zero emissions";
    if (type == "absolute") return "absolute emissions reduction";
    if (type == "intensity") return "emissions intensity reduction";
    return "emissions reduction";
}

inline std::vector<RawCommitment> extract_sentence(std::string_view sentence) {
    const std::string low = text::lower(sentence);
    const auto percents = grammar::percent_mentions(low);
    const auto net_zeros = grammar::net_zero_mentions(low);
    const auto targets = grammar::target_year_mentions(low);
    const auto bases = grammar::base_year_mentions(low);
    const auto scopes = grammar::scope_mentions(low);
    const auto types = grammar::reduction_type_mentions(low);

    std::vector<Anchor> anchors;
    if (grammar::has_reduction_verb(low)) {
        for (const auto& p : percents) anchors.push_back({p.begin, p.end, false, p.value});
    }
    // A net-zero phrase anchors its own record unless a percent sits between
    // it and its target year.
    for (const auto& nz : net_zeros) {
        const auto* ty = first_in(targets, nz.end, low.size());
        if (ty == nullptr) continue;
        const bool percent_between = first_in(percents, nz.end, ty->begin) != nullptr;
        if (!percent_between) anchors.push_back({nz.begin, nz.end, true, {}});
    }
    std::sort(anchors.begin(), anchors.end(),
              [](const Anchor& a, const Anchor& b) { return a.begin < b.begin; });

    std::vector<RawCommitment> out;
    const std::string entity = entity_of(sentence);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const auto& a = anchors[i];
        const std::size_t seg_lo = i == 0 ? 0 : anchors[i - 1].end;
        const std::size_t seg_hi = i + 1 == anchors.size() ? low.size() : anchors[i + 1].begin;

        RawCommitment r;
        const auto* ty = first_in(targets, a.end, low.size());
        if (ty == nullptr) ty = last_in(targets, 0, a.begin);
        if (ty == nullptr) continue;
        r.target_year = ty->value;

        const auto* by = first_in(bases, a.end, low.size());
        if (by == nullptr && !a.net_zero) by = last_in(bases, 0, a.begin);
        if (by != nullptr) r.base_year = by->value;

        const auto* sc = last_in(scopes, seg_lo, a.begin);
        if (sc == nullptr) sc = first_in(scopes, a.end, seg_hi);
        if (sc != nullptr) r.scope = sc->value;

        if (a.net_zero) {
            r.target_type = "net zero";
        } else {
            r.target_percent = a.percent + "%";
            const auto* tt = last_in(types, 0, a.begin);
            if (tt == nullptr) tt = first_in(types, a.end, seg_hi);
            if (tt != nullptr) r.target_type = tt->value;
        }
        r.target_wording = wording_for(r.target_type);
        r.sub_context = std::string(sentence);
        r.entity_name = entity;
        out.push_back(std::move(r));
    }
    return out;
}

/// Collapses immediately repeated word runs of at least `min_run` words.
/// Neighbor-padded contexts repeat each chunk overlap at the join points;
/// reading through the repeat restores the original word sequence.
inline std::string collapse_repeats(const std::string& cleaned, std::size_t min_run = 4) {
    const auto words = text::split_words(cleaned);
    std::vector<std::string> out;
    out.reserve(words.size());
    std::size_t i = 0;
    while (i < words.size()) {
        std::size_t skip = 0;
        for (std::size_t len = (words.size() - i) / 2; len >= min_run; --len) {
            if (std::equal(words.begin() + i, words.begin() + i + len, words.begin() + i + len)) {
                skip = len;
                break;
            }
        }
        if (skip > 0) {
            i += skip;
            continue;
        }
        out.push_back(words[i++]);
    }
    return text::join(out, " ");
}

} // namespace detail

/// Regex-grammar extraction over formulaic commitment sentences such as
/// "We plan to reduce absolute emissions for scope 1 and 2 by 50% by 2030 from
/// base year 2019". Each percent (in a sentence with a reduction verb) or
/// net-zero phrase yields one record; trailing target and base years are
/// shared across "and"-joined clauses. Repeated word runs are read once. When
/// the text holds several sentences, a leading fragment (not starting with a
/// capital letter) and an unterminated trailing fragment are ignored.
/// Anything outside the grammar yields nothing.
inline std::vector<RawCommitment> pattern_extract(std::string_view input) {
    const std::string cleaned = detail::collapse_repeats(text::clean(input));
    auto spans = grammar::sentences(cleaned);
    if (spans.size() > 1) {
        const char first = cleaned[spans.front().begin];
        if (!(first >= 'A' && first <= 'Z')) spans.erase(spans.begin());
    }
    if (spans.size() > 1 && !spans.back().terminated) spans.pop_back();

    std::vector<RawCommitment> out;
    for (const auto& s : spans) {
        auto recs = detail::extract_sentence(
            std::string_view(cleaned).substr(s.begin, s.end - s.begin));
        for (auto& r : recs) out.push_back(std::move(r));
    }
    return out;
}

} // namespace cai::extract
