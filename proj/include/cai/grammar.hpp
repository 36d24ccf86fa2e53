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

// Lexical grammar for formulaic commitment language: scope phrases, percents,
// target/base year phrases and target-type keywords. All matchers expect
// lowercase input and report byte offsets into it.

#pragma once

#include <algorithm>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "cai/text.hpp"

namespace cai::grammar {

struct Mention {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string value;
};

namespace detail {

template <typename Fn>
std::vector<Mention> scan(const std::string& lowered, const std::regex& re, Fn&& make) {
    std::vector<Mention> out;
    for (auto it = std::sregex_iterator(lowered.begin(), lowered.end(), re);
         it != std::sregex_iterator(); ++it) {
        out.push_back(make(*it));
    }
    return out;
}

inline std::string digits_of(std::string_view s) {
    std::string d;
    for (char c : s) {
        if (c >= '1' && c <= '3' && d.find(c) == std::string::npos) d.push_back(c);
    }
    std::sort(d.begin(), d.end());
    return d;
}

inline Mention whole(const std::smatch& m, std::string value) {
    const auto b = static_cast<std::size_t>(m.position(0));
    return {b, b + static_cast<std::size_t>(m.length(0)), std::move(value)};
}

inline std::string year_value(const std::smatch& m) {
    if (m[1].matched) return "FY" + m[1].str();
    return m[2].str();
}

} // namespace detail

/// Canonical scope codes ("12", "3", "123") for every scope phrase.
inline std::vector<Mention> scope_mentions(const std::string& lowered) {
    static const std::regex kNumbered(
        R"(\bscopes?\s*[123](?![0-9])(?:\s*(?:,\s*and|,|and|&|\+|/)\s*(?:scopes?\s*)?[123](?![0-9]))*)");
    static const std::regex kOwn(R"(\b(?:own|direct) operations\b)");
    static const std::regex kAll(
        R"(\ball (?:three )?scopes\b|\ball (?:ghg |greenhouse gas |carbon )?emissions\b)");
    auto out = detail::scan(lowered, kNumbered, [](const std::smatch& m) {
        return detail::whole(m, detail::digits_of(m.str(0)));
    });
    for (auto& m : detail::scan(lowered, kOwn,
                                [](const std::smatch& x) { return detail::whole(x, "12"); })) {
        out.push_back(std::move(m));
    }
    for (auto& m : detail::scan(lowered, kAll,
                                [](const std::smatch& x) { return detail::whole(x, "123"); })) {
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) { return a.begin < b.begin; });
    return out;
}

/// Numbers written next to %, "percent" or "per cent". Value is the number text.
inline std::vector<Mention> percent_mentions(const std::string& lowered) {
    static const std::regex kPercent(
        R"((?:^|[^0-9.])([0-9]+(?:\.[0-9]+)?)\s?(?:%|percent\b|per cent\b))");
    return detail::scan(lowered, kPercent, [](const std::smatch& m) {
        const auto b = static_cast<std::size_t>(m.position(1));
        const auto e = static_cast<std::size_t>(m.position(0) + m.length(0));
        return Mention{b, e, m[1].str()};
    });
}

/// "by 2030", "by the end of 2030", "by fy30". Value is "2030" or "FY30".
inline std::vector<Mention> target_year_mentions(const std::string& lowered) {
    static const std::regex kTarget(
        R"(\bby\s+(?:the\s+end\s+of\s+)?(?:fy\s?'?([0-9]{2}|[0-9]{4})|([0-9]{4}))(?![0-9]))");
    return detail::scan(lowered, kTarget, [](const std::smatch& m) {
        return detail::whole(m, detail::year_value(m));
    });
}

/// "from 2015", "from base year 2019", "against a 2018 baseline", "from fy20".
inline std::vector<Mention> base_year_mentions(const std::string& lowered) {
    static const std::regex kBase(
        R"(\b(?:from|against|compared\s+(?:to|with)|relative\s+to|versus)\s+(?:(?:a|the|its|our)\s+)?(?:(?:base\s*year|baseline)\s+(?:of\s+)?)?(?:fy\s?'?([0-9]{2}|[0-9]{4})|([0-9]{4}))(?![0-9]))");
    return detail::scan(lowered, kBase, [](const std::smatch& m) {
        return detail::whole(m, detail::year_value(m));
    });
}

/// Reduction-type keywords: "absolute" or "intensity" (incl. per-unit wording).
inline std::vector<Mention> reduction_type_mentions(const std::string& lowered) {
    static const std::regex kAbsolute(R"(\babsolute\b)");
    static const std::regex kIntensity(R"(\bintensity\b|\bper unit\b|\bper revenue\b)");
    auto out = detail::scan(lowered, kAbsolute,
                            [](const std::smatch& m) { return detail::whole(m, "absolute"); });
    for (auto& m : detail::scan(lowered, kIntensity, [](const std::smatch& x) {
             return detail::whole(x, "intensity");
         })) {
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) { return a.begin < b.begin; });
    return out;
}

inline std::vector<Mention> net_zero_mentions(const std::string& lowered) {
    static const std::regex kNetZero(R"(\bnet[- ]?zero\b|\bcarbon[- ]neutral(?:ity)?\b)");
    return detail::scan(lowered, kNetZero,
                        [](const std::smatch& m) { return detail::whole(m, "net zero"); });
}

inline bool has_reduction_verb(const std::string& lowered) {
    static const std::regex kVerb(R"(\b(?:reduc|cut|lower|decreas|declin|halv)[a-z]*\b)");
    return std::regex_search(lowered, kVerb);
}

struct Sentence {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool terminated = false;
};

/// Splits at '.', '!', '?' or ';' followed by whitespace or end of text.
/// Decimal points are never boundaries.
inline std::vector<Sentence> sentences(std::string_view s) {
    std::vector<Sentence> out;
    std::size_t start = 0;
    auto push = [&](std::size_t b, std::size_t e, bool term) {
        while (b < e && text::is_space(s[b])) ++b;
        while (e > b && text::is_space(s[e - 1])) --e;
        if (e > b) out.push_back({b, e, term});
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != '.' && c != '!' && c != '?' && c != ';') continue;
        const bool at_end = i + 1 == s.size();
        if (!at_end && !text::is_space(s[i + 1])) continue;
        push(start, i + 1, true);
        start = i + 1;
    }
    push(start, s.size(), false);
    return out;
}

} // namespace cai::grammar
