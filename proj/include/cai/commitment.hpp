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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cai/error.hpp"
#include "cai/text.hpp"

namespace cai::extract {

inline constexpr std::string_view kNoAnswer = "NO_ANSWER";

/// A commitment as the model returned it. Every field is present; unextracted
/// ones hold NO_ANSWER.
struct RawCommitment {
    std::string target_year{kNoAnswer};
    std::string base_year{kNoAnswer};
    std::string target_percent{kNoAnswer};
    std::string target_type{kNoAnswer};
    std::string scope{kNoAnswer};
    std::string target_wording{kNoAnswer};
    std::string sub_context{kNoAnswer};
    std::string entity_name{kNoAnswer};

    friend bool operator==(const RawCommitment&, const RawCommitment&) = default;
};

inline constexpr std::array<std::string_view, 8> kRawFields{
    "target_year",    "base_year",   "target_percent", "target_type",
    "scope",          "target_wording", "sub_context", "entity_name"};

inline std::string& field(RawCommitment& r, std::string_view name) {
    if (name == "target_year") return r.target_year;
    if (name == "base_year") return r.base_year;
    if (name == "target_percent") return r.target_percent;
    if (name == "target_type") return r.target_type;
    if (name == "scope") return r.scope;
    if (name == "target_wording") return r.target_wording;
    if (name == "sub_context") return r.sub_context;
    if (name == "entity_name") return r.entity_name;
    throw ContractError("unknown commitment field '" + std::string(name) + "'");
}

inline const std::string& field(const RawCommitment& r, std::string_view name) {
    return field(const_cast<RawCommitment&>(r), name);
}

inline nlohmann::ordered_json to_json(const RawCommitment& r) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (auto name : kRawFields) j[std::string(name)] = field(r, name);
    return j;
}

inline std::string serialize(const std::vector<RawCommitment>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr.dump();
}

inline RawCommitment raw_from_json(const nlohmann::json& obj) {
    RawCommitment r;
    if (!obj.is_object()) return r;
    for (auto name : kRawFields) {
        auto it = obj.find(std::string(name));
        if (it == obj.end() || it->is_null()) continue;
        if (it->is_string()) {
            field(r, name) = it->get<std::string>();
        } else if (it->is_number_integer() || it->is_number_unsigned()) {
            field(r, name) = it->dump();
        } else if (it->is_number_float()) {
            field(r, name) = it->dump();
        } else if (it->is_boolean() || it->is_array() || it->is_object()) {
            field(r, name) = it->dump();
        }
    }
    return r;
}

namespace detail {

/// End position (exclusive) of the bracketed value starting at `open`, or npos.
inline std::size_t match_bracket(std::string_view s, std::size_t open) {
    const char o = s[open];
    const char c = o == '[' ? ']' : '}';
    int depth = 0;
    bool in_str = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char ch = s[i];
        if (in_str) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_str = false;
            continue;
        }
        if (ch == '"') in_str = true;
        else if (ch == o) ++depth;
        else if (ch == c && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

inline std::optional<nlohmann::json> first_json(std::string_view s, char opener) {
    for (std::size_t pos = s.find(opener); pos != std::string_view::npos;
         pos = s.find(opener, pos + 1)) {
        const auto end = match_bracket(s, pos);
        if (end == std::string_view::npos) continue;
        auto j = nlohmann::json::parse(s.substr(pos, end - pos), nullptr, false);
        if (!j.is_discarded()) return j;
    }
    return std::nullopt;
}

} // namespace detail

/// Parses model output: surrounding prose and code fences are ignored, the
/// first JSON array wins, a lone object becomes a one-element list, missing
/// keys become NO_ANSWER. Throws ParseError when nothing parses.
inline std::vector<RawCommitment> parse_output(std::string_view text) {
    std::vector<RawCommitment> out;
    if (auto arr = detail::first_json(text, '[')) {
        for (const auto& el : *arr) {
            if (el.is_object()) out.push_back(raw_from_json(el));
        }
        if (arr->empty() || !out.empty()) return out;
    }
    if (auto obj = detail::first_json(text, '{')) {
        out.push_back(raw_from_json(*obj));
        return out;
    }
    throw ParseError("no JSON array or object in model output", std::string(text));
}

} // namespace cai::extract
