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
#include <charconv>
#include <cmath>
#include <compare>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "cai/commitment.hpp"
#include "cai/corpus.hpp"
#include "cai/extract.hpp"
#include "cai/grammar.hpp"
#include "cai/text.hpp"

namespace cai::validate {

using extract::Boundary;

enum class EmissionsFlag { emissions, non_emissions };

inline std::string_view to_string(EmissionsFlag f) noexcept {
    return f == EmissionsFlag::emissions ? "emissions" : "non_emissions";
}

/// Where a record came from. `parse_rejects` lists fields whose raw value
/// could not be normalized.
struct Provenance {
    corpus::DocumentMeta meta;
    std::string doc_id;
    std::size_t chunk_index = 0;
    std::string context;
    std::vector<std::string> parse_rejects;
};

inline constexpr std::string_view kAbsolute = "absolute";
inline constexpr std::string_view kIntensity = "intensity";
inline constexpr std::string_view kNetZero = "net_zero";

/// Normalized commitment. target_type holds "absolute", "intensity" or
/// "net_zero"; scope holds sorted scope digits. Values outside those sets are
/// kept so the rule checks can flag them.
struct CommitmentRecord {
    std::optional<int> target_year;
    std::optional<int> base_year;
    std::optional<double> target_percent;
    std::optional<std::string> target_type;
    std::optional<std::string> scope;
    std::optional<std::string> target_wording;
    std::optional<std::string> sub_context;
    std::optional<std::string> entity_name;
    Provenance provenance;

    bool same_fields(const CommitmentRecord& o) const {
        return target_year == o.target_year && base_year == o.base_year &&
               target_percent == o.target_percent && target_type == o.target_type &&
               scope == o.scope && target_wording == o.target_wording &&
               sub_context == o.sub_context && entity_name == o.entity_name;
    }
};

inline constexpr std::array<std::string_view, 5> kMetricFields{
    "target_year", "base_year", "target_percent", "target_type", "scope"};

// ---------------------------------------------------------------------------
// Error codes
// ---------------------------------------------------------------------------

struct ErrorCode {
    enum class Kind {
        target_not_after_base,
        year_out_of_range,
        percent_out_of_range,
        scope_invalid,
        type_invalid,
        missing_field,
        hallucinated,
        parse_reject,
    };

    Kind kind;
    std::string field;

    auto operator<=>(const ErrorCode&) const = default;

    std::string str() const {
        switch (kind) {
            case Kind::target_not_after_base: return "E_TARGET_NOT_AFTER_BASE";
            case Kind::year_out_of_range: return "E_YEAR_OUT_OF_RANGE";
            case Kind::percent_out_of_range: return "E_PERCENT_OUT_OF_RANGE";
            case Kind::scope_invalid: return "E_SCOPE_INVALID";
            case Kind::type_invalid: return "E_TYPE_INVALID";
            case Kind::missing_field: return "E_MISSING_FIELD(" + field + ")";
            case Kind::hallucinated: return "E_HALLUCINATED(" + field + ")";
            case Kind::parse_reject: return "E_PARSE_REJECT(" + field + ")";
        }
        return {};
    }

    static ErrorCode parse(std::string_view s) {
        auto with_field = [&](std::string_view prefix, Kind k) -> std::optional<ErrorCode> {
            if (s.size() > prefix.size() + 1 && s.substr(0, prefix.size()) == prefix &&
                s[prefix.size()] == '(' && s.back() == ')') {
                return ErrorCode{k, std::string(s.substr(prefix.size() + 1,
                                                         s.size() - prefix.size() - 2))};
            }
            return std::nullopt;
        };
        if (s == "E_TARGET_NOT_AFTER_BASE") return {Kind::target_not_after_base, {}};
        if (s == "E_YEAR_OUT_OF_RANGE") return {Kind::year_out_of_range, {}};
        if (s == "E_PERCENT_OUT_OF_RANGE") return {Kind::percent_out_of_range, {}};
        if (s == "E_SCOPE_INVALID") return {Kind::scope_invalid, {}};
        if (s == "E_TYPE_INVALID") return {Kind::type_invalid, {}};
        if (auto c = with_field("E_MISSING_FIELD", Kind::missing_field)) return *c;
        if (auto c = with_field("E_HALLUCINATED", Kind::hallucinated)) return *c;
        if (auto c = with_field("E_PARSE_REJECT", Kind::parse_reject)) return *c;
        throw ConfigError("unknown error code '" + std::string(s) + "'");
    }
};

using ErrorCodes = std::set<ErrorCode>;

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

struct RuleConfig {
    int min_year = 1990;
    int max_year = 2100;
    double min_percent_exclusive = 0.0;
    double max_percent = 100.0;
    int fy_pivot = 49;  // FYNN -> 2000+NN when NN <= pivot, else 1900+NN
};

inline std::optional<int> parse_year(std::string_view raw, int fy_pivot = 49) {
    static const std::regex kStrict(R"(^(?:(fy)\s*'?)?([0-9]{2}|[0-9]{4})$)");
    static const std::regex kLoose(R"((?:^|[^0-9a-z])(?:(fy)\s*'?)?([0-9]{4}|[0-9]{2})(?![0-9]))");
    const std::string s = text::lower(text::trim(raw));
    std::smatch m;
    auto from_match = [&](const std::smatch& mm) -> std::optional<int> {
        const std::string digits = mm[2].str();
        const bool fy = mm[1].matched;
        if (digits.size() == 2) {
            if (!fy) return std::nullopt;
            const int nn = std::stoi(digits);
            return nn <= fy_pivot ? 2000 + nn : 1900 + nn;
        }
        return std::stoi(digits);
    };
    if (std::regex_match(s, m, kStrict)) return from_match(m);
    std::optional<int> found;
    int hits = 0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), kLoose); it != std::sregex_iterator();
         ++it) {
        if (auto y = from_match(*it)) {
            found = y;
            ++hits;
        }
    }
    return hits == 1 ? found : std::nullopt;
}

inline std::optional<double> parse_percent(std::string_view raw) {
    std::string s = text::lower(text::trim(raw));
    for (std::string_view unit : {"per cent", "percent", "%"}) {
        if (auto pos = s.find(unit); pos != std::string::npos) s.erase(pos, unit.size());
    }
    const auto t = text::trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Sorted scope digits: "scope 2 and 1" -> "12", "own operations" -> "12",
/// "all scopes" / "all emissions" -> "123".
inline std::optional<std::string> parse_scope(std::string_view raw) {
    const std::string s = text::lower(text::squeeze_spaces(raw));
    std::string digits;
    for (char c : s) {
        if (text::is_digit(c) && digits.find(c) == std::string::npos) digits.push_back(c);
    }
    for (const auto& m : grammar::scope_mentions(s)) {
        for (char c : m.value) {
            if (digits.find(c) == std::string::npos) digits.push_back(c);
        }
    }
    if (digits.empty()) return std::nullopt;
    std::sort(digits.begin(), digits.end());
    return digits;
}

inline std::optional<std::string> parse_target_type(std::string_view raw) {
    const std::string s = text::lower(text::squeeze_spaces(raw));
    if (s.empty()) return std::nullopt;
    static const std::regex kNetZeroWords(R"(net[ _-]?zero|carbon[ _-]neutral)");
    static const std::regex kIntensityWords(R"(intensity|per unit|per revenue)");
    if (std::regex_search(s, kNetZeroWords)) return std::string(kNetZero);
    if (s.find("absolute") != std::string::npos) return std::string(kAbsolute);
    if (std::regex_search(s, kIntensityWords)) return std::string(kIntensity);
    return s;
}

inline std::string format_percent(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Converts model strings to typed fields. NO_ANSWER becomes missing; a value
/// that cannot be parsed becomes missing and is listed in parse_rejects.
inline CommitmentRecord normalize(const extract::RawCommitment& raw, Provenance provenance = {},
                                  const RuleConfig& rules = {}) {
    CommitmentRecord rec;
    rec.provenance = std::move(provenance);
    auto present = [](const std::string& v) {
        return v != extract::kNoAnswer && !text::trim(v).empty();
    };
    auto reject = [&](std::string_view name) {
        auto& pr = rec.provenance.parse_rejects;
        if (std::find(pr.begin(), pr.end(), name) == pr.end()) pr.emplace_back(name);
    };

    if (present(raw.target_year)) {
        rec.target_year = parse_year(raw.target_year, rules.fy_pivot);
        if (!rec.target_year) reject("target_year");
    }
    if (present(raw.base_year)) {
        rec.base_year = parse_year(raw.base_year, rules.fy_pivot);
        if (!rec.base_year) reject("base_year");
    }
    if (present(raw.target_percent)) {
        rec.target_percent = parse_percent(raw.target_percent);
        if (!rec.target_percent) reject("target_percent");
    }
    if (present(raw.target_type)) {
        rec.target_type = parse_target_type(raw.target_type);
        if (!rec.target_type) reject("target_type");
    }
    if (present(raw.scope)) {
        rec.scope = parse_scope(raw.scope);
        if (!rec.scope) reject("scope");
    }
    auto text_field = [&](const std::string& v) -> std::optional<std::string> {
        if (!present(v)) return std::nullopt;
        return text::clean(v);
    };
    rec.target_wording = text_field(raw.target_wording);
    rec.sub_context = text_field(raw.sub_context);
    rec.entity_name = text_field(raw.entity_name);
    return rec;
}

/// Inverse rendering, so normalize(to_raw(r)) reproduces r's fields.
inline extract::RawCommitment to_raw(const CommitmentRecord& rec) {
    extract::RawCommitment r;
    if (rec.target_year) r.target_year = std::to_string(*rec.target_year);
    if (rec.base_year) r.base_year = std::to_string(*rec.base_year);
    if (rec.target_percent) r.target_percent = format_percent(*rec.target_percent);
    if (rec.target_type) r.target_type = *rec.target_type;
    if (rec.scope) r.scope = *rec.scope;
    if (rec.target_wording) r.target_wording = *rec.target_wording;
    if (rec.sub_context) r.sub_context = *rec.sub_context;
    if (rec.entity_name) r.entity_name = *rec.entity_name;
    return r;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

inline bool is_canonical_scope(const std::string& s) {
    static const std::set<std::string> kScopes{"1", "2", "3", "12", "13", "23", "123"};
    return kScopes.count(s) != 0;
}

inline bool is_valid_type(const std::string& t) {
    return t == kAbsolute || t == kIntensity || t == kNetZero;
}

struct RuleResult {
    double score = 1.0;
    ErrorCodes codes;
};

/// Five rules, each applicable only when its operands are present:
/// target after base, years in range, percent in (0, 100], canonical scope,
/// known target type. Score is passed / applicable (1 when none apply).
inline RuleResult rule_check(const CommitmentRecord& rec, const RuleConfig& cfg = {}) {
    int applicable = 0;
    int passed = 0;
    RuleResult out;
    auto apply = [&](bool ok, ErrorCode::Kind failure) {
        ++applicable;
        if (ok) ++passed;
        else out.codes.insert({failure, {}});
    };
    if (rec.target_year && rec.base_year) {
        apply(*rec.target_year > *rec.base_year, ErrorCode::Kind::target_not_after_base);
    }
    if (rec.target_year || rec.base_year) {
        auto in_range = [&](const std::optional<int>& y) {
            return !y || (*y >= cfg.min_year && *y <= cfg.max_year);
        };
        apply(in_range(rec.target_year) && in_range(rec.base_year),
              ErrorCode::Kind::year_out_of_range);
    }
    if (rec.target_percent) {
        apply(*rec.target_percent > cfg.min_percent_exclusive &&
                  *rec.target_percent <= cfg.max_percent,
              ErrorCode::Kind::percent_out_of_range);
    }
    if (rec.scope) apply(is_canonical_scope(*rec.scope), ErrorCode::Kind::scope_invalid);
    if (rec.target_type) apply(is_valid_type(*rec.target_type), ErrorCode::Kind::type_invalid);
    out.score = applicable == 0 ? 1.0 : static_cast<double>(passed) / applicable;
    return out;
}

inline bool has_metric(const CommitmentRecord& rec, std::string_view name) {
    if (name == "target_year") return rec.target_year.has_value();
    if (name == "base_year") return rec.base_year.has_value();
    if (name == "target_percent") return rec.target_percent.has_value();
    if (name == "target_type") return rec.target_type.has_value();
    if (name == "scope") return rec.scope.has_value();
    if (name == "sub_context") return rec.sub_context.has_value();
    throw ContractError("unknown metric field '" + std::string(name) + "'");
}

/// Fraction of the five metric fields that are present.
inline double completeness(const CommitmentRecord& rec) {
    int present = 0;
    for (auto f : kMetricFields) present += has_metric(rec, f) ? 1 : 0;
    return present / 5.0;
}

inline ErrorCodes missing_field_codes(const CommitmentRecord& rec) {
    ErrorCodes codes;
    for (auto f : kMetricFields) {
        if (!has_metric(rec, f)) codes.insert({ErrorCode::Kind::missing_field, std::string(f)});
    }
    return codes;
}

// Evidence ------------------------------------------------------------------------

/// Fields the hallucination check looks for in the source context.
inline constexpr std::array<std::string_view, 6> kEvidenceFields{
    "target_year", "base_year", "target_percent", "target_type", "scope", "sub_context"};

inline bool year_evidenced(int year, const std::string& folded_context) {
    const std::string y = std::to_string(year);
    const std::string yy = y.size() == 4 ? y.substr(2) : y;
    const std::regex re("(?:^|[^0-9])" + y + "(?![0-9])|\\bfy\\s?'?(?:" + yy + "|" + y +
                        ")(?![0-9])");
    return std::regex_search(folded_context, re);
}

inline bool percent_evidenced(double percent, const std::string& folded_context) {
    for (const auto& m : grammar::percent_mentions(folded_context)) {
        if (auto v = parse_percent(m.value); v && std::fabs(*v - percent) < 1e-9) return true;
    }
    return false;
}

inline bool scope_evidenced(const std::string& scope, const std::string& folded_context) {
    for (const auto& m : grammar::scope_mentions(folded_context)) {
        if (m.value == scope) return true;
    }
    return false;
}

inline bool type_evidenced(const std::string& type, const std::string& folded_context) {
    static const std::regex kAbs(R"(\babsolute\b)");
    static const std::regex kInt(R"(\bintensity\b|\bper unit\b|\bper revenue\b)");
    static const std::regex kNz(R"(\bnet[- ]?zero\b|\bcarbon[- ]neutral)");
    if (type == kAbsolute) return std::regex_search(folded_context, kAbs);
    if (type == kIntensity) return std::regex_search(folded_context, kInt);
    if (type == kNetZero) return std::regex_search(folded_context, kNz);
    return false;
}

/// nullopt when the field is not populated.
inline std::optional<bool> field_evidenced(const CommitmentRecord& rec, std::string_view name,
                                           const std::string& folded_context) {
    if (name == "target_year") {
        if (!rec.target_year) return std::nullopt;
        return year_evidenced(*rec.target_year, folded_context);
    }
    if (name == "base_year") {
        if (!rec.base_year) return std::nullopt;
        return year_evidenced(*rec.base_year, folded_context);
    }
    if (name == "target_percent") {
        if (!rec.target_percent) return std::nullopt;
        return percent_evidenced(*rec.target_percent, folded_context);
    }
    if (name == "target_type") {
        if (!rec.target_type) return std::nullopt;
        return type_evidenced(*rec.target_type, folded_context);
    }
    if (name == "scope") {
        if (!rec.scope) return std::nullopt;
        return scope_evidenced(*rec.scope, folded_context);
    }
    if (name == "sub_context") {
        if (!rec.sub_context) return std::nullopt;
        return folded_context.find(text::fold(*rec.sub_context)) != std::string::npos;
    }
    throw ContractError("no evidence rule for field '" + std::string(name) + "'");
}

struct HallucinationResult {
    double score = 1.0;
    ErrorCodes codes;
    int populated = 0;
};

/// Share of populated fields with lexical evidence in the context (1 when none
/// are populated). Each unevidenced field adds E_HALLUCINATED(field).
inline HallucinationResult hallucination(const CommitmentRecord& rec, std::string_view context) {
    const std::string folded = text::fold(context);
    HallucinationResult out;
    int evidenced = 0;
    for (auto f : kEvidenceFields) {
        const auto ok = field_evidenced(rec, f, folded);
        if (!ok) continue;
        ++out.populated;
        if (*ok) ++evidenced;
        else out.codes.insert({ErrorCode::Kind::hallucinated, std::string(f)});
    }
    out.score = out.populated == 0 ? 1.0 : static_cast<double>(evidenced) / out.populated;
    return out;
}

inline EmissionsFlag classify_wording(std::string_view target_wording) {
    static const std::regex kEmissions(
        R"(\bemissions?\b|\bcarbon\b|\bco2\b|\bghg\b|\bnet[- ]?zero\b|\bclimate\b)");
    return std::regex_search(text::lower(target_wording), kEmissions) ? EmissionsFlag::emissions
                                                                     : EmissionsFlag::non_emissions;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

struct AuxFlags {
    bool entity_match = true;
    Boundary boundary = Boundary::corporate_wide;
};

struct ScoredRecord {
    CommitmentRecord record;
    double rule_score = 0.0;
    double completeness_score = 0.0;
    double hallucination_score = 0.0;
    double confidence = 0.0;
    ErrorCodes error_codes;
    bool entity_match = true;
    Boundary boundary = Boundary::corporate_wide;
    EmissionsFlag emissions_flag = EmissionsFlag::non_emissions;

    /// Confidence of exactly 1 with no error codes.
    bool high_confidence() const noexcept { return confidence == 1.0 && error_codes.empty(); }
};

inline double mean_confidence(double rule, double completeness, double hallucination) {
    return (rule + completeness + hallucination) / 3.0;
}

/// Recomputes sub-scores, confidence and codes from the record's fields,
/// keeping the flags. Hallucination evidence for each field is looked up in
/// the context returned by `context_for(field)`.
template <typename ContextFor>
void rescore(ScoredRecord& s, ContextFor&& context_for, const RuleConfig& rules = {}) {
    const auto& rec = s.record;
    const auto rr = rule_check(rec, rules);
    s.rule_score = rr.score;
    s.completeness_score = completeness(rec);

    int populated = 0;
    int evidenced = 0;
    ErrorCodes hcodes;
    for (auto f : kEvidenceFields) {
        const auto ok = field_evidenced(rec, f, text::fold(context_for(f)));
        if (!ok) continue;
        ++populated;
        if (*ok) ++evidenced;
        else hcodes.insert({ErrorCode::Kind::hallucinated, std::string(f)});
    }
    s.hallucination_score = populated == 0 ? 1.0 : static_cast<double>(evidenced) / populated;
    s.confidence = mean_confidence(s.rule_score, s.completeness_score, s.hallucination_score);

    s.error_codes = rr.codes;
    s.error_codes.merge(missing_field_codes(rec));
    s.error_codes.merge(hcodes);
    for (const auto& f : rec.provenance.parse_rejects) {
        s.error_codes.insert({ErrorCode::Kind::parse_reject, f});
    }
    s.emissions_flag = classify_wording(rec.target_wording.value_or(""));
}

/// Rule, completeness and hallucination sub-scores, their mean as confidence,
/// the union of all error codes, and the auxiliary flags.
inline ScoredRecord score(CommitmentRecord rec, std::string_view context, AuxFlags flags = {},
                          const RuleConfig& rules = {}) {
    ScoredRecord s;
    s.record = std::move(rec);
    s.entity_match = flags.entity_match;
    s.boundary = flags.boundary;
    rescore(s, [&](std::string_view) { return context; }, rules);
    return s;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

template <typename T>
nlohmann::ordered_json opt_json(const std::optional<T>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

/// The ScoredRecord output schema, field names and order fixed.
inline nlohmann::ordered_json to_json(const ScoredRecord& s) {
    const auto& r = s.record;
    const auto& m = r.provenance.meta;
    nlohmann::ordered_json j;
    j["company_id"] = m.company_id;
    j["company_name"] = m.company_name;
    j["report_type"] = std::string(corpus::to_string(m.report_type));
    j["publication_year"] = m.publication_year;
    j["target_year"] = opt_json(r.target_year);
    j["base_year"] = opt_json(r.base_year);
    j["target_percent"] = opt_json(r.target_percent);
    j["target_type"] = opt_json(r.target_type);
    j["scope"] = opt_json(r.scope);
    j["target_wording"] = opt_json(r.target_wording);
    j["sub_context"] = opt_json(r.sub_context);
    j["entity_name"] = opt_json(r.entity_name);
    j["rule_score"] = s.rule_score;
    j["completeness_score"] = s.completeness_score;
    j["hallucination_score"] = s.hallucination_score;
    j["confidence"] = s.confidence;
    j["error_codes"] = nlohmann::ordered_json::array();
    for (const auto& c : s.error_codes) j["error_codes"].push_back(c.str());
    j["entity_match"] = s.entity_match;
    j["boundary"] = std::string(extract::to_string(s.boundary));
    j["emissions_flag"] = std::string(to_string(s.emissions_flag));
    j["doc_id"] = r.provenance.doc_id;
    j["chunk_index"] = r.provenance.chunk_index;
    return j;
}

template <typename T>
std::optional<T> opt_from(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

/// Reads a record written by to_json. The source context is not part of the
/// schema and comes back empty.
inline ScoredRecord scored_from_json(const nlohmann::json& j) {
    ScoredRecord s;
    auto& r = s.record;
    auto& m = r.provenance.meta;
    m.company_id = j.at("company_id").get<std::string>();
    m.company_name = j.value("company_name", m.company_id);
    m.report_type = corpus::parse_report_type(j.at("report_type").get<std::string>());
    m.publication_year = j.at("publication_year").get<int>();
    r.target_year = opt_from<int>(j, "target_year");
    r.base_year = opt_from<int>(j, "base_year");
    r.target_percent = opt_from<double>(j, "target_percent");
    r.target_type = opt_from<std::string>(j, "target_type");
    r.scope = opt_from<std::string>(j, "scope");
    r.target_wording = opt_from<std::string>(j, "target_wording");
    r.sub_context = opt_from<std::string>(j, "sub_context");
    r.entity_name = opt_from<std::string>(j, "entity_name");
    s.rule_score = j.at("rule_score").get<double>();
    s.completeness_score = j.at("completeness_score").get<double>();
    s.hallucination_score = j.at("hallucination_score").get<double>();
    s.confidence = j.at("confidence").get<double>();
    for (const auto& c : j.at("error_codes")) {
        auto code = ErrorCode::parse(c.get<std::string>());
        if (code.kind == ErrorCode::Kind::parse_reject) r.provenance.parse_rejects.push_back(code.field);
        s.error_codes.insert(std::move(code));
    }
    s.entity_match = j.at("entity_match").get<bool>();
    s.boundary = extract::parse_boundary(j.at("boundary").get<std::string>());
    s.emissions_flag = j.at("emissions_flag").get<std::string>() == "emissions"
                           ? EmissionsFlag::emissions
                           : EmissionsFlag::non_emissions;
    r.provenance.doc_id = j.at("doc_id").get<std::string>();
    r.provenance.chunk_index = j.at("chunk_index").get<std::size_t>();
    return s;
}

} // namespace cai::validate
