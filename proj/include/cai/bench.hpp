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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cai/corpus.hpp"
#include "cai/embedding.hpp"
#include "cai/extract.hpp"
#include "cai/llm.hpp"
#include "cai/prompt.hpp"
#include "cai/relevance.hpp"
#include "cai/validate.hpp"

namespace cai::bench {

/// The five metric fields used for matching.
struct MetricTuple {
    std::optional<int> target_year;
    std::optional<int> base_year;
    std::optional<double> target_percent;
    std::optional<std::string> target_type;
    std::optional<std::string> scope;

    friend bool operator==(const MetricTuple&, const MetricTuple&) = default;
};

inline MetricTuple metrics_of(const validate::CommitmentRecord& r) {
    return {r.target_year, r.base_year, r.target_percent, r.target_type, r.scope};
}

struct GoldenCommitment {
    std::string company_id;
    std::string doc_id;
    MetricTuple metrics;
};

inline GoldenCommitment golden_from_json(const nlohmann::json& j) {
    GoldenCommitment g;
    g.company_id = j.at("company_id").get<std::string>();
    g.doc_id = j.at("doc_id").get<std::string>();
    g.metrics.target_year = validate::opt_from<int>(j, "target_year");
    g.metrics.base_year = validate::opt_from<int>(j, "base_year");
    g.metrics.target_percent = validate::opt_from<double>(j, "target_percent");
    g.metrics.target_type = validate::opt_from<std::string>(j, "target_type");
    g.metrics.scope = validate::opt_from<std::string>(j, "scope");
    return g;
}

inline nlohmann::ordered_json to_json(const GoldenCommitment& g) {
    nlohmann::ordered_json j;
    j["company_id"] = g.company_id;
    j["doc_id"] = g.doc_id;
    j["target_year"] = validate::opt_json(g.metrics.target_year);
    j["base_year"] = validate::opt_json(g.metrics.base_year);
    j["target_percent"] = validate::opt_json(g.metrics.target_percent);
    j["target_type"] = validate::opt_json(g.metrics.target_type);
    j["scope"] = validate::opt_json(g.metrics.scope);
    return j;
}

inline std::vector<GoldenCommitment> load_golden(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open golden dataset '" + path.string() + "'");
    std::vector<GoldenCommitment> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!text::trim(line).empty()) out.push_back(golden_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

/// Greedy, order-stable one-to-one matching on exact equality of all five
/// metrics. Returns (golden index, predicted index) pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> match(
    const std::vector<MetricTuple>& golden, const std::vector<MetricTuple>& predicted) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<bool> used(predicted.size(), false);
    for (std::size_t g = 0; g < golden.size(); ++g) {
        for (std::size_t p = 0; p < predicted.size(); ++p) {
            if (!used[p] && predicted[p] == golden[g]) {
                used[p] = true;
                pairs.emplace_back(g, p);
                break;
            }
        }
    }
    return pairs;
}

struct DocReport {
    std::string doc_id;
    std::size_t matched = 0;
    std::size_t golden = 0;
    std::size_t predicted = 0;
    std::size_t high_conf = 0;
    std::size_t matched_high_conf = 0;
    std::optional<double> accuracy;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> total_recall;
    std::optional<double> high_conf_recall;
    std::optional<double> high_conf_precision;
};

inline std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

inline void fill_rates(DocReport& r) {
    r.accuracy = ratio(r.matched, r.golden);
    r.recall = ratio(r.matched, r.golden);
    r.total_recall = r.recall;
    r.precision = ratio(r.matched, r.predicted);
    r.high_conf_recall = ratio(r.matched_high_conf, r.golden);
    r.high_conf_precision = ratio(r.matched_high_conf, r.high_conf);
}

/// Accuracy and (total) recall are matched/|golden|; precision is
/// matched/|predicted|; the high-confidence rates use matches of the
/// high-confidence subset. Rates with a zero denominator are null.
inline DocReport doc_metrics(const std::vector<MetricTuple>& golden,
                             const std::vector<MetricTuple>& predicted,
                             const std::vector<MetricTuple>& high_conf_subset,
                             std::string doc_id = {}) {
    DocReport r;
    r.doc_id = std::move(doc_id);
    r.golden = golden.size();
    r.predicted = predicted.size();
    r.high_conf = high_conf_subset.size();
    r.matched = match(golden, predicted).size();
    r.matched_high_conf = match(golden, high_conf_subset).size();
    fill_rates(r);
    return r;
}

struct EvalReport {
    std::vector<DocReport> documents;
    DocReport aggregate;
};

/// Micro-average: counts are summed over documents before dividing.
inline DocReport aggregate(const std::vector<DocReport>& docs) {
    DocReport a;
    a.doc_id = "ALL";
    for (const auto& d : docs) {
        a.matched += d.matched;
        a.golden += d.golden;
        a.predicted += d.predicted;
        a.high_conf += d.high_conf;
        a.matched_high_conf += d.matched_high_conf;
    }
    fill_rates(a);
    return a;
}

/// Per-document metrics over the union of documents seen in either list.
inline EvalReport evaluate(const std::vector<GoldenCommitment>& golden,
                           const std::vector<validate::ScoredRecord>& predicted) {
    std::map<std::string, std::vector<MetricTuple>> g_by_doc;
    std::map<std::string, std::vector<MetricTuple>> p_by_doc;
    std::map<std::string, std::vector<MetricTuple>> h_by_doc;
    for (const auto& g : golden) g_by_doc[g.doc_id].push_back(g.metrics);
    for (const auto& p : predicted) {
        const auto& id = p.record.provenance.doc_id;
        p_by_doc[id].push_back(metrics_of(p.record));
        if (p.high_confidence()) h_by_doc[id].push_back(metrics_of(p.record));
    }
    std::set<std::string> ids;
    for (const auto& [id, _] : g_by_doc) ids.insert(id);
    for (const auto& [id, _] : p_by_doc) ids.insert(id);
    EvalReport report;
    for (const auto& id : ids) {
        report.documents.push_back(doc_metrics(g_by_doc[id], p_by_doc[id], h_by_doc[id], id));
    }
    report.aggregate = aggregate(report.documents);
    return report;
}

inline nlohmann::ordered_json to_json(const DocReport& d) {
    nlohmann::ordered_json j;
    j["doc_id"] = d.doc_id;
    j["matched"] = d.matched;
    j["golden"] = d.golden;
    j["predicted"] = d.predicted;
    j["high_conf"] = d.high_conf;
    j["matched_high_conf"] = d.matched_high_conf;
    j["accuracy"] = validate::opt_json(d.accuracy);
    j["recall"] = validate::opt_json(d.recall);
    j["precision"] = validate::opt_json(d.precision);
    j["total_recall"] = validate::opt_json(d.total_recall);
    j["high_conf_recall"] = validate::opt_json(d.high_conf_recall);
    j["high_conf_precision"] = validate::opt_json(d.high_conf_precision);
    return j;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["documents"] = nlohmann::ordered_json::array();
    for (const auto& d : r.documents) j["documents"].push_back(to_json(d));
    j["aggregate"] = to_json(r.aggregate);
    return j;
}

inline std::string format_rate(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1) << (*v * 100.0) << "%";
    return ss.str();
}

inline std::string render_table(const EvalReport& r) {
    std::ostringstream ss;
    auto row = [&](const DocReport& d) {
        ss << std::left << std::setw(28) << d.doc_id << std::right << std::setw(8) << d.golden
           << std::setw(8) << d.predicted << std::setw(8) << d.matched << std::setw(10)
           << format_rate(d.accuracy) << std::setw(10) << format_rate(d.total_recall)
           << std::setw(10) << format_rate(d.precision) << std::setw(10)
           << format_rate(d.high_conf_recall) << std::setw(10)
           << format_rate(d.high_conf_precision) << "\n";
    };
    ss << std::left << std::setw(28) << "document" << std::right << std::setw(8) << "golden"
       << std::setw(8) << "pred" << std::setw(8) << "match" << std::setw(10) << "accuracy"
       << std::setw(10) << "recall" << std::setw(10) << "precision" << std::setw(10) << "hc_recall"
       << std::setw(10) << "hc_prec" << "\n";
    for (const auto& d : r.documents) row(d);
    row(r.aggregate);
    return ss.str();
}

// ---------------------------------------------------------------------------
// Chunk-size sweep
// ---------------------------------------------------------------------------

/// All populated metrics of `g` have lexical evidence in the chunk text.
inline bool chunk_contains(const MetricTuple& g, const std::string& chunk_text) {
    validate::CommitmentRecord rec;
    rec.target_year = g.target_year;
    rec.base_year = g.base_year;
    rec.target_percent = g.target_percent;
    rec.target_type = g.target_type;
    rec.scope = g.scope;
    const auto folded = text::fold(chunk_text);
    for (auto f : validate::kMetricFields) {
        const auto ok = validate::field_evidenced(rec, f, folded);
        if (ok && !*ok) return false;
    }
    return true;
}

struct ChunkSweepRow {
    std::size_t window_words = 0;
    std::size_t overlap_words = 0;
    std::size_t chunks = 0;
    std::size_t relevant_chunks = 0;
    std::size_t golden = 0;
    std::size_t found = 0;
    std::optional<double> recall;
};

inline const std::vector<std::size_t>& default_chunk_sizes() {
    static const std::vector<std::size_t> kSizes{60, 80, 100, 120, 160};
    return kSizes;
}

/// For each window size (overlap = size / 4), the share of golden commitments
/// whose populated metrics all appear inside at least one relevant chunk of
/// their document.
inline std::vector<ChunkSweepRow> sweep_chunk_size(const std::vector<corpus::Document>& docs,
                                                   const std::vector<GoldenCommitment>& golden,
                                                   const relevance::RelevanceBackend& backend,
                                                   const std::vector<std::size_t>& sizes =
                                                       default_chunk_sizes()) {
    std::map<std::string, std::vector<MetricTuple>> g_by_doc;
    for (const auto& g : golden) g_by_doc[g.doc_id].push_back(g.metrics);

    std::vector<ChunkSweepRow> rows;
    for (auto size : sizes) {
        ChunkSweepRow row;
        row.window_words = size;
        row.overlap_words = size / 4;
        for (const auto& doc : docs) {
            const auto chunks = corpus::chunk_text(doc, row.window_words, row.overlap_words);
            const auto results = relevance::classify_chunks(chunks, backend);
            row.chunks += chunks.size();
            std::vector<const corpus::Chunk*> relevant;
            for (std::size_t i = 0; i < chunks.size(); ++i) {
                if (results[i].label == relevance::Label::relevant) relevant.push_back(&chunks[i]);
            }
            row.relevant_chunks += relevant.size();
            for (const auto& g : g_by_doc[doc.doc_id()]) {
                ++row.golden;
                for (const auto* c : relevant) {
                    if (chunk_contains(g, c->text)) {
                        ++row.found;
                        break;
                    }
                }
            }
        }
        row.recall = ratio(row.found, row.golden);
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::ordered_json to_json(const ChunkSweepRow& r) {
    nlohmann::ordered_json j;
    j["window_words"] = r.window_words;
    j["overlap_words"] = r.overlap_words;
    j["chunks"] = r.chunks;
    j["relevant_chunks"] = r.relevant_chunks;
    j["golden"] = r.golden;
    j["found"] = r.found;
    j["recall"] = validate::opt_json(r.recall);
    return j;
}

// ---------------------------------------------------------------------------
// k-shot sweep
// ---------------------------------------------------------------------------

struct KShotSettings {
    std::size_t k_min = 1;
    std::size_t k_max = 10;
    std::size_t cv_samples = 6;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    extract::SamplingParams sampling;
};

struct KShotRow {
    std::size_t k = 0;
    std::size_t samples = 0;
    double train_accuracy = 0.0;
    double train_recall = 0.0;
    double test_accuracy = 0.0;
    double test_recall = 0.0;
    double test_precision = 0.0;
};

struct ContextSplit {
    std::vector<std::size_t> train;  // example indices
    std::vector<std::size_t> test;
};

/// Shuffles distinct contexts with a seeded Fisher-Yates and assigns the first
/// round(fraction * groups) to train, so no context is in both sets.
inline ContextSplit split_by_context(const std::vector<extract::GoldenExample>& store,
                                     double train_fraction, std::uint64_t seed) {
    std::vector<std::string> contexts;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < store.size(); ++i) {
        auto& m = members[store[i].context];
        if (m.empty()) contexts.push_back(store[i].context);
        m.push_back(i);
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = contexts.size(); i > 1; --i) {
        std::swap(contexts[i - 1], contexts[rng() % i]);
    }
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * contexts.size()));
    if (contexts.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, contexts.size() - 1);
    ContextSplit split;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        auto& dst = i < n_train ? split.train : split.test;
        for (auto idx : members[contexts[i]]) dst.push_back(idx);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace detail {

struct Counts {
    std::size_t matched = 0;
    std::size_t expected = 0;
    std::size_t predicted = 0;
};

inline Counts evaluate_contexts(const std::vector<extract::GoldenExample>& store,
                                const std::vector<std::size_t>& eval_idx,
                                const std::vector<extract::GoldenExample>& shots, std::size_t k,
                                const embedding::EmbeddingBackend& embedder,
                                const llm::LlmClient& client, const KShotSettings& settings) {
    std::map<std::string, std::vector<MetricTuple>> expected_by_context;
    std::vector<std::string> order;
    for (auto i : eval_idx) {
        auto& exp = expected_by_context[store[i].context];
        if (exp.empty()) order.push_back(store[i].context);
        for (const auto& r : store[i].expected) exp.push_back(metrics_of(validate::normalize(r)));
    }
    Counts c;
    for (const auto& context : order) {
        extract::PromptSpec spec;
        spec.examples = extract::select_examples(context, shots, k, embedder);
        spec.input_context = context;
        const auto resp = client.call(settings.sampling.request(extract::build_prompt(spec)), "k-shot");
        std::vector<MetricTuple> predicted;
        try {
            for (const auto& r : extract::parse_output(resp.text)) {
                predicted.push_back(metrics_of(validate::normalize(r)));
            }
        } catch (const ParseError&) {
        }
        const auto& expected = expected_by_context[context];
        c.matched += match(expected, predicted).size();
        c.expected += expected.size();
        c.predicted += predicted.size();
    }
    return c;
}

} // namespace detail

/// For each k, averages over `cv_samples` context-grouped train/test splits
/// (split s uses seed + s, identical for every k). Test contexts are prompted
/// with k examples drawn from the train split; train contexts likewise.
/// Each finished row goes to `on_row` before the next starts, so a backend
/// failure leaves earlier rows delivered.
inline std::vector<KShotRow> sweep_kshot(const std::vector<extract::GoldenExample>& store,
                                         const embedding::EmbeddingBackend& embedder,
                                         const llm::LlmClient& client,
                                         const KShotSettings& settings,
                                         const std::function<void(const KShotRow&)>& on_row = {}) {
    if (store.empty()) throw ConfigError("k-shot sweep: example store is empty");
    if (settings.k_min < 1 || settings.k_max < settings.k_min) {
        throw ConfigError("k-shot sweep: invalid k range");
    }
    if (settings.cv_samples == 0) throw ConfigError("k-shot sweep: cv_samples must be positive");

    std::vector<ContextSplit> splits;
    for (std::size_t s = 0; s < settings.cv_samples; ++s) {
        splits.push_back(split_by_context(store, settings.train_fraction, settings.seed + s));
    }

    std::vector<KShotRow> rows;
    for (std::size_t k = settings.k_min; k <= settings.k_max; ++k) {
        KShotRow row;
        row.k = k;
        row.samples = splits.size();
        for (const auto& split : splits) {
            std::vector<extract::GoldenExample> shots;
            for (auto i : split.train) shots.push_back(store[i]);
            if (shots.empty()) throw ConfigError("k-shot sweep: train split is empty");
            const auto train = detail::evaluate_contexts(store, split.train, shots, k, embedder,
                                                         client, settings);
            const auto test = detail::evaluate_contexts(store, split.test, shots, k, embedder,
                                                        client, settings);
            const double train_recall = ratio(train.matched, train.expected).value_or(0.0);
            const double test_recall = ratio(test.matched, test.expected).value_or(0.0);
            row.train_recall += train_recall;
            row.train_accuracy += train_recall;
            row.test_recall += test_recall;
            row.test_accuracy += test_recall;
            row.test_precision += ratio(test.matched, test.predicted).value_or(0.0);
        }
        const auto n = static_cast<double>(splits.size());
        row.train_recall /= n;
        row.train_accuracy /= n;
        row.test_recall /= n;
        row.test_accuracy /= n;
        row.test_precision /= n;
        rows.push_back(row);
        if (on_row) on_row(row);
    }
    return rows;
}

inline nlohmann::ordered_json to_json(const KShotRow& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["samples"] = r.samples;
    j["train_accuracy"] = r.train_accuracy;
    j["train_recall"] = r.train_recall;
    j["test_accuracy"] = r.test_accuracy;
    j["test_recall"] = r.test_recall;
    j["test_precision"] = r.test_precision;
    return j;
}

} // namespace cai::bench
