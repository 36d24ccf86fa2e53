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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <catch_amalgamated.hpp>

#include "cai/bench.hpp"
#include "test_support.hpp"

using namespace cai;
using namespace cai::bench;
using cai::testing::numbered_words;

namespace {

MetricTuple tuple(int ty, std::optional<int> by, std::optional<double> pct, std::string type,
                  std::string scope) {
    return {ty, by, pct, std::move(type), std::move(scope)};
}

// The five commitments A..E of the worked example plus an extra F.
const MetricTuple A = tuple(2030, 2015, 30.0, "absolute", "12");
const MetricTuple B = tuple(2030, 2015, 20.0, "absolute", "3");
const MetricTuple C = tuple(2050, std::nullopt, std::nullopt, "net_zero", "123");
const MetricTuple D = tuple(2025, 2019, 50.0, "intensity", "12");
const MetricTuple E = tuple(2035, 2020, 42.0, "absolute", "123");
const MetricTuple F = tuple(2040, 2018, 60.0, "absolute", "2");

// Maximum one-to-one exact matching: equality is an equivalence, so it is the
// sum over distinct tuples of the smaller multiplicity.
std::size_t max_matching(const std::vector<MetricTuple>& g, const std::vector<MetricTuple>& p) {
    std::size_t total = 0;
    std::vector<bool> counted(g.size(), false);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (counted[i]) continue;
        std::size_t ng = 0, np = 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g[j] == g[i]) {
                ++ng;
                counted[j] = true;
            }
        }
        for (const auto& x : p) np += x == g[i];
        total += std::min(ng, np);
    }
    return total;
}

validate::ScoredRecord scored(const MetricTuple& m, std::string doc, bool high) {
    validate::ScoredRecord s;
    s.record.target_year = m.target_year;
    s.record.base_year = m.base_year;
    s.record.target_percent = m.target_percent;
    s.record.target_type = m.target_type;
    s.record.scope = m.scope;
    s.record.provenance.doc_id = std::move(doc);
    s.confidence = high ? 1.0 : 0.9;
    if (!high) s.error_codes.insert({validate::ErrorCode::Kind::missing_field, "base_year"});
    return s;
}

corpus::Document doc_of(const std::string& text, const std::string& stem = "doc") {
    return {{"ACM", "Acme", corpus::ReportType::sustainability, 2023, stem + ".txt"}, text};
}

} // namespace

TEST_CASE("worked example: 0.8 overall, 1.0 / 0.6 on the high-confidence subset") {
    const std::vector<MetricTuple> golden{A, B, C, D, E};
    const std::vector<MetricTuple> predicted{A, B, C, E, F};
    CHECK(match(golden, predicted).size() == 4);
    const auto r = doc_metrics(golden, predicted, {A, B, C});
    CHECK(r.accuracy == 0.8);
    CHECK(r.recall == 0.8);
    CHECK(r.total_recall == 0.8);
    CHECK(r.precision == 0.8);
    CHECK(r.high_conf_precision == 1.0);
    CHECK(r.high_conf_recall == 0.6);
}

TEST_CASE("match degenerate cases") {
    CHECK(match({A, B}, {A, B}).size() == 2);
    CHECK(match({A, B}, {C, D}).empty());
    CHECK(match({A, A}, {A}).size() == 1);
    CHECK(match({A}, {A, A}) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
    // a missing field only matches a missing field
    auto a_no_base = A;
    a_no_base.base_year.reset();
    CHECK(match({A}, {a_no_base}).empty());

    const auto empty = doc_metrics({}, {}, {});
    CHECK_FALSE(empty.recall);
    CHECK_FALSE(empty.precision);
    CHECK_FALSE(empty.accuracy);
    CHECK_FALSE(empty.high_conf_precision);
    const auto none_predicted = doc_metrics({A}, {}, {});
    CHECK(none_predicted.recall == 0.0);
    CHECK_FALSE(none_predicted.precision);
}

TEST_CASE("matching agrees with the multiplicity oracle and ignores order") {
    const std::vector<MetricTuple> pool{A, B, C, D, E, F};
    std::mt19937 rng(2024);
    for (int instance = 0; instance < 800; ++instance) {
        std::vector<MetricTuple> g(rng() % 7), p(rng() % 7);
        for (auto& x : g) x = pool[rng() % pool.size()];
        for (auto& x : p) x = pool[rng() % pool.size()];
        std::vector<MetricTuple> h;
        for (const auto& x : p) {
            if (rng() % 2) h.push_back(x);
        }
        const auto want = max_matching(g, p);
        const auto pairs = match(g, p);
        REQUIRE(pairs.size() == want);
        std::set<std::size_t> gs, ps;
        for (auto [gi, pi] : pairs) {
            REQUIRE(g[gi] == p[pi]);
            REQUIRE(gs.insert(gi).second);
            REQUIRE(ps.insert(pi).second);
        }
        const auto r = doc_metrics(g, p, h);
        REQUIRE(r.matched == want);
        REQUIRE(r.matched_high_conf == max_matching(g, h));
        if (!g.empty()) REQUIRE(*r.recall == Catch::Approx(double(want) / g.size()));
        if (!p.empty()) REQUIRE(*r.precision == Catch::Approx(double(want) / p.size()));
        for (const auto& v : {r.accuracy, r.recall, r.precision, r.high_conf_recall, r.high_conf_precision}) {
            if (v) REQUIRE((*v >= 0.0 && *v <= 1.0));
        }
        auto g2 = g, p2 = p, h2 = h;
        std::shuffle(g2.begin(), g2.end(), rng);
        std::shuffle(p2.begin(), p2.end(), rng);
        std::shuffle(h2.begin(), h2.end(), rng);
        const auto r2 = doc_metrics(g2, p2, h2);
        REQUIRE(r2.matched == r.matched);
        REQUIRE(r2.matched_high_conf == r.matched_high_conf);
    }
}

TEST_CASE("evaluate groups by document and micro-averages") {
    std::vector<GoldenCommitment> golden;
    for (const auto& m : {A, B, C, D, E}) golden.push_back({"ACM", "acm_2023", m});
    golden.push_back({"GLX", "glx_2022", F});
    std::vector<validate::ScoredRecord> predicted{
        scored(A, "acm_2023", true),  scored(B, "acm_2023", true), scored(C, "acm_2023", true),
        scored(E, "acm_2023", false), scored(F, "acm_2023", false), scored(A, "zzz_2021", true)};
    const auto report = evaluate(golden, predicted);
    REQUIRE(report.documents.size() == 3);
    const auto& acm = report.documents[0];
    CHECK(acm.doc_id == "acm_2023");
    CHECK(acm.precision == 0.8);
    CHECK(acm.high_conf_recall == 0.6);
    CHECK(acm.high_conf_precision == 1.0);
    const auto& glx = report.documents[1];
    CHECK(glx.recall == 0.0);
    CHECK_FALSE(glx.precision);
    const auto& zzz = report.documents[2];
    CHECK_FALSE(zzz.recall);
    CHECK(zzz.precision == 0.0);

    const auto& all = report.aggregate;
    CHECK(all.matched == 4);
    CHECK(all.golden == 6);
    CHECK(all.predicted == 6);
    CHECK(all.recall == Catch::Approx(4.0 / 6.0));
    CHECK(all.precision == Catch::Approx(4.0 / 6.0));
    CHECK(all.high_conf_precision == Catch::Approx(3.0 / 4.0));

    const auto j = to_json(report);
    CHECK(j["documents"].size() == 3);
    CHECK(j["documents"][1]["precision"].is_null());
    CHECK(render_table(report).find("acm_2023") != std::string::npos);
    CHECK(format_rate(std::nullopt) == "-");
}

TEST_CASE("golden commitments round-trip through JSON") {
    const GoldenCommitment g{"ACM", "acm_2023", C};
    const auto back = golden_from_json(nlohmann::json::parse(to_json(g).dump()));
    CHECK(back.company_id == "ACM");
    CHECK(back.doc_id == "acm_2023");
    CHECK(back.metrics == C);
    const auto loaded = load_golden(std::string(CAI_DATA_DIR) + "/synthetic/golden.jsonl");
    CHECK(loaded.size() == 59);
}

TEST_CASE("chunk sweep counts a commitment inside one relevant chunk") {
    const std::string commitment =
        "We commit to reduce absolute scope 1 and 2 emissions by 30% by 2030 from 2015 across our operations";
    REQUIRE(text::split_words(commitment).size() == 19);
    // filler words 0..69, the commitment at 70..88, filler to 200
    std::string text = numbered_words(70) + " " + commitment;
    for (int i = 89; i < 200; ++i) text += " w" + std::to_string(i);
    const auto doc = doc_of(text);
    const std::vector<GoldenCommitment> golden{{"ACM", "doc", A}};
    const relevance::LexicalBackend lexical;

    // windows start at multiples of 3/4 of the size; the commitment must fit
    // entirely within one of them
    auto fits = [](std::size_t size) {
        const std::size_t stride = size - size / 4;
        for (std::size_t s = 0; s < 200; s += stride) {
            if (s <= 70 && 89 <= s + size) return true;
            if (s + size >= 200) break;
        }
        return false;
    };
    const auto rows = sweep_chunk_size({doc}, golden, lexical, {20, 40, 60, 80, 100, 400});
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
        INFO(row.window_words);
        CHECK(row.overlap_words == row.window_words / 4);
        CHECK(row.golden == 1);
        CHECK(row.found == (fits(row.window_words) ? 1u : 0u));
    }
    CHECK(rows[3].found == 1);  // 80/20: chunk starting at word 60
    CHECK(rows[5].chunks == 1);

    // a whole-document chunk finds the commitment iff the classifier keeps it
    const auto labels = relevance::classify_chunks(corpus::chunk_text(doc, 400, 100), lexical);
    CHECK(rows[5].found == (labels[0].label == relevance::Label::relevant ? 1u : 0u));

    CHECK(chunk_contains(A, commitment));
    CHECK_FALSE(chunk_contains(B, commitment));
    CHECK(default_chunk_sizes() == std::vector<std::size_t>{60, 80, 100, 120, 160});
}

TEST_CASE("context split keeps shared contexts together") {
    const embedding::HashedBagOfWords e;
    const auto store = extract::load_example_store(std::string(CAI_DATA_DIR) + "/synthetic/examples.jsonl", e);
    std::set<std::string> contexts;
    for (const auto& ex : store) contexts.insert(ex.context);
    REQUIRE(contexts.size() < store.size());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto split = split_by_context(store, 0.7, seed);
        REQUIRE(split.train.size() + split.test.size() == store.size());
        std::set<std::string> train_ctx, test_ctx;
        for (auto i : split.train) train_ctx.insert(store[i].context);
        for (auto i : split.test) test_ctx.insert(store[i].context);
        for (const auto& c : train_ctx) REQUIRE(test_ctx.count(c) == 0);
        REQUIRE(train_ctx.size() == static_cast<std::size_t>(std::llround(0.7 * contexts.size())));
        const auto again = split_by_context(store, 0.7, seed);
        REQUIRE(again.train == split.train);
    }
    CHECK(split_by_context(store, 0.7, 1).train != split_by_context(store, 0.7, 2).train);
    CHECK(split_by_context(store, 1.0, 0).test.size() > 0);
}

TEST_CASE("k-shot sweep is deterministic and streams rows") {
    const embedding::HashedBagOfWords e;
    auto store = extract::load_example_store(std::string(CAI_DATA_DIR) + "/synthetic/examples.jsonl", e);
    store.resize(20);
    const llm::MockLlmBackend mock;
    const llm::LlmClient client(mock, {});
    KShotSettings s;
    s.k_min = 1;
    s.k_max = 3;
    s.cv_samples = 2;
    s.seed = 9;
    std::vector<std::size_t> streamed;
    const auto rows = sweep_kshot(store, e, client, s, [&](const KShotRow& r) { streamed.push_back(r.k); });
    CHECK(streamed == std::vector<std::size_t>{1, 2, 3});
    REQUIRE(rows.size() == 3);
    const auto again = sweep_kshot(store, e, client, s);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(to_json(rows[i]).dump() == to_json(again[i]).dump());
        CHECK(rows[i].samples == 2);
        CHECK(rows[i].test_recall == 1.0);
        CHECK(rows[i].test_precision <= 1.0);
    }

    KShotSettings bad = s;
    bad.k_min = 0;
    CHECK_THROWS_AS(sweep_kshot(store, e, client, bad), ConfigError);
    bad = s;
    bad.cv_samples = 0;
    CHECK_THROWS_AS(sweep_kshot(store, e, client, bad), ConfigError);
    CHECK_THROWS_AS(sweep_kshot({}, e, client, s), ConfigError);
}
