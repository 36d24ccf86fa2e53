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

#include <cmath>
#include <map>
#include <random>

#include <catch_amalgamated.hpp>

#include "cai/embedding.hpp"

using namespace cai;
using namespace cai::embedding;
using Catch::Approx;

namespace {

// Reference FNV-1a 64 written from the published parameters.
std::uint64_t fnv_oracle(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> embed_oracle(const std::vector<std::string>& tokens, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    for (const auto& t : tokens) v[fnv_oracle(t) % dim] += 1.0;
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0) {
        for (double& x : v) x /= n;
    }
    return v;
}

} // namespace

TEST_CASE("FNV-1a 64 published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("baseline embedding basics") {
    const HashedBagOfWords backend;
    CHECK(backend.dimension() == 1024);
    const auto a = backend.embed("reduce emissions");
    CHECK(a == backend.embed("reduce emissions"));
    CHECK(cosine(a, a) == 1.0);
    CHECK(cosine(a, backend.embed("Reduce, EMISSIONS!")) == 1.0);
    const auto zero = backend.embed("");
    CHECK(zero.is_zero());
    CHECK(zero.dimension() == 1024);
    CHECK(cosine(a, zero) == 0.0);
    CHECK(cosine(zero, zero) == 0.0);
    CHECK(backend.embed("  ,;  ").is_zero());
    CHECK_THROWS_AS(cosine(a, HashedBagOfWords(16).embed("x")), ContractError);
    CHECK_THROWS_AS(HashedBagOfWords(0), ConfigError);
}

TEST_CASE("baseline embedding equals the bag-of-words oracle") {
    const HashedBagOfWords backend;
    const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
        {"We plan to reduce absolute emissions", {"we", "plan", "to", "reduce", "absolute", "emissions"}},
        {"scope 1 and 2, scope 3", {"scope", "1", "and", "2", "scope", "3"}},
        {"net-zero by FY30", {"net", "zero", "by", "fy30"}},
    };
    for (const auto& [text, tokens] : cases) {
        const auto v = backend.embed(text);
        const auto expected = embed_oracle(tokens, 1024);
        REQUIRE(v.values.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) REQUIRE(v.values[i] == Approx(expected[i]).margin(1e-15));
        CHECK(std::abs(v.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("texts with disjoint token buckets have cosine 0") {
    const HashedBagOfWords backend;
    // find two tokens in different buckets, and two distinct tokens in the same bucket
    std::map<std::size_t, std::string> by_bucket;
    std::string same_a, same_b;
    for (int i = 0; i < 5000 && same_a.empty(); ++i) {
        const std::string tok = "tok" + std::to_string(i);
        const auto b = fnv_oracle(tok) % 1024;
        REQUIRE(backend.bucket(tok) == b);
        auto [it, inserted] = by_bucket.emplace(b, tok);
        if (!inserted) {
            same_a = it->second;
            same_b = tok;
        }
    }
    REQUIRE_FALSE(same_a.empty());
    const auto& first = *by_bucket.begin();
    const auto& second = *std::next(by_bucket.begin());
    CHECK(cosine(backend.embed(first.second), backend.embed(second.second)) == 0.0);
    CHECK(cosine(backend.embed(same_a), backend.embed(same_b)) == 1.0);
}

TEST_CASE("cosine properties on random baseline vectors") {
    const HashedBagOfWords backend(64);
    const std::vector<std::string> vocab{"carbon", "scope", "reduce", "target", "2030", "water",
                                         "net", "zero", "absolute", "intensity", "we", "our"};
    std::mt19937 rng(3);
    auto random_text = [&] {
        std::string s;
        const int n = static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) s += vocab[rng() % vocab.size()] + " ";
        return s;
    };
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = backend.embed(random_text());
        const auto b = backend.embed(random_text());
        const double ab = cosine(a, b);
        REQUIRE(ab == cosine(b, a));
        REQUIRE(ab >= 0.0);
        REQUIRE(ab <= 1.0);
        for (double x : a.values) REQUIRE(x >= 0.0);
        if (!a.is_zero()) {
            REQUIRE(cosine(a, a) == 1.0);
            REQUIRE(std::abs(a.norm() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("cosine handles general vectors and clamps") {
    EmbeddingVector a{{1.0, 0.0}};
    EmbeddingVector b{{-1.0, 0.0}};
    EmbeddingVector c{{0.0, 2.0}};
    CHECK(cosine(a, b) == -1.0);
    CHECK(cosine(a, c) == 0.0);
    EmbeddingVector d{{0.1, 0.2}};
    EmbeddingVector e{{0.1 * 3, 0.2 * 3}};
    const double s = cosine(d, e);
    CHECK(s <= 1.0);
    CHECK(s == Approx(1.0));
}
