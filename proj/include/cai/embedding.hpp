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
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cai/error.hpp"
#include "cai/text.hpp"

namespace cai::embedding {

/// L2-normalized, or all zeros for text without tokens.
struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const noexcept { return values.size(); }

    bool is_zero() const noexcept {
        return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    }

    double norm() const noexcept {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Scales to unit length in place; zero vectors stay zero.
inline void normalize(EmbeddingVector& v) {
    const double n = v.norm();
    if (n == 0.0) return;
    for (double& x : v.values) x /= n;
}

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;

    EmbeddingVector embed(const std::string& text) const {
        auto out = embed_batch(std::span<const std::string>(&text, 1));
        if (out.size() != 1) throw BackendError("embedding backend returned wrong batch size");
        return std::move(out.front());
    }
};

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Hashed bag of words: lowercase alphanumeric tokens, FNV-1a 64 bucketed
/// modulo the dimension, counts L2-normalized. Pure and deterministic.
class HashedBagOfWords final : public EmbeddingBackend {
public:
    explicit HashedBagOfWords(std::size_t dimension = 1024) : dim_(dimension) {
        if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
    }

    std::size_t dimension() const override { return dim_; }

    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_one(t));
        return out;
    }

    EmbeddingVector embed_one(std::string_view t) const {
        EmbeddingVector v{std::vector<double>(dim_, 0.0)};
        for (const auto& tok : text::alnum_tokens(t)) v.values[bucket(tok)] += 1.0;
        normalize(v);
        return v;
    }

    std::size_t bucket(std::string_view token) const noexcept { return fnv1a64(token) % dim_; }

private:
    std::size_t dim_;
};

/// Zero when either side is the zero vector; clamped to [-1, 1].
inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw ContractError("cosine: dimension mismatch (" + std::to_string(a.dimension()) +
                            " vs " + std::to_string(b.dimension()) + ")");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    if (a.values == b.values) return 1.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

} // namespace cai::embedding
