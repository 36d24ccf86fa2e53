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
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "cai/embedding.hpp"
#include "cai/error.hpp"
#include "cai/validate.hpp"

namespace cai::dedup {

using validate::ScoredRecord;

struct SimilarityBreakdown {
    /// target_wording, sub_context, entity_name; nullopt when either side is missing.
    std::array<std::optional<double>, 3> text_components;
    /// target_year, base_year, target_percent, target_type, scope.
    std::array<std::optional<double>, 5> exact_components;
    int applicable_count = 0;
    double score = 0.0;
};

struct RecordEmbeddings {
    std::optional<embedding::EmbeddingVector> target_wording;
    std::optional<embedding::EmbeddingVector> sub_context;
    std::optional<embedding::EmbeddingVector> entity_name;
};

inline RecordEmbeddings embed_record(const ScoredRecord& s,
                                     const embedding::EmbeddingBackend& backend) {
    const auto& r = s.record;
    std::vector<std::string> texts;
    std::array<int, 3> slot{-1, -1, -1};
    const std::array<const std::optional<std::string>*, 3> fields{&r.target_wording, &r.sub_context,
                                                                  &r.entity_name};
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (*fields[i]) {
            slot[i] = static_cast<int>(texts.size());
            texts.push_back(**fields[i]);
        }
    }
    RecordEmbeddings e;
    if (texts.empty()) return e;
    std::vector<embedding::EmbeddingVector> vecs;
    try {
        vecs = backend.embed_batch(texts);
    } catch (const BackendError& err) {
        throw BackendError(std::string("dedup: ") + err.what());
    }
    if (vecs.size() != texts.size()) throw BackendError("dedup: embedding batch size mismatch");
    if (slot[0] >= 0) e.target_wording = vecs[slot[0]];
    if (slot[1] >= 0) e.sub_context = vecs[slot[1]];
    if (slot[2] >= 0) e.entity_name = vecs[slot[2]];
    return e;
}

/// Mean over the components both records populate: embedding cosine for the
/// three text fields, exact match for the five metrics. Zero when nothing is
/// comparable.
inline SimilarityBreakdown similarity(const ScoredRecord& a, const RecordEmbeddings& ea,
                                      const ScoredRecord& b, const RecordEmbeddings& eb) {
    SimilarityBreakdown out;
    const std::array<std::pair<const std::optional<embedding::EmbeddingVector>*,
                               const std::optional<embedding::EmbeddingVector>*>,
                     3>
        texts{{{&ea.target_wording, &eb.target_wording},
               {&ea.sub_context, &eb.sub_context},
               {&ea.entity_name, &eb.entity_name}}};
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (*texts[i].first && *texts[i].second) {
            out.text_components[i] =
                std::clamp(embedding::cosine(**texts[i].first, **texts[i].second), 0.0, 1.0);
        }
    }
    const auto& ra = a.record;
    const auto& rb = b.record;
    auto exact = [](const auto& x, const auto& y) -> std::optional<double> {
        if (!x || !y) return std::nullopt;
        return *x == *y ? 1.0 : 0.0;
    };
    out.exact_components = {exact(ra.target_year, rb.target_year), exact(ra.base_year, rb.base_year),
                            exact(ra.target_percent, rb.target_percent),
                            exact(ra.target_type, rb.target_type), exact(ra.scope, rb.scope)};
    double sum = 0.0;
    for (const auto& c : out.text_components) {
        if (c) {
            sum += *c;
            ++out.applicable_count;
        }
    }
    for (const auto& c : out.exact_components) {
        if (c) {
            sum += *c;
            ++out.applicable_count;
        }
    }
    out.score = out.applicable_count == 0 ? 0.0 : sum / out.applicable_count;
    return out;
}

inline SimilarityBreakdown similarity(const ScoredRecord& a, const ScoredRecord& b,
                                      const embedding::EmbeddingBackend& backend) {
    if (a.record.provenance.meta.company_id != b.record.provenance.meta.company_id) {
        throw ContractError("similarity: records belong to different companies");
    }
    return similarity(a, embed_record(a, backend), b, embed_record(b, backend));
}

struct Cluster {
    std::vector<std::size_t> members;
    std::optional<ScoredRecord> consolidated;
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

/// Connected components of the graph joining records whose similarity exceeds
/// `threshold`. Clusters are ordered by their smallest member index, members
/// ascending.
template <typename SimilarityFn>
std::vector<Cluster> cluster_by(std::size_t n, double threshold, SimilarityFn&& sim) {
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (sim(i, j) > threshold) uf.unite(i, j);
        }
    }
    std::vector<Cluster> clusters;
    std::map<std::size_t, std::size_t> root_to_cluster;
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = uf.find(i);
        auto [it, inserted] = root_to_cluster.emplace(root, clusters.size());
        if (inserted) clusters.push_back({});
        clusters[it->second].members.push_back(i);
    }
    return clusters;
}

inline std::vector<Cluster> cluster(const std::vector<ScoredRecord>& records,
                                    const embedding::EmbeddingBackend& backend,
                                    double threshold = 0.95) {
    std::vector<RecordEmbeddings> emb;
    emb.reserve(records.size());
    for (const auto& r : records) emb.push_back(embed_record(r, backend));
    return cluster_by(records.size(), threshold, [&](std::size_t i, std::size_t j) {
        return similarity(records[i], emb[i], records[j], emb[j]).score;
    });
}

/// Highest confidence first, then lowest (doc_id, chunk_index), then input order.
inline std::vector<std::size_t> priority_order(const std::vector<ScoredRecord>& records,
                                               std::vector<std::size_t> members) {
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = records[a];
        const auto& rb = records[b];
        if (ra.confidence != rb.confidence) return ra.confidence > rb.confidence;
        const auto& pa = ra.record.provenance;
        const auto& pb = rb.record.provenance;
        return std::tie(pa.doc_id, pa.chunk_index, a) < std::tie(pb.doc_id, pb.chunk_index, b);
    });
    return members;
}

namespace detail {

/// Index (into `order`) of the member holding the modal non-missing value;
/// ties go to the earliest member in `order`. nullopt if all are missing.
template <typename Get>
std::optional<std::size_t> modal_member(const std::vector<ScoredRecord>& records,
                                        const std::vector<std::size_t>& order, Get&& get) {
    std::optional<std::size_t> best;
    int best_count = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& v = get(records[order[i]].record);
        if (!v) continue;
        int count = 0;
        for (auto m : order) {
            const auto& w = get(records[m].record);
            if (w && *w == *v) ++count;
        }
        if (count > best_count) {
            best_count = count;
            best = i;
        }
    }
    return best;
}

} // namespace detail

/// Majority vote per attribute over non-missing values (ties to the
/// higher-priority member), so gaps in one member are filled from others.
/// Scores are recomputed; each field's evidence is checked against the
/// context of the member it came from. A singleton comes back unchanged.
inline ScoredRecord consolidate(const Cluster& c, const std::vector<ScoredRecord>& records,
                                const validate::RuleConfig& rules = {}) {
    if (c.members.empty()) throw ContractError("consolidate: empty cluster");
    if (c.members.size() == 1) return records[c.members.front()];

    const auto order = priority_order(records, c.members);
    ScoredRecord out = records[order.front()];
    auto& rec = out.record;
    std::map<std::string, std::size_t> source;  // field -> record index

    auto vote = [&](const char* name, auto member_ptr) {
        const auto pick = detail::modal_member(
            records, order, [&](const validate::CommitmentRecord& r) -> const auto& { return r.*member_ptr; });
        if (pick) {
            const auto idx = order[*pick];
            rec.*member_ptr = records[idx].record.*member_ptr;
            source[name] = idx;
        }
    };
    vote("target_year", &validate::CommitmentRecord::target_year);
    vote("base_year", &validate::CommitmentRecord::base_year);
    vote("target_percent", &validate::CommitmentRecord::target_percent);
    vote("target_type", &validate::CommitmentRecord::target_type);
    vote("scope", &validate::CommitmentRecord::scope);
    vote("target_wording", &validate::CommitmentRecord::target_wording);
    vote("sub_context", &validate::CommitmentRecord::sub_context);
    vote("entity_name", &validate::CommitmentRecord::entity_name);

    // Parse rejects only stand for fields that are still missing.
    std::vector<std::string> rejects;
    for (auto m : order) {
        for (const auto& f : records[m].record.provenance.parse_rejects) {
            if (!validate::has_metric(rec, f) &&
                std::find(rejects.begin(), rejects.end(), f) == rejects.end()) {
                rejects.push_back(f);
            }
        }
    }
    rec.provenance.parse_rejects = rejects;

    validate::rescore(
        out,
        [&](std::string_view field) -> const std::string& {
            auto it = source.find(std::string(field));
            const auto idx = it == source.end() ? order.front() : it->second;
            return records[idx].record.provenance.context;
        },
        rules);
    return out;
}

struct DebugEntry {
    ScoredRecord record;
    std::size_t cluster_id = 0;
    bool kept = false;
};

struct DedupResult {
    std::vector<ScoredRecord> records;
    std::vector<DebugEntry> debug;
};

inline auto metric_key(const validate::CommitmentRecord& r) {
    return std::make_tuple(r.target_year, r.base_year, r.target_percent, r.target_type, r.scope);
}

/// Clusters, consolidates, keeps the highest-confidence record among those
/// sharing all five metrics, and orders the survivors by confidence
/// (descending). `debug` lists every input record with its cluster id and
/// whether its cluster's record survived with it as representative.
inline DedupResult deduplicate(const std::vector<ScoredRecord>& records,
                               const embedding::EmbeddingBackend& backend,
                               double threshold = 0.95, const validate::RuleConfig& rules = {},
                               std::size_t first_cluster_id = 0) {
    DedupResult out;
    auto clusters = cluster(records, backend, threshold);
    std::vector<std::size_t> representative(clusters.size());
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        clusters[ci].consolidated = consolidate(clusters[ci], records, rules);
        representative[ci] = priority_order(records, clusters[ci].members).front();
    }

    // Among clusters with identical metrics keep the highest confidence;
    // ties go to the earlier cluster.
    std::vector<bool> survives(clusters.size(), true);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (!survives[i]) continue;
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            if (!survives[j]) continue;
            const auto& a = clusters[i].consolidated->record;
            const auto& b = clusters[j].consolidated->record;
            if (metric_key(a) != metric_key(b)) continue;
            if (clusters[j].consolidated->confidence > clusters[i].consolidated->confidence) {
                survives[i] = false;
                break;
            }
            survives[j] = false;
        }
    }

    std::vector<std::size_t> cluster_of(records.size());
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        for (auto m : clusters[ci].members) cluster_of[m] = ci;
        if (survives[ci]) out.records.push_back(*clusters[ci].consolidated);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto ci = cluster_of[i];
        out.debug.push_back({records[i], first_cluster_id + ci, survives[ci] && representative[ci] == i});
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const ScoredRecord& a, const ScoredRecord& b) {
                         if (a.confidence != b.confidence) return a.confidence > b.confidence;
                         const auto& pa = a.record.provenance;
                         const auto& pb = b.record.provenance;
                         return std::tie(pa.doc_id, pa.chunk_index) < std::tie(pb.doc_id, pb.chunk_index);
                     });
    return out;
}

/// Runs deduplicate independently per company_id, companies in ascending id
/// order. Cluster ids are unique across the whole result.
inline DedupResult deduplicate_by_company(const std::vector<ScoredRecord>& records,
                                          const embedding::EmbeddingBackend& backend,
                                          double threshold = 0.95,
                                          const validate::RuleConfig& rules = {}) {
    std::map<std::string, std::vector<ScoredRecord>> by_company;
    for (const auto& r : records) by_company[r.record.provenance.meta.company_id].push_back(r);
    DedupResult out;
    std::size_t next_cluster = 0;
    for (const auto& [company, group] : by_company) {
        auto part = deduplicate(group, backend, threshold, rules, next_cluster);
        for (const auto& d : part.debug) next_cluster = std::max(next_cluster, d.cluster_id + 1);
        out.records.insert(out.records.end(), part.records.begin(), part.records.end());
        out.debug.insert(out.debug.end(), part.debug.begin(), part.debug.end());
    }
    return out;
}

inline nlohmann::ordered_json to_json(const DebugEntry& d) {
    auto j = validate::to_json(d.record);
    j["cluster_id"] = d.cluster_id;
    j["kept"] = d.kept;
    return j;
}

} // namespace cai::dedup
