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

// Stage runners. Each stage reads the previous stage's files from the output
// directory and writes its own, so any stage can be re-run in isolation:
//
//   ingest    -> documents.jsonl, <cache>/<doc_id>.jsonl
//   classify  -> relevance.jsonl
//   extract   -> extractions.jsonl, <rejects>
//   validate  -> scored.jsonl
//   dedup     -> records.jsonl, <debug>
//
// Per-document failures go to failures.jsonl and drop that document from
// later stages without aborting the batch.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cai/config.hpp"
#include "cai/corpus.hpp"
#include "cai/dedup.hpp"
#include "cai/embedding.hpp"
#include "cai/extract.hpp"
#include "cai/llm.hpp"
#include "cai/prompt.hpp"
#include "cai/relevance.hpp"
#include "cai/validate.hpp"

namespace cai::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kDocumentsFile = "documents.jsonl";
inline constexpr const char* kRelevanceFile = "relevance.jsonl";
inline constexpr const char* kExtractionsFile = "extractions.jsonl";
inline constexpr const char* kScoredFile = "scored.jsonl";
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kFailuresFile = "failures.jsonl";

/// Error raised by a stage, prefixed with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct Failure {
    std::string doc_id;
    std::string stage;
    std::string error;
};

struct Backends {
    const corpus::TextConverter& converter;
    const relevance::RelevanceBackend& relevance;
    const embedding::EmbeddingBackend& embedder;
    const llm::LlmClient& llm;
};

struct DocumentInput {
    fs::path path;
    corpus::DocumentMeta meta;
};

// ---------------------------------------------------------------------------
// Input discovery
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_document_file(const fs::path& p) {
    const auto ext = text::lower(p.extension().string());
    return ext == ".txt" || ext == ".pdf";
}

inline std::optional<corpus::DocumentMeta> sidecar_meta(const fs::path& doc) {
    auto side = doc;
    side.replace_extension(".meta.json");
    if (!fs::exists(side)) return std::nullopt;
    std::ifstream in(side);
    return nlohmann::json::parse(in).get<corpus::DocumentMeta>();
}

} // namespace detail

/// Resolves documents and their metadata. A directory may hold a
/// manifest.jsonl (one DocumentMeta per line, `source_path` relative to the
/// directory); otherwise every .txt/.pdf needs a `<stem>.meta.json` sidecar.
/// A single file uses its sidecar or `fallback`. Sorted by doc_id.
inline std::vector<DocumentInput> discover_inputs(
    const fs::path& input, const std::optional<corpus::DocumentMeta>& fallback = std::nullopt) {
    std::vector<DocumentInput> out;
    auto add = [&](fs::path path, corpus::DocumentMeta meta) {
        meta.source_path = path.string();
        meta.validate();
        out.push_back({std::move(path), std::move(meta)});
    };
    if (fs::is_directory(input)) {
        const auto manifest = input / "manifest.jsonl";
        if (fs::exists(manifest)) {
            std::ifstream in(manifest);
            std::string line;
            while (std::getline(in, line)) {
                if (text::trim(line).empty()) continue;
                auto meta = nlohmann::json::parse(line).get<corpus::DocumentMeta>();
                if (meta.source_path.empty()) {
                    throw ConfigError("manifest entry for '" + meta.company_id + "' lacks source_path");
                }
                fs::path p(meta.source_path);
                add(p.is_absolute() ? p : input / p, std::move(meta));
            }
        } else {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(input)) {
                if (e.is_regular_file() && detail::is_document_file(e.path())) files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                auto meta = detail::sidecar_meta(f);
                if (!meta) throw ConfigError("no metadata for '" + f.string() + "' (manifest or sidecar)");
                add(f, std::move(*meta));
            }
        }
    } else if (fs::exists(input)) {
        auto meta = detail::sidecar_meta(input);
        if (!meta) meta = fallback;
        if (!meta) throw ConfigError("no metadata for '" + input.string() + "'");
        add(input, std::move(*meta));
    } else {
        throw ConfigError("input '" + input.string() + "' does not exist");
    }
    std::stable_sort(out.begin(), out.end(), [](const DocumentInput& a, const DocumentInput& b) {
        return a.meta.doc_id() < b.meta.doc_id();
    });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].meta.doc_id() == out[i - 1].meta.doc_id()) {
            throw ConfigError("duplicate doc_id '" + out[i].meta.doc_id() + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions escaping
/// fn are rethrown after all threads finish (first one wins).
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <typename Json>
void write_jsonl(const fs::path& path, const std::vector<Json>& rows) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (const auto& r : rows) out << r.dump() << '\n';
}

inline std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path.string() + "' (run the previous stage first)");
    std::vector<nlohmann::json> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!text::trim(line).empty()) rows.push_back(nlohmann::json::parse(line));
    }
    return rows;
}

inline nlohmann::ordered_json to_json(const Failure& f) {
    nlohmann::ordered_json j;
    j["doc_id"] = f.doc_id;
    j["stage"] = f.stage;
    j["error"] = f.error;
    return j;
}

inline std::vector<Failure> read_failures(const fs::path& out_dir) {
    std::vector<Failure> out;
    const auto path = out_dir / kFailuresFile;
    if (!fs::exists(path)) return out;
    for (const auto& j : read_jsonl(path)) {
        out.push_back({j.at("doc_id").get<std::string>(), j.at("stage").get<std::string>(),
                       j.at("error").get<std::string>()});
    }
    return out;
}

/// Replaces failures recorded for `stage` by `fresh`, keeping other stages'.
inline void record_failures(const fs::path& out_dir, const std::string& stage,
                            const std::vector<Failure>& fresh) {
    std::vector<Failure> all;
    for (auto& f : read_failures(out_dir)) {
        if (f.stage != stage) all.push_back(std::move(f));
    }
    all.insert(all.end(), fresh.begin(), fresh.end());
    std::stable_sort(all.begin(), all.end(), [](const Failure& a, const Failure& b) {
        return a.doc_id < b.doc_id;
    });
    std::vector<nlohmann::ordered_json> rows;
    for (const auto& f : all) rows.push_back(to_json(f));
    write_jsonl(out_dir / kFailuresFile, rows);
}

inline std::set<std::string> failed_docs(const fs::path& out_dir) {
    std::set<std::string> ids;
    for (const auto& f : read_failures(out_dir)) ids.insert(f.doc_id);
    return ids;
}

inline validate::RuleConfig rules_of(const config::PipelineConfig& cfg) {
    validate::RuleConfig r;
    r.min_year = cfg.rules_min_year;
    r.max_year = cfg.rules_max_year;
    r.max_percent = cfg.rules_max_percent;
    r.fy_pivot = cfg.rules_fy_pivot;
    return r;
}

/// Documents from documents.jsonl that have not failed, in file order.
inline std::vector<corpus::DocumentMeta> live_documents(const fs::path& out_dir) {
    const auto failed = failed_docs(out_dir);
    std::vector<corpus::DocumentMeta> out;
    for (const auto& j : read_jsonl(out_dir / kDocumentsFile)) {
        auto meta = j.get<corpus::DocumentMeta>();
        if (!failed.count(meta.doc_id())) out.push_back(std::move(meta));
    }
    return out;
}

inline std::vector<corpus::Chunk> load_cached_chunks(const config::PipelineConfig& cfg,
                                                     const std::string& doc_id) {
    const auto path = cfg.under_output(cfg.paths_cache) / (doc_id + ".jsonl");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LookupError("chunk cache file missing: " + path.string());
    return corpus::read_chunks_jsonl(in);
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

struct StageSummary {
    std::size_t documents = 0;
    std::size_t items = 0;  // stage-specific count: chunks, contexts, records
    std::vector<Failure> failures;
};

/// Loads, cleans and chunks every input; writes documents.jsonl and one cache
/// file per document.
inline StageSummary ingest(const std::vector<DocumentInput>& inputs,
                           const config::PipelineConfig& cfg, const corpus::TextConverter& converter) {
    const fs::path out_dir = cfg.output_dir();
    fs::create_directories(out_dir);
    const auto cache_dir = cfg.under_output(cfg.paths_cache);
    fs::create_directories(cache_dir);

    struct Slot {
        std::optional<corpus::Document> doc;
        std::size_t chunks = 0;
        std::optional<Failure> failure;
    };
    std::vector<Slot> slots(inputs.size());
    parallel_for(inputs.size(), cfg.workers, [&](std::size_t i) {
        const auto& in = inputs[i];
        try {
            auto doc = corpus::load_document(in.path, in.meta, converter);
            const auto chunks = corpus::chunk_text(doc, cfg.chunk_window_words, cfg.chunk_overlap_words);
            std::ofstream out(cache_dir / (doc.doc_id() + ".jsonl"), std::ios::binary | std::ios::trunc);
            corpus::write_chunks_jsonl(out, chunks);
            slots[i].chunks = chunks.size();
            slots[i].doc = std::move(doc);
        } catch (const std::exception& e) {
            slots[i].failure = Failure{in.meta.doc_id(), "ingest", e.what()};
        }
    });

    StageSummary summary;
    std::vector<nlohmann::json> rows;
    for (auto& s : slots) {
        if (s.failure) {
            summary.failures.push_back(*s.failure);
            continue;
        }
        rows.push_back(nlohmann::json(s.doc->meta));
        ++summary.documents;
        summary.items += s.chunks;
    }
    write_jsonl(out_dir / kDocumentsFile, rows);
    // A fresh ingest starts a fresh failure log.
    std::filesystem::remove(out_dir / kFailuresFile);
    record_failures(out_dir, "ingest", summary.failures);
    return summary;
}

inline nlohmann::ordered_json to_json(const relevance::RelevanceResult& r) {
    nlohmann::ordered_json j;
    j["doc_id"] = r.doc_id;
    j["index"] = r.index;
    j["score"] = r.score;
    j["label"] = r.label == relevance::Label::relevant ? "relevant" : "irrelevant";
    return j;
}

/// Scores every cached chunk; writes relevance.jsonl.
inline StageSummary classify(const config::PipelineConfig& cfg,
                             const relevance::RelevanceBackend& backend) {
    const fs::path out_dir = cfg.output_dir();
    const auto docs = live_documents(out_dir);
    std::vector<std::vector<relevance::RelevanceResult>> results(docs.size());
    std::vector<std::optional<Failure>> failures(docs.size());
    parallel_for(docs.size(), cfg.workers, [&](std::size_t i) {
        const auto id = docs[i].doc_id();
        try {
            results[i] = relevance::classify_chunks(load_cached_chunks(cfg, id), backend);
        } catch (const std::exception& e) {
            failures[i] = Failure{id, "classify", e.what()};
        }
    });
    StageSummary summary;
    std::vector<nlohmann::ordered_json> rows;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (failures[i]) {
            summary.failures.push_back(*failures[i]);
            continue;
        }
        ++summary.documents;
        for (const auto& r : results[i]) {
            rows.push_back(to_json(r));
            if (r.label == relevance::Label::relevant) ++summary.items;
        }
    }
    write_jsonl(out_dir / kRelevanceFile, rows);
    record_failures(out_dir, "classify", summary.failures);
    return summary;
}

inline nlohmann::ordered_json to_json(const extract::ContextExtraction& x) {
    nlohmann::ordered_json j;
    j["doc_id"] = x.doc_id;
    j["chunk_index"] = x.chunk_index;
    j["context"] = x.context;
    j["response"] = x.response;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : x.records) {
        nlohmann::ordered_json rj;
        rj["raw"] = extract::to_json(r.raw);
        rj["entity_match"] = r.entity_match;
        rj["boundary"] = std::string(extract::to_string(r.boundary));
        j["records"].push_back(std::move(rj));
    }
    j["parse_error"] = x.parse_error ? nlohmann::ordered_json(*x.parse_error) : nlohmann::ordered_json(nullptr);
    return j;
}

inline extract::ContextExtraction extraction_from_json(const nlohmann::json& j) {
    extract::ContextExtraction x;
    x.doc_id = j.at("doc_id").get<std::string>();
    x.chunk_index = j.at("chunk_index").get<std::size_t>();
    x.context = j.at("context").get<std::string>();
    x.response = j.at("response").get<std::string>();
    for (const auto& rj : j.at("records")) {
        extract::ExtractedRecord r;
        r.raw = extract::raw_from_json(rj.at("raw"));
        r.entity_match = rj.at("entity_match").get<bool>();
        r.boundary = extract::parse_boundary(rj.at("boundary").get<std::string>());
        x.records.push_back(std::move(r));
    }
    if (j.contains("parse_error") && !j["parse_error"].is_null()) {
        x.parse_error = j["parse_error"].get<std::string>();
    }
    return x;
}

/// Enriches every relevant chunk and runs extraction on it; writes
/// extractions.jsonl and the rejects file (unparseable model output).
inline StageSummary extract_stage(const config::PipelineConfig& cfg,
                                  const std::vector<extract::GoldenExample>& store,
                                  const embedding::EmbeddingBackend& embedder,
                                  const llm::LlmClient& client) {
    const fs::path out_dir = cfg.output_dir();
    const auto docs = live_documents(out_dir);
    std::map<std::string, std::vector<relevance::RelevanceResult>> relevant;
    for (const auto& j : read_jsonl(out_dir / kRelevanceFile)) {
        if (j.at("label").get<std::string>() != "relevant") continue;
        relevant[j.at("doc_id").get<std::string>()].push_back(
            {j.at("doc_id").get<std::string>(), j.at("index").get<std::size_t>(),
             j.at("score").get<double>(), relevance::Label::relevant});
    }

    extract::ExtractorSettings settings;
    settings.k_shots = cfg.prompt_k_shots;
    settings.sampling.temperature = cfg.llm_temperature;
    settings.sampling.top_p = cfg.llm_top_p;
    settings.sampling.top_k = cfg.llm_top_k;
    settings.sampling.max_output_tokens = cfg.llm_max_output_tokens;
    settings.sampling.seed = cfg.llm_seed;
    if (settings.k_shots > 0 && store.empty()) {
        throw StageError("extract", "prompt.k_shots > 0 but the example store is empty "
                                    "(set paths.examples)");
    }

    std::vector<std::vector<extract::ContextExtraction>> results(docs.size());
    std::vector<std::optional<Failure>> failures(docs.size());
    parallel_for(docs.size(), cfg.workers, [&](std::size_t i) {
        const auto id = docs[i].doc_id();
        try {
            auto it = relevant.find(id);
            if (it == relevant.end()) return;
            corpus::ChunkCache cache;
            cache.add(id, load_cached_chunks(cfg, id));
            for (const auto& r : it->second) {
                const auto ctx = relevance::enrich(r, cache);
                results[i].push_back(extract::extract_context(ctx, docs[i].company_name, store,
                                                              embedder, client, settings));
            }
        } catch (const std::exception& e) {
            results[i].clear();
            failures[i] = Failure{id, "extract", e.what()};
        }
    });

    StageSummary summary;
    std::vector<nlohmann::ordered_json> rows;
    std::vector<nlohmann::ordered_json> rejects;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (failures[i]) {
            summary.failures.push_back(*failures[i]);
            continue;
        }
        ++summary.documents;
        for (const auto& x : results[i]) {
            rows.push_back(to_json(x));
            ++summary.items;
            if (x.parse_error) {
                nlohmann::ordered_json rj;
                rj["doc_id"] = x.doc_id;
                rj["chunk_index"] = x.chunk_index;
                rj["error"] = *x.parse_error;
                rj["raw"] = x.response;
                rejects.push_back(std::move(rj));
            }
        }
    }
    write_jsonl(out_dir / kExtractionsFile, rows);
    write_jsonl(cfg.under_output(cfg.paths_rejects), rejects);
    record_failures(out_dir, "extract", summary.failures);
    return summary;
}

/// Normalizes and scores every extracted record; writes scored.jsonl.
inline StageSummary validate_stage(const config::PipelineConfig& cfg) {
    const fs::path out_dir = cfg.output_dir();
    std::map<std::string, corpus::DocumentMeta> meta_of;
    for (auto& m : live_documents(out_dir)) meta_of.emplace(m.doc_id(), std::move(m));
    const auto rules = rules_of(cfg);

    StageSummary summary;
    std::set<std::string> seen_docs;
    std::vector<nlohmann::ordered_json> rows;
    for (const auto& j : read_jsonl(out_dir / kExtractionsFile)) {
        const auto x = extraction_from_json(j);
        auto it = meta_of.find(x.doc_id);
        if (it == meta_of.end()) continue;
        seen_docs.insert(x.doc_id);
        for (const auto& r : x.records) {
            validate::Provenance prov{it->second, x.doc_id, x.chunk_index, x.context, {}};
            auto rec = validate::normalize(r.raw, std::move(prov), rules);
            const auto scored = validate::score(std::move(rec), x.context,
                                                {r.entity_match, r.boundary}, rules);
            rows.push_back(validate::to_json(scored));
            ++summary.items;
        }
    }
    summary.documents = seen_docs.size();
    write_jsonl(out_dir / kScoredFile, rows);
    return summary;
}

/// Consolidates per company; writes records.jsonl (final output) and the
/// debug file.
inline StageSummary dedup_stage(const config::PipelineConfig& cfg,
                                const embedding::EmbeddingBackend& embedder) {
    const fs::path out_dir = cfg.output_dir();
    std::map<std::pair<std::string, std::size_t>, std::string> contexts;
    for (const auto& j : read_jsonl(out_dir / kExtractionsFile)) {
        contexts[{j.at("doc_id").get<std::string>(), j.at("chunk_index").get<std::size_t>()}] =
            j.at("context").get<std::string>();
    }
    std::vector<validate::ScoredRecord> records;
    for (const auto& j : read_jsonl(out_dir / kScoredFile)) {
        auto s = validate::scored_from_json(j);
        auto& p = s.record.provenance;
        auto it = contexts.find({p.doc_id, p.chunk_index});
        if (it != contexts.end()) p.context = it->second;
        p.meta.source_path.clear();
        records.push_back(std::move(s));
    }
    const auto result =
        dedup::deduplicate_by_company(records, embedder, cfg.dedup_threshold, rules_of(cfg));

    std::vector<nlohmann::ordered_json> rows;
    for (const auto& r : result.records) rows.push_back(validate::to_json(r));
    std::vector<nlohmann::ordered_json> debug;
    for (const auto& d : result.debug) debug.push_back(dedup::to_json(d));
    write_jsonl(out_dir / kRecordsFile, rows);
    write_jsonl(cfg.under_output(cfg.paths_debug), debug);

    StageSummary summary;
    std::set<std::string> docs;
    for (const auto& r : result.records) docs.insert(r.record.provenance.doc_id);
    summary.documents = docs.size();
    summary.items = result.records.size();
    return summary;
}

/// Final records as written by dedup_stage.
inline std::vector<validate::ScoredRecord> read_records(const fs::path& path) {
    std::vector<validate::ScoredRecord> out;
    for (const auto& j : read_jsonl(path)) out.push_back(validate::scored_from_json(j));
    return out;
}

struct RunResult {
    std::vector<validate::ScoredRecord> records;
    std::vector<Failure> failures;
};

/// All stages end to end. Stage-wide errors are rethrown as StageError;
/// per-document errors are collected in `failures`.
inline RunResult run_pipeline(const std::vector<DocumentInput>& inputs,
                              const config::PipelineConfig& cfg, const Backends& backends,
                              const std::vector<extract::GoldenExample>& store) {
    cfg.validate();
    auto guard = [](const char* stage, auto&& fn) {
        try {
            return fn();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
    };
    guard("ingest", [&] { return ingest(inputs, cfg, backends.converter); });
    guard("classify", [&] { return classify(cfg, backends.relevance); });
    guard("extract", [&] { return extract_stage(cfg, store, backends.embedder, backends.llm); });
    guard("validate", [&] { return validate_stage(cfg); });
    guard("dedup", [&] { return dedup_stage(cfg, backends.embedder); });
    RunResult result;
    result.records = read_records(cfg.output_dir() / kRecordsFile);
    result.failures = read_failures(cfg.output_dir());
    return result;
}

} // namespace cai::pipeline
