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

// Command-line front end: stage commands, end-to-end run, benchmark and sweeps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cai/backends.hpp"
#include "cai/cai.hpp"

namespace fs = std::filesystem;
using namespace cai;

namespace {

struct Options {
    std::string config_path;
    std::string output;
    std::string input;
    std::string examples;
    std::string golden;
    std::string predictions;
    std::string report;
    std::string backend_llm;
    std::string backend_relevance;
    std::string backend_embedding;
    std::optional<std::size_t> workers;
    std::optional<std::int64_t> seed;

    std::string company_id;
    std::string company_name;
    std::string report_type = "sustainability";
    std::optional<int> year;

    std::vector<std::size_t> sizes;
    std::optional<std::size_t> k_min;
    std::optional<std::size_t> k_max;
    std::optional<std::size_t> cv_samples;
};

config::PipelineConfig resolve_config(const Options& o) {
    config::PipelineConfig cfg;
    if (!o.config_path.empty()) cfg = config::load_config(o.config_path);
    if (!o.output.empty()) cfg.paths_output = o.output;
    if (!o.examples.empty()) cfg.paths_examples = o.examples;
    if (!o.golden.empty()) cfg.paths_golden = o.golden;
    if (!o.backend_llm.empty()) cfg.llm_backend = o.backend_llm;
    if (!o.backend_relevance.empty()) cfg.relevance_backend = o.backend_relevance;
    if (!o.backend_embedding.empty()) cfg.embedding_backend = o.backend_embedding;
    if (o.workers) cfg.workers = *o.workers;
    if (o.seed) {
        cfg.llm_seed = *o.seed;
        cfg.bench_seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (o.k_min) cfg.bench_k_min = *o.k_min;
    if (o.k_max) cfg.bench_k_max = *o.k_max;
    if (o.cv_samples) cfg.bench_cv_samples = *o.cv_samples;
    cfg.validate();
    return cfg;
}

std::optional<corpus::DocumentMeta> meta_from_flags(const Options& o) {
    if (o.company_id.empty()) return std::nullopt;
    if (!o.year) throw ConfigError("--year is required with --company-id");
    corpus::DocumentMeta m;
    m.company_id = o.company_id;
    m.company_name = o.company_name.empty() ? o.company_id : o.company_name;
    m.report_type = corpus::parse_report_type(o.report_type);
    m.publication_year = *o.year;
    return m;
}

std::vector<extract::GoldenExample> load_store(const config::PipelineConfig& cfg,
                                               const embedding::EmbeddingBackend& embedder) {
    if (cfg.paths_examples.empty()) {
        if (cfg.prompt_k_shots == 0) return {};
        throw ConfigError("no example store: pass --examples or set paths.examples");
    }
    return extract::load_example_store(cfg.paths_examples, embedder);
}

void report_stage(const char* name, const pipeline::StageSummary& s) {
    std::cerr << name << ": " << s.documents << " documents, " << s.items << " items";
    if (!s.failures.empty()) std::cerr << ", " << s.failures.size() << " failed";
    std::cerr << "\n";
    for (const auto& f : s.failures) std::cerr << "  failed " << f.doc_id << ": " << f.error << "\n";
}

std::vector<corpus::Document> load_documents(const std::string& input,
                                             const std::optional<corpus::DocumentMeta>& meta,
                                             const corpus::TextConverter& converter) {
    std::vector<corpus::Document> docs;
    for (const auto& in : pipeline::discover_inputs(input, meta)) {
        docs.push_back(corpus::load_document(in.path, in.meta, converter));
    }
    return docs;
}

void add_meta_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--input", o.input, "Document file or directory")->required();
    cmd->add_option("--company-id", o.company_id, "Metadata for a single input file");
    cmd->add_option("--company-name", o.company_name);
    cmd->add_option("--report-type", o.report_type)->check(CLI::IsMember({"annual", "sustainability"}));
    cmd->add_option("--year", o.year, "Publication year");
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << v;
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extract, validate and benchmark corporate carbon-reduction commitments"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config_path, "JSON config file (dotted or nested keys)");
    app.add_option("--output", o.output, "Output directory (paths.output)");
    app.add_option("--backend-llm", o.backend_llm)->check(CLI::IsMember({"mock", "remote"}));
    app.add_option("--backend-relevance", o.backend_relevance)->check(CLI::IsMember({"lexical", "remote"}));
    app.add_option("--backend-embedding", o.backend_embedding)->check(CLI::IsMember({"baseline", "remote"}));
    app.add_option("--workers", o.workers, "Parallel document workers");
    app.add_option("--seed", o.seed, "Seed for the LLM and the k-shot sweep");

    auto* ingest = app.add_subcommand("ingest", "Load, clean and chunk documents");
    add_meta_flags(ingest, o);
    auto* classify = app.add_subcommand("classify", "Score cached chunks for relevance");
    auto* extract_cmd = app.add_subcommand("extract", "Run extraction on relevant contexts");
    extract_cmd->add_option("--examples", o.examples, "Golden example store (JSON lines)");
    auto* validate_cmd = app.add_subcommand("validate", "Normalize and score extracted records");
    auto* dedup_cmd = app.add_subcommand("dedup", "Consolidate records per company");
    auto* run = app.add_subcommand("run", "All stages end to end");
    add_meta_flags(run, o);
    run->add_option("--examples", o.examples, "Golden example store (JSON lines)");
    auto* bench_cmd = app.add_subcommand("bench", "Evaluate final records against a golden set");
    bench_cmd->add_option("--golden", o.golden, "Golden commitments (JSON lines)");
    bench_cmd->add_option("--predictions", o.predictions, "Records file (default <output>/records.jsonl)");
    bench_cmd->add_option("--report", o.report, "Report path (default <output>/eval.json)");

    auto* sweep = app.add_subcommand("sweep", "Sensitivity sweeps");
    sweep->require_subcommand(1);
    auto* sweep_chunk = sweep->add_subcommand("chunk-size", "Relevant-chunk recall per window size");
    add_meta_flags(sweep_chunk, o);
    sweep_chunk->add_option("--golden", o.golden, "Golden commitments (JSON lines)");
    sweep_chunk->add_option("--sizes", o.sizes, "Window sizes (default 60 80 100 120 160)");
    auto* sweep_k = sweep->add_subcommand("k-shot", "Cross-validated recall per k");
    sweep_k->add_option("--examples", o.examples, "Golden example store (JSON lines)");
    sweep_k->add_option("--k-min", o.k_min);
    sweep_k->add_option("--k-max", o.k_max);
    sweep_k->add_option("--cv-samples", o.cv_samples);

    CLI11_PARSE(app, argc, argv);

    const char* stage = "config";
    try {
        const auto cfg = resolve_config(o);
        const auto backends = make_backends(cfg);
        const fs::path out_dir = cfg.output_dir();

        if (*ingest) {
            stage = "ingest";
            const auto inputs = pipeline::discover_inputs(o.input, meta_from_flags(o));
            report_stage("ingest", pipeline::ingest(inputs, cfg, *backends.converter));
        } else if (*classify) {
            stage = "classify";
            report_stage("classify", pipeline::classify(cfg, *backends.relevance));
        } else if (*extract_cmd) {
            stage = "extract";
            const auto store = load_store(cfg, *backends.embedder);
            report_stage("extract", pipeline::extract_stage(cfg, store, *backends.embedder, *backends.llm));
        } else if (*validate_cmd) {
            stage = "validate";
            report_stage("validate", pipeline::validate_stage(cfg));
        } else if (*dedup_cmd) {
            stage = "dedup";
            report_stage("dedup", pipeline::dedup_stage(cfg, *backends.embedder));
        } else if (*run) {
            stage = "run";
            const auto inputs = pipeline::discover_inputs(o.input, meta_from_flags(o));
            const auto store = load_store(cfg, *backends.embedder);
            const auto result = pipeline::run_pipeline(inputs, cfg, backends.view(), store);
            std::cerr << "run: " << inputs.size() << " documents, " << result.records.size()
                      << " records, " << result.failures.size() << " failed\n";
            for (const auto& f : result.failures) {
                std::cerr << "  failed " << f.doc_id << " [" << f.stage << "]: " << f.error << "\n";
            }
            std::cerr << "records: " << (out_dir / pipeline::kRecordsFile).string() << "\n";
        } else if (*bench_cmd) {
            stage = "bench";
            if (cfg.paths_golden.empty()) throw ConfigError("pass --golden or set paths.golden");
            const auto golden = bench::load_golden(cfg.paths_golden);
            const fs::path preds = o.predictions.empty() ? out_dir / pipeline::kRecordsFile : fs::path(o.predictions);
            const auto report = bench::evaluate(golden, pipeline::read_records(preds));
            const fs::path report_path = o.report.empty() ? out_dir / "eval.json" : fs::path(o.report);
            if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
            std::ofstream(report_path) << bench::to_json(report).dump(2) << "\n";
            std::cout << bench::render_table(report);
        } else if (*sweep_chunk) {
            stage = "sweep chunk-size";
            if (cfg.paths_golden.empty()) throw ConfigError("pass --golden or set paths.golden");
            const auto docs = load_documents(o.input, meta_from_flags(o), *backends.converter);
            const auto golden = bench::load_golden(cfg.paths_golden);
            const auto rows = o.sizes.empty()
                                  ? bench::sweep_chunk_size(docs, golden, *backends.relevance)
                                  : bench::sweep_chunk_size(docs, golden, *backends.relevance, o.sizes);
            std::vector<nlohmann::ordered_json> out;
            std::cout << std::setw(8) << "window" << std::setw(9) << "overlap" << std::setw(8) << "chunks"
                      << std::setw(10) << "relevant" << std::setw(8) << "golden" << std::setw(8) << "found"
                      << std::setw(10) << "recall" << "\n";
            for (const auto& r : rows) {
                out.push_back(bench::to_json(r));
                std::cout << std::setw(8) << r.window_words << std::setw(9) << r.overlap_words
                          << std::setw(8) << r.chunks << std::setw(10) << r.relevant_chunks
                          << std::setw(8) << r.golden << std::setw(8) << r.found << std::setw(10)
                          << bench::format_rate(r.recall) << "\n";
            }
            pipeline::write_jsonl(out_dir / "sweep_chunk_size.jsonl", out);
        } else if (*sweep_k) {
            stage = "sweep k-shot";
            if (cfg.paths_examples.empty()) throw ConfigError("pass --examples or set paths.examples");
            const auto store = extract::load_example_store(cfg.paths_examples, *backends.embedder);
            bench::KShotSettings ks;
            ks.k_min = cfg.bench_k_min;
            ks.k_max = cfg.bench_k_max;
            ks.cv_samples = cfg.bench_cv_samples;
            ks.train_fraction = cfg.bench_train_fraction;
            ks.seed = cfg.bench_seed;
            ks.sampling.temperature = cfg.llm_temperature;
            ks.sampling.top_p = cfg.llm_top_p;
            ks.sampling.top_k = cfg.llm_top_k;
            ks.sampling.max_output_tokens = cfg.llm_max_output_tokens;
            ks.sampling.seed = cfg.llm_seed;
            fs::create_directories(out_dir);
            // Rows are flushed as they complete so a backend failure keeps them.
            std::ofstream sink(out_dir / "sweep_kshot.jsonl", std::ios::binary | std::ios::trunc);
            std::cout << std::setw(4) << "k" << std::setw(14) << "train_recall" << std::setw(13)
                      << "test_recall" << std::setw(16) << "test_precision" << "\n";
            bench::sweep_kshot(store, *backends.embedder, *backends.llm, ks, [&](const bench::KShotRow& r) {
                sink << bench::to_json(r).dump() << "\n" << std::flush;
                std::cout << std::setw(4) << r.k << std::setw(14) << fmt(r.train_recall) << std::setw(13)
                          << fmt(r.test_recall) << std::setw(16) << fmt(r.test_precision) << "\n";
            });
        }
    } catch (const ConfigError& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
