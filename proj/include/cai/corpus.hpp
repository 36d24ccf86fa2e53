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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"

#include "cai/error.hpp"
#include "cai/text.hpp"

namespace cai::corpus {

enum class ReportType { annual, sustainability };

inline std::string_view to_string(ReportType t) noexcept {
    return t == ReportType::annual ? "annual" : "sustainability";
}

inline ReportType parse_report_type(std::string_view s) {
    if (s == "annual") return ReportType::annual;
    if (s == "sustainability") return ReportType::sustainability;
    throw ConfigError("unknown report_type '" + std::string(s) + "'");
}

struct DocumentMeta {
    std::string company_id;
    std::string company_name;
    ReportType report_type = ReportType::sustainability;
    int publication_year = 0;
    std::string source_path;

    /// File stem of the source when known, otherwise company/year/type.
    std::string doc_id() const {
        if (!source_path.empty()) {
            auto stem = std::filesystem::path(source_path).stem().string();
            if (!stem.empty()) return stem;
        }
        return company_id + "_" + std::to_string(publication_year) + "_" +
               std::string(to_string(report_type));
    }

    void validate() const {
        if (company_id.empty()) throw ConfigError("document metadata: company_id is empty");
        if (publication_year < 1990 || publication_year > 2100) {
            throw ConfigError("document metadata: publication_year " +
                              std::to_string(publication_year) + " outside [1990, 2100]");
        }
    }
};

inline void to_json(nlohmann::json& j, const DocumentMeta& m) {
    j = nlohmann::json{{"company_id", m.company_id},
                       {"company_name", m.company_name},
                       {"report_type", std::string(to_string(m.report_type))},
                       {"publication_year", m.publication_year},
                       {"source_path", m.source_path}};
}

inline void from_json(const nlohmann::json& j, DocumentMeta& m) {
    m.company_id = j.at("company_id").get<std::string>();
    m.company_name = j.value("company_name", m.company_id);
    m.report_type = parse_report_type(j.value("report_type", std::string("sustainability")));
    m.publication_year = j.at("publication_year").get<int>();
    m.source_path = j.value("source_path", std::string{});
}

struct Document {
    DocumentMeta meta;
    std::string text;

    std::string doc_id() const { return meta.doc_id(); }
};

struct Chunk {
    std::string doc_id;
    std::size_t index = 0;
    std::size_t start_word = 0;
    std::vector<std::string> words;
    std::string text;

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

/// Newlines and carriage returns become spaces, whitespace runs collapse,
/// typographic quotes and dashes become ASCII, ends are trimmed.
inline std::string clean_text(std::string_view raw) { return text::clean(raw); }

// ---------------------------------------------------------------------------
// Text conversion
// ---------------------------------------------------------------------------

class TextConverter {
public:
    virtual ~TextConverter() = default;
    virtual std::string convert(const std::filesystem::path& path) const = 0;
};

class PlainTextConverter final : public TextConverter {
public:
    std::string convert(const std::filesystem::path& path) const override {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IngestionError(path.string(), "file is not readable");
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) throw IngestionError(path.string(), "read error");
        return ss.str();
    }
};

/// Runs an external command and captures its stdout. `{input}` in the
/// template is replaced by the shell-quoted path, e.g. "pdftotext {input} -".
class CommandConverter final : public TextConverter {
public:
    explicit CommandConverter(std::string command_template)
        : template_(std::move(command_template)) {}

    std::string convert(const std::filesystem::path& path) const override {
        if (!std::filesystem::exists(path)) {
            throw IngestionError(path.string(), "file is not readable");
        }
        std::string cmd = template_;
        const std::string quoted = shell_quote(path.string());
        if (auto pos = cmd.find("{input}"); pos != std::string::npos) {
            cmd.replace(pos, 7, quoted);
        } else {
            cmd += " " + quoted;
        }
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (pipe == nullptr) throw IngestionError(path.string(), "could not start converter");
        std::string out;
        char buf[4096];
        std::size_t n = 0;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
        const int status = ::pclose(pipe);
        if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
            throw IngestionError(path.string(),
                                 "converter exited with status " + std::to_string(status));
        }
        if (text::trim(out).empty()) throw IngestionError(path.string(), "converter produced no text");
        return out;
    }

private:
    static std::string shell_quote(const std::string& s) {
        std::string q = "'";
        for (char c : s) {
            if (c == '\'') q += "'\\''";
            else q.push_back(c);
        }
        q += "'";
        return q;
    }

    std::string template_;
};

/// Plain text is read directly; `.pdf` goes through the configured command,
/// if any.
class DefaultConverter final : public TextConverter {
public:
    explicit DefaultConverter(std::string pdf_command = {}) {
        if (!pdf_command.empty()) pdf_ = std::make_unique<CommandConverter>(std::move(pdf_command));
    }

    std::string convert(const std::filesystem::path& path) const override {
        if (text::lower(path.extension().string()) == ".pdf") {
            if (!pdf_) throw IngestionError(path.string(), "no PDF converter command configured");
            return pdf_->convert(path);
        }
        return plain_.convert(path);
    }

private:
    PlainTextConverter plain_;
    std::unique_ptr<CommandConverter> pdf_;
};

inline Document load_document(const std::filesystem::path& path, DocumentMeta meta,
                              const TextConverter& converter) {
    if (meta.source_path.empty()) meta.source_path = path.string();
    std::string raw = converter.convert(path);
    return Document{std::move(meta), clean_text(raw)};
}

// ---------------------------------------------------------------------------
// Chunking
// ---------------------------------------------------------------------------

struct ChunkParams {
    std::size_t window_words = 80;
    std::size_t overlap_words = 20;

    std::size_t stride() const noexcept { return window_words - overlap_words; }

    void validate() const {
        if (overlap_words == 0 || overlap_words >= window_words) {
            throw ConfigError("chunking requires 0 < overlap (" + std::to_string(overlap_words) +
                              ") < window (" + std::to_string(window_words) + ")");
        }
    }
};

/// Fixed word windows starting at 0, stride, 2*stride, ... The last window may
/// be shorter. An empty document has no chunks.
inline std::vector<Chunk> chunk_words(const std::string& doc_id,
                                      const std::vector<std::string>& words, ChunkParams p) {
    p.validate();
    std::vector<Chunk> chunks;
    const std::size_t n = words.size();
    if (n == 0) return chunks;
    for (std::size_t start = 0;; start += p.stride()) {
        const std::size_t end = std::min(start + p.window_words, n);
        Chunk c;
        c.doc_id = doc_id;
        c.index = chunks.size();
        c.start_word = start;
        c.words.assign(words.begin() + static_cast<std::ptrdiff_t>(start),
                       words.begin() + static_cast<std::ptrdiff_t>(end));
        c.text = text::join(c.words, " ");
        chunks.push_back(std::move(c));
        if (end == n) break;
    }
    return chunks;
}

inline std::vector<Chunk> chunk_text(const Document& doc, std::size_t window_words,
                                     std::size_t overlap_words) {
    return chunk_words(doc.doc_id(), text::split_words(doc.text),
                       ChunkParams{window_words, overlap_words});
}

// ---------------------------------------------------------------------------
// Chunk cache
// ---------------------------------------------------------------------------

struct Neighbors {
    std::optional<Chunk> previous;
    std::optional<Chunk> next;
};

/// Per-document ordered chunks. Each document is written once and then only
/// read; safe to share across worker threads.
class ChunkCache {
public:
    ChunkCache() = default;
    ChunkCache(const ChunkCache& other) {
        std::shared_lock lock(other.mutex_);
        docs_ = other.docs_;
    }
    ChunkCache& operator=(const ChunkCache&) = delete;

    void add(const std::string& doc_id, std::vector<Chunk> chunks) {
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            if (chunks[i].index != i || chunks[i].doc_id != doc_id) {
                throw ContractError("chunk cache: chunks for '" + doc_id +
                                    "' must have dense indices 0..n-1");
            }
        }
        std::unique_lock lock(mutex_);
        if (!docs_.emplace(doc_id, std::move(chunks)).second) {
            throw ContractError("chunk cache: document '" + doc_id + "' already cached");
        }
    }

    bool contains(const std::string& doc_id) const {
        std::shared_lock lock(mutex_);
        return docs_.count(doc_id) != 0;
    }

    const std::vector<Chunk>& chunks(const std::string& doc_id) const {
        std::shared_lock lock(mutex_);
        auto it = docs_.find(doc_id);
        if (it == docs_.end()) throw LookupError("chunk cache: unknown document '" + doc_id + "'");
        return it->second;
    }

    const Chunk& at(const std::string& doc_id, std::size_t index) const {
        const auto& list = chunks(doc_id);
        if (index >= list.size()) {
            throw LookupError("chunk cache: no chunk " + std::to_string(index) + " in '" +
                              doc_id + "'");
        }
        return list[index];
    }

    std::vector<std::string> doc_ids() const {
        std::shared_lock lock(mutex_);
        std::vector<std::string> ids;
        for (const auto& [id, _] : docs_) ids.push_back(id);
        return ids;
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::vector<Chunk>> docs_;
};

inline Neighbors neighbors(const ChunkCache& cache, const std::string& doc_id,
                           std::size_t index) {
    const auto& list = cache.chunks(doc_id);
    if (index >= list.size()) {
        throw LookupError("chunk cache: no chunk " + std::to_string(index) + " in '" + doc_id +
                          "'");
    }
    Neighbors n;
    if (index > 0) n.previous = list[index - 1];
    if (index + 1 < list.size()) n.next = list[index + 1];
    return n;
}

/// One `{doc_id, index, start_word, text}` object per line.
inline void write_chunks_jsonl(std::ostream& out, const std::vector<Chunk>& chunks) {
    for (const auto& c : chunks) {
        nlohmann::ordered_json j;
        j["doc_id"] = c.doc_id;
        j["index"] = c.index;
        j["start_word"] = c.start_word;
        j["text"] = c.text;
        out << j.dump() << '\n';
    }
}

inline std::vector<Chunk> read_chunks_jsonl(std::istream& in) {
    std::vector<Chunk> chunks;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line);
        Chunk c;
        c.doc_id = j.at("doc_id").get<std::string>();
        c.index = j.at("index").get<std::size_t>();
        c.start_word = j.at("start_word").get<std::size_t>();
        c.text = j.at("text").get<std::string>();
        c.words = text::split_words(c.text);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

} // namespace cai::corpus
