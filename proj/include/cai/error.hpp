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

#include <stdexcept>
#include <string>

namespace cai {

/// Base of every error thrown by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A document could not be read or converted to text.
class IngestionError : public Error {
public:
    IngestionError(std::string path, const std::string& cause)
        : Error("ingestion failed for '" + path + "': " + cause), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Missing (doc_id, index) in a chunk cache.
class LookupError : public Error {
public:
    using Error::Error;
};

/// A precondition on argument shapes was violated (e.g. vector dimensions).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A model backend (relevance, embedding, llm) failed or returned garbage.
class BackendError : public Error {
public:
    using Error::Error;
};

/// LLM output contained no parseable JSON. Keeps the raw text for the rejects file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// Extraction-stage failure carrying the provenance of the context being processed.
class ExtractionError : public Error {
public:
    using Error::Error;
};

} // namespace cai
