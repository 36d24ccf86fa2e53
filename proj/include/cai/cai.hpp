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

// Everything except the HTTP backends (cai/remote.hpp), which pull in
// cpp-httplib.

#include "cai/bench.hpp"
#include "cai/commitment.hpp"
#include "cai/config.hpp"
#include "cai/corpus.hpp"
#include "cai/dedup.hpp"
#include "cai/embedding.hpp"
#include "cai/error.hpp"
#include "cai/extract.hpp"
#include "cai/grammar.hpp"
#include "cai/llm.hpp"
#include "cai/pattern.hpp"
#include "cai/pipeline.hpp"
#include "cai/prompt.hpp"
#include "cai/relevance.hpp"
#include "cai/text.hpp"
#include "cai/validate.hpp"
