// Copyright 2026 riskrank developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! \file
//! Text cleaning, tokenization, stemming, degenerate-text filtering and
//! chronological chunking of user histories.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "riskrank/corpus.hpp"
#include "riskrank/history.hpp"

namespace riskrank {

/// Drops http(s) URLs and '#'-prefixed tokens, then every character other
/// than letters, digits, whitespace and apostrophes; collapses whitespace.
/// Non-ASCII code points count as letters.
std::string clean_text(std::string_view text);

/// Lowercases and splits on anything that is not a letter, digit or apostrophe.
std::vector<std::string> tokenize(std::string_view text);

using Stoplist = std::unordered_set<std::string>;

/// One lowercase word per line; '#' starts a comment.
Stoplist load_stoplist(std::istream& in);
Stoplist load_stoplist(const std::filesystem::path& path);

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const Stoplist& stoplist);

/// One pass of the published Porter (1980) algorithm.
std::string porter_stem(std::string_view word);

/// porter_stem applied until the word stops changing, so stem(stem(w)) == stem(w).
std::string stem(std::string_view word);

inline constexpr int kDefaultCompressionLevel = 6;

/// gzip-compressed size over raw size. Throws on empty input.
double compression_ratio(std::string_view text, int level = kDefaultCompressionLevel);

struct FilterConfig {
    double ratio_min = 0.6;
    double ratio_max = 1.1;
    std::size_t min_tokens = 1;
    double prefilter_threshold = 0.0;

    void validate() const;
};

/// Keeps docs whose ratio lies in [ratio_min, ratio_max], whose token count is
/// at least min_tokens, and whose prefilter score reaches the threshold
/// (missing scores count as 0). `ratios` is parallel to `docs`.
std::vector<Document> filter_documents(std::span<const Document> docs,
                                       std::span<const double> ratios,
                                       const std::unordered_map<std::string, double>& prefilter_scores,
                                       const FilterConfig& cfg, bool use_context = false);

/// Same, computing ratios at the default compression level. Documents whose
/// content is empty are dropped.
std::vector<Document> filter_documents(std::span<const Document> docs,
                                       const std::unordered_map<std::string, double>& prefilter_scores,
                                       const FilterConfig& cfg, bool use_context = false);

/// Shared text pipeline: optional cleaning, tokenization, stopword removal
/// and stemming.
struct TextPipeline {
    bool clean = true;
    const Stoplist* stopwords = nullptr;
    bool stem = false;

    std::vector<std::string> operator()(std::string_view text) const;
};

inline constexpr std::size_t kChunkTokens = 510;

struct Chunk {
    std::string user_id;
    std::size_t index = 0;
    std::vector<std::string> tokens;

    /// "<user_id>#<index>", used as the docno of chunk embeddings.
    [[nodiscard]] std::string id() const;

    bool operator==(const Chunk&) const = default;
};

/// Concatenates the posts' tokens in ascending timestamp order and cuts the
/// stream into chunks of exactly n tokens plus a final remainder. Throws if the
/// history has no tokens or the timestamps are not distinct.
std::vector<Chunk> chunk_user_history(const UserHistory& history, std::size_t n = kChunkTokens,
                                      const TextPipeline& pipeline = {});

}  // namespace riskrank
