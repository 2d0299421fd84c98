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
//! TREC documents, qrels and run files.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "riskrank/common.hpp"

namespace riskrank {

/// One TREC record: a sentence plus optional surrounding context.
struct Document {
    std::string docno;
    std::string text;
    std::optional<std::string> pre;
    std::optional<std::string> post;

    /// TEXT alone, or "pre text post" joined by single spaces when
    /// `use_context` is set (absent or empty parts are skipped).
    [[nodiscard]] std::string content(bool use_context = false) const;

    bool operator==(const Document&) const = default;
};

/// Throws Error when the docno is empty or when text, pre and post are all empty.
void validate(const Document& doc);

/**
 * Streaming reader for concatenated <DOC> blocks.
 *
 * Only the current block is buffered, so memory stays bounded by the largest
 * single block. Tag names are matched case-insensitively; field values are
 * trimmed. Docnos are checked for uniqueness against `seen`, which may be
 * shared between readers to detect collisions across files.
 */
class TrecReader {
  public:
    explicit TrecReader(std::istream& in, std::unordered_set<std::string>* seen = nullptr);

    /// Next document, or nullopt at end of input.
    std::optional<Document> next();

    [[nodiscard]] std::size_t peak_buffer_bytes() const noexcept { return peak_buffer_; }
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  private:
    bool fill();
    std::size_t find_tag(std::string_view tag, std::size_t from);

    std::istream& in_;
    std::unordered_set<std::string> own_seen_;
    std::unordered_set<std::string>* seen_;
    std::string buffer_;
    std::size_t buffer_start_ = 0;  // stream offset of buffer_[0]
    std::size_t offset_ = 0;        // stream offset of the next unread byte
    std::size_t peak_buffer_ = 0;
    bool eof_ = false;
};

std::vector<Document> parse_trec_documents(std::istream& in);
std::vector<Document> parse_trec_documents(std::string_view input);

/// Serializes documents as TREC blocks. Throws if a field contains its own
/// closing tag, which could not be parsed back.
void write_trec_documents(std::span<const Document> docs, std::ostream& out);

/// Canonical store: one JSON object per line with keys docno/text/pre/post
/// (absent optional keys omitted). Returns the number of bytes written.
std::size_t write_documents(std::span<const Document> docs, std::ostream& out);
std::vector<Document> read_documents(std::istream& in);

/// Relevance judgment: `<qid> 0 <docno> <rel>`.
struct Qrel {
    std::string question_id;
    std::string docno;
    int relevance = 0;

    bool operator==(const Qrel&) const = default;
};

std::vector<Qrel> parse_qrels(std::istream& in);
std::vector<Qrel> parse_qrels(std::string_view input);
void write_qrels(std::span<const Qrel> qrels, std::ostream& out);

/// Ranked-run row: `<qid> Q0 <docno> <rank> <score> <tag>`.
struct RunEntry {
    std::string question_id;
    std::string docno;
    std::size_t rank = 0;
    double score = 0.0;
    std::string run_tag;

    bool operator==(const RunEntry&) const = default;
};

inline constexpr std::size_t kMaxRunDepth = 1000;

/// Checks per-question invariants: ranks 1..k contiguous without duplicates,
/// scores finite and non-increasing with rank, at most kMaxRunDepth entries.
void validate_run(std::span<const RunEntry> entries);

/// Groups a validated run by question, each list in rank order.
std::map<std::string, std::vector<RunEntry>> group_run(std::span<const RunEntry> entries);

std::vector<RunEntry> parse_run(std::istream& in);
std::vector<RunEntry> parse_run(std::string_view input);

/// Emits each question's entries (questions in first-appearance order) in rank
/// order. Scores are printed with six decimals unless that would lose
/// precision, in which case the shortest exact representation is used.
void write_run(std::span<const RunEntry> entries, std::ostream& out);
std::string format_score(double score);

/// Where the user id lives inside a docno.
struct UserPattern {
    char delimiter = '_';
    std::size_t field = 2;  // 1-based

    /// Parses "<delimiter>:<field>", e.g. "_:2".
    static UserPattern parse(std::string_view spec);
};

std::string user_of_docno(std::string_view docno, const UserPattern& pattern = {});

struct CorpusStats {
    std::size_t n_users = 0;
    std::size_t n_sentences = 0;
    double mean_words_per_sentence = 0.0;
    double median_words_per_sentence = 0.0;

    bool operator==(const CorpusStats&) const = default;
};

struct UserTally {
    std::size_t sentences = 0;
    std::size_t words = 0;
};

/// Per-user sentence and word counts. A docno that does not match the
/// pattern is its own user.
std::map<std::string, UserTally> user_tallies(std::span<const Document> docs,
                                              const UserPattern& pattern = {});

/// Words are whitespace-separated tokens of TEXT; the median is the lower
/// median for even counts.
CorpusStats corpus_stats(std::span<const Document> docs, const UserPattern& pattern = {});

/// Accumulates statistics one document at a time (for streamed ingestion).
class CorpusStatsBuilder {
  public:
    explicit CorpusStatsBuilder(UserPattern pattern = {}) : pattern_(pattern) {}
    void add(const Document& doc);
    [[nodiscard]] CorpusStats finish() const;

  private:
    UserPattern pattern_;
    std::unordered_set<std::string> users_;
    std::vector<std::size_t> word_counts_;
};

std::size_t count_words(std::string_view text);

}  // namespace riskrank
