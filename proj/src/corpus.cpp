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

#include "riskrank/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "text_util.hpp"

namespace riskrank {

using detail::is_space;
using detail::split_whitespace;
using detail::trim;

std::string Document::content(bool use_context) const {
    if (!use_context) {
        return text;
    }
    std::string out;
    auto append = [&out](std::string_view part) {
        if (part.empty()) {
            return;
        }
        if (!out.empty()) {
            out += ' ';
        }
        out += part;
    };
    if (pre) {
        append(*pre);
    }
    append(text);
    if (post) {
        append(*post);
    }
    return out;
}

void validate(const Document& doc) {
    if (doc.docno.empty()) {
        throw Error("document has an empty docno");
    }
    if (doc.text.empty() && (!doc.pre || doc.pre->empty()) && (!doc.post || doc.post->empty())) {
        throw Error("document " + doc.docno + " has no text, pre or post content");
    }
}

namespace {

constexpr std::size_t kReadChunk = 1U << 16U;

char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from) {
    if (from > haystack.size()) {
        return std::string_view::npos;
    }
    auto it = std::search(haystack.begin() + static_cast<std::ptrdiff_t>(from), haystack.end(),
                          needle.begin(), needle.end(),
                          [](char a, char b) { return lower(a) == lower(b); });
    if (it == haystack.end()) {
        return std::string_view::npos;
    }
    return static_cast<std::size_t>(it - haystack.begin());
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](char x, char y) { return lower(x) == lower(y); });
}

constexpr std::array<std::string_view, 4> kFieldTags = {"DOCNO", "TEXT", "PRE", "POST"};

/// Extracts the known fields from the inside of one <DOC> block.
Document parse_block(std::string_view block, std::size_t block_offset) {
    Document doc;
    bool have_docno = false;
    bool have_text = false;
    std::size_t pos = 0;
    while ((pos = block.find('<', pos)) != std::string_view::npos) {
        std::size_t close = block.find('>', pos);
        if (close == std::string_view::npos) {
            break;
        }
        std::string_view name = block.substr(pos + 1, close - pos - 1);
        auto known = std::find_if(kFieldTags.begin(), kFieldTags.end(),
                                  [name](std::string_view tag) { return iequals(tag, name); });
        if (known == kFieldTags.end()) {
            pos = close + 1;
            continue;
        }
        std::string closing = "</" + std::string(*known) + ">";
        std::size_t end = ifind(block, closing, close + 1);
        if (end == std::string_view::npos) {
            throw ParseError("unclosed <" + std::string(*known) + "> tag at byte offset " +
                                 std::to_string(block_offset + pos),
                             block_offset + pos);
        }
        std::string value(trim(block.substr(close + 1, end - close - 1)));
        if (*known == "DOCNO" && !have_docno) {
            doc.docno = std::move(value);
            have_docno = true;
        } else if (*known == "TEXT" && !have_text) {
            doc.text = std::move(value);
            have_text = true;
        } else if (*known == "PRE" && !doc.pre) {
            doc.pre = std::move(value);
        } else if (*known == "POST" && !doc.post) {
            doc.post = std::move(value);
        }
        pos = end + closing.size();
    }
    return doc;
}

}  // namespace

TrecReader::TrecReader(std::istream& in, std::unordered_set<std::string>* seen)
    : in_(in), seen_(seen != nullptr ? seen : &own_seen_) {}

bool TrecReader::fill() {
    if (eof_) {
        return false;
    }
    std::array<char, kReadChunk> chunk{};
    in_.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    auto got = static_cast<std::size_t>(in_.gcount());
    if (got < chunk.size()) {
        eof_ = true;
    }
    buffer_.append(chunk.data(), got);
    peak_buffer_ = std::max(peak_buffer_, buffer_.capacity());
    return got > 0;
}

std::size_t TrecReader::find_tag(std::string_view tag, std::size_t from) {
    for (;;) {
        std::size_t hit = ifind(buffer_, tag, from);
        if (hit != std::string::npos) {
            return hit;
        }
        if (buffer_.size() >= tag.size()) {
            from = std::max(from, buffer_.size() - tag.size() + 1);
        }
        if (!fill() && eof_) {
            hit = ifind(buffer_, tag, from);
            return hit;
        }
    }
}

std::optional<Document> TrecReader::next() {
    std::size_t pos = offset_ - buffer_start_;
    if (pos >= kReadChunk) {
        buffer_.erase(0, pos);
        buffer_start_ = offset_;
        pos = 0;
    }
    for (;;) {
        while (pos < buffer_.size() && is_space(buffer_[pos])) {
            ++pos;
        }
        if (pos < buffer_.size()) {
            break;
        }
        if (!fill()) {
            offset_ = buffer_start_ + buffer_.size();
            return std::nullopt;
        }
    }
    while (buffer_.size() - pos < 5 && fill()) {
    }
    std::size_t doc_offset = buffer_start_ + pos;
    if (!iequals(std::string_view(buffer_).substr(pos, 5), "<DOC>")) {
        throw ParseError("expected <DOC> at byte offset " + std::to_string(doc_offset), doc_offset);
    }
    std::size_t end = find_tag("</DOC>", pos + 5);
    if (end == std::string::npos) {
        throw ParseError("unclosed <DOC> tag at byte offset " + std::to_string(doc_offset),
                         doc_offset);
    }
    std::string_view block = std::string_view(buffer_).substr(pos + 5, end - pos - 5);
    Document doc = parse_block(block, doc_offset + 5);
    if (doc.docno.empty()) {
        throw ParseError("DOC block missing DOCNO at byte offset " + std::to_string(doc_offset),
                         doc_offset);
    }
    if (doc.text.empty() && (!doc.pre || doc.pre->empty()) && (!doc.post || doc.post->empty())) {
        throw ParseError("document " + doc.docno + " at byte offset " +
                             std::to_string(doc_offset) + " has no content",
                         doc_offset);
    }
    if (!seen_->insert(doc.docno).second) {
        throw ParseError("duplicate docno " + doc.docno + " at byte offset " +
                             std::to_string(doc_offset),
                         doc_offset);
    }
    offset_ = buffer_start_ + end + 6;
    return doc;
}

std::vector<Document> parse_trec_documents(std::istream& in) {
    TrecReader reader(in);
    std::vector<Document> docs;
    while (auto doc = reader.next()) {
        docs.push_back(std::move(*doc));
    }
    return docs;
}

std::vector<Document> parse_trec_documents(std::string_view input) {
    std::istringstream in{std::string(input)};
    return parse_trec_documents(in);
}

void write_trec_documents(std::span<const Document> docs, std::ostream& out) {
    auto field = [&out](std::string_view tag, std::string_view value, const Document& doc) {
        std::string closing = "</" + std::string(tag) + ">";
        if (ifind(value, closing, 0) != std::string_view::npos) {
            throw Error("document " + doc.docno + " contains " + closing + " in its " +
                        std::string(tag) + " field");
        }
        out << '<' << tag << '>' << value << closing;
    };
    for (const Document& doc : docs) {
        validate(doc);
        out << "<DOC>";
        field("DOCNO", doc.docno, doc);
        if (doc.pre) {
            field("PRE", *doc.pre, doc);
        }
        field("TEXT", doc.text, doc);
        if (doc.post) {
            field("POST", *doc.post, doc);
        }
        out << "</DOC>\n";
    }
    if (!out) {
        throw Error("failed to write TREC documents");
    }
}

std::size_t write_documents(std::span<const Document> docs, std::ostream& out) {
    std::size_t bytes = 0;
    for (const Document& doc : docs) {
        validate(doc);
        nlohmann::ordered_json record;
        record["docno"] = doc.docno;
        record["text"] = doc.text;
        if (doc.pre) {
            record["pre"] = *doc.pre;
        }
        if (doc.post) {
            record["post"] = *doc.post;
        }
        std::string line;
        try {
            line = record.dump();
        } catch (const nlohmann::json::exception& e) {
            throw Error("document " + doc.docno + " is not valid UTF-8: " + e.what());
        }
        out << line << '\n';
        bytes += line.size() + 1;
    }
    if (!out) {
        throw Error("failed to write documents");
    }
    return bytes;
}

std::vector<Document> read_documents(std::istream& in) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        Document doc;
        try {
            auto record = nlohmann::json::parse(line);
            doc.docno = record.at("docno").get<std::string>();
            doc.text = record.at("text").get<std::string>();
            if (record.contains("pre")) {
                doc.pre = record["pre"].get<std::string>();
            }
            if (record.contains("post")) {
                doc.post = record["post"].get<std::string>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        try {
            validate(doc);
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (!seen.insert(doc.docno).second) {
            throw ParseError("line " + std::to_string(line_no) + ": duplicate docno " + doc.docno,
                             line_no);
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

namespace {

template <typename Int>
bool parse_int(std::string_view s, Int& value) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& value) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::vector<Qrel> parse_qrels(std::istream& in) {
    std::vector<Qrel> qrels;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        auto fail = [line_no](const std::string& why) {
            throw ParseError("qrels line " + std::to_string(line_no) + ": " + why, line_no);
        };
        if (fields.size() != 4) {
            fail("expected 4 columns, found " + std::to_string(fields.size()));
        }
        Qrel q{std::string(fields[0]), std::string(fields[2]), 0};
        if (!parse_int(fields[3], q.relevance)) {
            fail("relevance '" + std::string(fields[3]) + "' is not an integer");
        }
        if (q.relevance != 0 && q.relevance != 1) {
            fail("relevance " + std::to_string(q.relevance) + " is not binary");
        }
        if (!seen.emplace(q.question_id, q.docno).second) {
            fail("duplicate judgment for question " + q.question_id + " and docno " + q.docno);
        }
        qrels.push_back(std::move(q));
    }
    return qrels;
}

std::vector<Qrel> parse_qrels(std::string_view input) {
    std::istringstream in{std::string(input)};
    return parse_qrels(in);
}

void write_qrels(std::span<const Qrel> qrels, std::ostream& out) {
    for (const Qrel& q : qrels) {
        if (q.relevance != 0 && q.relevance != 1) {
            throw Error("relevance must be 0 or 1 for docno " + q.docno);
        }
        out << q.question_id << " 0 " << q.docno << ' ' << q.relevance << '\n';
    }
    if (!out) {
        throw Error("failed to write qrels");
    }
}

void validate_run(std::span<const RunEntry> entries) {
    std::map<std::string, std::vector<const RunEntry*>> by_question;
    for (const RunEntry& e : entries) {
        if (e.question_id.empty() || e.docno.empty()) {
            throw Error("run entry with empty question id or docno");
        }
        if (!std::isfinite(e.score)) {
            throw Error("non-finite score for docno " + e.docno);
        }
        by_question[e.question_id].push_back(&e);
    }
    for (auto& [qid, list] : by_question) {
        if (list.size() > kMaxRunDepth) {
            throw Error("question " + qid + " has " + std::to_string(list.size()) +
                        " entries (limit " + std::to_string(kMaxRunDepth) + ")");
        }
        std::sort(list.begin(), list.end(),
                  [](const RunEntry* a, const RunEntry* b) { return a->rank < b->rank; });
        std::unordered_set<std::string> docnos;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i]->rank != i + 1) {
                throw Error("question " + qid + ": ranks are not contiguous from 1 (found rank " +
                            std::to_string(list[i]->rank) + " at position " +
                            std::to_string(i + 1) + ")");
            }
            if (i > 0 && list[i]->score > list[i - 1]->score) {
                throw Error("question " + qid + ": score increases at rank " +
                            std::to_string(list[i]->rank));
            }
            if (!docnos.insert(list[i]->docno).second) {
                throw Error("question " + qid + ": docno " + list[i]->docno + " ranked twice");
            }
        }
    }
}

std::map<std::string, std::vector<RunEntry>> group_run(std::span<const RunEntry> entries) {
    validate_run(entries);
    std::map<std::string, std::vector<RunEntry>> grouped;
    for (const RunEntry& e : entries) {
        grouped[e.question_id].push_back(e);
    }
    for (auto& [qid, list] : grouped) {
        std::sort(list.begin(), list.end(),
                  [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    }
    return grouped;
}

std::vector<RunEntry> parse_run(std::istream& in) {
    std::vector<RunEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        auto fail = [line_no](const std::string& why) {
            throw ParseError("run line " + std::to_string(line_no) + ": " + why, line_no);
        };
        if (fields.size() != 6) {
            fail("expected 6 columns, found " + std::to_string(fields.size()));
        }
        RunEntry e;
        e.question_id = fields[0];
        e.docno = fields[2];
        e.run_tag = fields[5];
        if (!parse_int(fields[3], e.rank) || e.rank == 0) {
            fail("rank '" + std::string(fields[3]) + "' is not a positive integer");
        }
        if (!parse_double(fields[4], e.score) || !std::isfinite(e.score)) {
            fail("score '" + std::string(fields[4]) + "' is not a finite number");
        }
        entries.push_back(std::move(e));
    }
    validate_run(entries);
    return entries;
}

std::vector<RunEntry> parse_run(std::string_view input) {
    std::istringstream in{std::string(input)};
    return parse_run(in);
}

std::string format_score(double score) {
    std::array<char, 64> buf{};
    int n = std::snprintf(buf.data(), buf.size(), "%.6f", score);
    std::string fixed(buf.data(), static_cast<std::size_t>(n));
    if (std::strtod(fixed.c_str(), nullptr) == score) {
        return fixed;
    }
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), score);
    return {buf.data(), ptr};
}

void write_run(std::span<const RunEntry> entries, std::ostream& out) {
    validate_run(entries);
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunEntry*>> by_question;
    for (const RunEntry& e : entries) {
        auto& list = by_question[e.question_id];
        if (list.empty()) {
            order.push_back(e.question_id);
        }
        list.push_back(&e);
    }
    for (const std::string& qid : order) {
        auto& list = by_question[qid];
        std::sort(list.begin(), list.end(),
                  [](const RunEntry* a, const RunEntry* b) { return a->rank < b->rank; });
        for (const RunEntry* e : list) {
            out << e->question_id << " Q0 " << e->docno << ' ' << e->rank << ' '
                << format_score(e->score) << ' ' << e->run_tag << '\n';
        }
    }
    if (!out) {
        throw Error("failed to write run");
    }
}

UserPattern UserPattern::parse(std::string_view spec) {
    auto colon = spec.rfind(':');
    if (colon != 1) {
        throw Error("user pattern must look like '<delimiter>:<field>', got '" +
                    std::string(spec) + "'");
    }
    UserPattern pattern;
    pattern.delimiter = spec[0];
    if (!parse_int(spec.substr(2), pattern.field) || pattern.field == 0) {
        throw Error("user pattern field index must be a positive integer, got '" +
                    std::string(spec.substr(2)) + "'");
    }
    return pattern;
}

std::string user_of_docno(std::string_view docno, const UserPattern& pattern) {
    std::size_t start = 0;
    for (std::size_t field = 1;; ++field) {
        std::size_t end = docno.find(pattern.delimiter, start);
        if (field == pattern.field) {
            std::string_view value = docno.substr(start, end == std::string_view::npos
                                                             ? std::string_view::npos
                                                             : end - start);
            if (value.empty()) {
                break;
            }
            return std::string(value);
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    throw Error("docno '" + std::string(docno) + "' has no field " +
                std::to_string(pattern.field) + " when split on '" +
                std::string(1, pattern.delimiter) + "'");
}

std::size_t count_words(std::string_view text) {
    return split_whitespace(text).size();
}

namespace {

std::string user_or_self(const std::string& docno, const UserPattern& pattern) {
    try {
        return user_of_docno(docno, pattern);
    } catch (const Error&) {
        return docno;
    }
}

}  // namespace

std::map<std::string, UserTally> user_tallies(std::span<const Document> docs,
                                              const UserPattern& pattern) {
    std::map<std::string, UserTally> tallies;
    for (const Document& doc : docs) {
        UserTally& t = tallies[user_or_self(doc.docno, pattern)];
        ++t.sentences;
        t.words += count_words(doc.text);
    }
    return tallies;
}

void CorpusStatsBuilder::add(const Document& doc) {
    users_.insert(user_or_self(doc.docno, pattern_));
    word_counts_.push_back(count_words(doc.text));
}

CorpusStats CorpusStatsBuilder::finish() const {
    CorpusStats stats;
    stats.n_users = users_.size();
    stats.n_sentences = word_counts_.size();
    if (word_counts_.empty()) {
        return stats;
    }
    std::size_t total = 0;
    for (std::size_t c : word_counts_) {
        total += c;
    }
    stats.mean_words_per_sentence =
        static_cast<double>(total) / static_cast<double>(word_counts_.size());
    std::vector<std::size_t> sorted = word_counts_;
    std::size_t mid = (sorted.size() - 1) / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid),
                     sorted.end());
    stats.median_words_per_sentence = static_cast<double>(sorted[mid]);
    return stats;
}

CorpusStats corpus_stats(std::span<const Document> docs, const UserPattern& pattern) {
    CorpusStatsBuilder builder(pattern);
    for (const Document& doc : docs) {
        builder.add(doc);
    }
    return builder.finish();
}

}  // namespace riskrank
