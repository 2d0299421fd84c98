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

#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>
#include <streambuf>

#include "riskrank/corpus.hpp"

using namespace riskrank;

namespace {

std::string random_word(Rng& rng) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
    std::string w;
    auto len = rng.between(1, 9);
    for (std::int64_t i = 0; i < len; ++i) {
        w += letters[rng.below(letters.size())];
    }
    return w;
}

std::string random_text(Rng& rng, std::int64_t max_words) {
    std::string t;
    auto n = rng.between(1, max_words);
    for (std::int64_t i = 0; i < n; ++i) {
        if (i > 0) {
            t += ' ';
        }
        t += random_word(rng);
    }
    return t;
}

std::vector<Document> random_documents(std::size_t n, Rng& rng) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
        Document d;
        d.docno = "s_" + std::to_string(rng.below(50)) + "_" + std::to_string(i) + "_0";
        d.text = random_text(rng, 20);
        if (rng.bernoulli(0.3)) {
            d.pre = random_text(rng, 5);
        }
        if (rng.bernoulli(0.3)) {
            d.post = random_text(rng, 5);
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

// Produces TREC blocks on demand so the whole corpus never exists in memory.
class GeneratedCorpus : public std::streambuf {
  public:
    explicit GeneratedCorpus(std::size_t target_bytes) : target_(target_bytes) {}
    std::size_t produced() const { return produced_; }
    std::size_t documents() const { return count_; }

  protected:
    int_type underflow() override {
        if (produced_ >= target_) {
            return traits_type::eof();
        }
        block_ = "<DOC>\n<DOCNO>s_" + std::to_string(count_ % 997) + "_" + std::to_string(count_) +
                 "_0</DOCNO>\n<TEXT>";
        for (int i = 0; i < 60; ++i) {
            block_ += "lorem ipsum dolor ";
        }
        block_ += "</TEXT>\n</DOC>\n";
        ++count_;
        produced_ += block_.size();
        setg(block_.data(), block_.data(), block_.data() + block_.size());
        return traits_type::to_int_type(block_[0]);
    }

  private:
    std::size_t target_;
    std::size_t produced_ = 0;
    std::size_t count_ = 0;
    std::string block_;
};

}  // namespace

TEST_CASE("parse a single TREC document") {
    auto docs = parse_trec_documents("<DOC><DOCNO>s_0_2_4</DOCNO><TEXT>I feel depressed</TEXT></DOC>");
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].docno == "s_0_2_4");
    CHECK(docs[0].text == "I feel depressed");
    CHECK_FALSE(docs[0].pre.has_value());
    CHECK_FALSE(docs[0].post.has_value());
}

TEST_CASE("empty input parses to nothing") {
    CHECK(parse_trec_documents("").empty());
    CHECK(parse_trec_documents("  \n\t ").empty());
}

TEST_CASE("context fields, case-insensitive tags and trimming") {
    auto docs = parse_trec_documents(
        "<doc>\n <DocNo> d1 </DocNo>\n<PRE>a</PRE><TEXT>  b \n</TEXT><post>c</post></doc>\n\n"
        "<DOC><DOCNO>d2</DOCNO><TEXT>x</TEXT></DOC>");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0] == Document{"d1", "b", "a", "c"});
    CHECK(docs[0].content() == "b");
    CHECK(docs[0].content(true) == "a b c");
    CHECK(docs[1].docno == "d2");
}

TEST_CASE("TREC writer round-trips through the reader") {
    Rng rng(5);
    auto docs = random_documents(300, rng);
    std::ostringstream out;
    write_trec_documents(docs, out);
    CHECK(parse_trec_documents(out.str()) == docs);
}

TEST_CASE("TREC parse errors") {
    SUBCASE("missing docno reports the block offset") {
        std::string input = "<DOC><DOCNO>a</DOCNO><TEXT>x</TEXT></DOC>\n<DOC><TEXT>y</TEXT></DOC>";
        try {
            parse_trec_documents(input);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.location() == input.find("<DOC><TEXT>"));
            CHECK(std::string(e.what()).find("DOCNO") != std::string::npos);
        }
    }
    SUBCASE("unclosed tags") {
        CHECK_THROWS_AS(parse_trec_documents("<DOC><DOCNO>a</DOCNO><TEXT>x</DOC>"), ParseError);
        CHECK_THROWS_AS(parse_trec_documents("<DOC><DOCNO>a</DOCNO><TEXT>x</TEXT>"), ParseError);
    }
    SUBCASE("duplicate docno names the docno") {
        try {
            parse_trec_documents(
                "<DOC><DOCNO>dup</DOCNO><TEXT>x</TEXT></DOC><DOC><DOCNO>dup</DOCNO><TEXT>y</TEXT></DOC>");
            FAIL("expected a duplicate error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("dup") != std::string::npos);
        }
    }
    SUBCASE("duplicates across files share a seen set") {
        std::unordered_set<std::string> seen;
        std::istringstream a("<DOC><DOCNO>x1</DOCNO><TEXT>t</TEXT></DOC>");
        std::istringstream b("<DOC><DOCNO>x1</DOCNO><TEXT>u</TEXT></DOC>");
        TrecReader ra(a, &seen);
        TrecReader rb(b, &seen);
        CHECK(ra.next().has_value());
        CHECK_THROWS_AS(rb.next(), ParseError);
    }
}

TEST_CASE("streaming reader memory is bounded by the largest block") {
    GeneratedCorpus source(100U * 1024U * 1024U);
    std::istream in(&source);
    TrecReader reader(in);
    std::size_t n = 0;
    while (auto doc = reader.next()) {
        ++n;
    }
    CHECK(source.produced() >= 100U * 1024U * 1024U);
    CHECK(n == source.documents());
    // One 1.1 kB block plus the reader's read-ahead window.
    CHECK(reader.peak_buffer_bytes() < 512U * 1024U);
}

TEST_CASE("document store round-trip") {
    std::ostringstream one;
    std::vector<Document> single{{"a", "x", std::nullopt, std::nullopt}};
    write_documents(single, one);
    const std::string line = one.str();
    CHECK(line.find("\"a\"") != std::string::npos);
    CHECK(line.find("\"x\"") != std::string::npos);
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
    CHECK(line.find("pre") == std::string::npos);

    std::ostringstream none;
    CHECK(write_documents(std::vector<Document>{}, none) == 0);
    CHECK(none.str().empty());

    Rng rng(11);
    auto docs = random_documents(1000, rng);
    docs[3].text = "unicode caf\xc3\xa9 \"quoted\" back\\slash";
    std::ostringstream out;
    auto bytes = write_documents(docs, out);
    CHECK(bytes == out.str().size());
    std::istringstream in(out.str());
    CHECK(read_documents(in) == docs);
}

TEST_CASE("qrels parsing") {
    auto q = parse_qrels("3 0 s_0_2_4 1\n");
    REQUIRE(q.size() == 1);
    CHECK(q[0] == Qrel{"3", "s_0_2_4", 1});
    CHECK_THROWS_AS(parse_qrels("3 0 d7 2"), ParseError);
    CHECK_THROWS_AS(parse_qrels("3 0 d7"), ParseError);
    CHECK_THROWS_AS(parse_qrels("3 0 d7 x"), ParseError);
    try {
        parse_qrels("1 0 a 1\n\n1 0 b one\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.location() == 3);
    }
    CHECK_THROWS(parse_qrels("1 0 a 1\n1 0 a 0\n"));
}

TEST_CASE("qrels tallies match a line-count oracle and round-trip") {
    Rng rng(21);
    std::string text;
    std::map<std::string, std::size_t> tally;
    for (int i = 0; i < 500; ++i) {
        std::string qid = std::to_string(1 + rng.below(21));
        text += qid + " 0 d" + std::to_string(i) + " " + std::to_string(rng.below(2)) + "\n";
        ++tally[qid];
    }
    auto qrels = parse_qrels(text);
    CHECK(qrels.size() == 500);
    std::map<std::string, std::size_t> parsed;
    for (const auto& q : qrels) {
        ++parsed[q.question_id];
    }
    CHECK(parsed == tally);
    std::ostringstream out;
    write_qrels(qrels, out);
    CHECK(out.str() == text);
    CHECK(parse_qrels(out.str()) == qrels);
}

TEST_CASE("run format") {
    std::vector<RunEntry> one{{"1", "d1", 1, 0.9, "myrun"}};
    std::ostringstream out;
    write_run(one, out);
    CHECK(out.str() == "1 Q0 d1 1 0.900000 myrun\n");
    CHECK(parse_run(out.str()) == one);

    CHECK_THROWS(parse_run("1 Q0 a 1 0.9 t\n1 Q0 b 3 0.5 t\n"));
    CHECK_THROWS(parse_run("1 Q0 a 1 0.9 t\n1 Q0 b 1 0.5 t\n"));
    CHECK_THROWS(parse_run("1 Q0 a 1 0.5 t\n1 Q0 b 2 0.9 t\n"));
    CHECK_THROWS(parse_run("1 Q0 a 1 0.5\n"));
    CHECK(parse_run("").empty());
}

TEST_CASE("run round-trip over random entries") {
    Rng rng(31);
    std::vector<RunEntry> entries;
    for (int q = 1; q <= 21; ++q) {
        std::size_t n = q == 21 ? 2000 - entries.size() : 95;
        double score = 1.0;
        for (std::size_t r = 1; r <= n; ++r) {
            score -= rng.uniform() * 1e-3;
            entries.push_back({std::to_string(q), "d" + std::to_string(r), r,
                               r % 7 == 0 ? entries.back().score : score, "rt"});
        }
    }
    CHECK(entries.size() == 2000);
    std::ostringstream out;
    write_run(entries, out);
    CHECK(parse_run(out.str()) == entries);
}

TEST_CASE("user_of_docno") {
    CHECK(user_of_docno("s_0_2_4") == "0");
    CHECK(user_of_docno("s_12_0_0") == "12");
    CHECK_THROWS_AS(user_of_docno("bad"), Error);
    auto pattern = UserPattern::parse("-:1");
    CHECK(user_of_docno("u7-3", pattern) == "u7");
    CHECK_THROWS(UserPattern::parse("x"));
}

TEST_CASE("corpus statistics") {
    std::vector<Document> docs{{"s_0_0_0", "a b c", {}, {}}, {"s_0_0_1", "a", {}, {}}};
    auto stats = corpus_stats(docs);
    CHECK(stats.n_users == 1);
    CHECK(stats.n_sentences == 2);
    CHECK(stats.mean_words_per_sentence == 2.0);
    CHECK(stats.median_words_per_sentence == 1.0);
    CHECK(corpus_stats(std::vector<Document>{}) == CorpusStats{});

    Rng rng(41);
    auto many = random_documents(400, rng);
    auto s = corpus_stats(many);
    auto tallies = user_tallies(many);
    std::size_t sentences = 0;
    std::size_t words = 0;
    for (const auto& [user, t] : tallies) {
        sentences += t.sentences;
        words += t.words;
    }
    CHECK(tallies.size() == s.n_users);
    CHECK(sentences == s.n_sentences);
    CHECK(static_cast<double>(words) / static_cast<double>(sentences) ==
          doctest::Approx(s.mean_words_per_sentence));
}
