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
//! Synthetic corpora with planted signal, a hashing embedder standing in for
//! a sentence encoder, and brute-force metric oracles.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskrank/corpus.hpp"
#include "riskrank/eval.hpp"
#include "riskrank/features.hpp"
#include "riskrank/history.hpp"
#include "riskrank/preprocess.hpp"
#include "riskrank/word2vec.hpp"

namespace riskrank {

/// Distinct lowercase pseudo-words built from consonant-vowel syllables.
std::vector<std::string> pseudo_words(std::size_t count, Rng& rng,
                                      std::span<const std::string> exclude = {});

/// Zipf(s) sampler over ranks 0..n-1.
DiscreteSampler zipf_sampler(std::size_t n, double exponent);

struct SynthConfig {
    std::size_t n_questions = 21;
    std::size_t keywords_per_topic = 5;
    /// Optional explicit keyword lists, one per question; generated when empty.
    std::vector<std::vector<std::string>> topic_keywords;
    std::size_t n_users = 400;
    std::size_t min_docs_per_user = 30;
    std::size_t max_docs_per_user = 70;
    std::size_t min_words = 15;
    std::size_t max_words = 30;
    double relevance_rate = 0.25;   // docs relevant to some question
    double borderline_rate = 0.05;  // docs carrying a single keyword
    double majority_fraction = 0.2; // borderline docs judged relevant by majority only
    double degenerate_rate = 0.01;  // repeated-fragment docs
    std::size_t judged_negatives = 400;  // sampled non-relevant judgments per question
    std::size_t vocab_size = 5000;
    double zipf_exponent = 1.1;
    std::uint64_t seed = 42;

    void validate() const;
};

struct RankingCorpus {
    std::vector<Document> documents;
    std::vector<Qrel> qrels_majority;
    std::vector<Qrel> qrels_unanimity;
    std::vector<std::vector<std::string>> topic_keywords;
    std::vector<std::string> degenerate_docnos;
};

/// Relevant docs for question q carry 2-4 of q's keywords; borderline docs
/// carry exactly one. Docnos look like "s_<user>_<post>_<sentence>".
RankingCorpus generate_ranking_corpus(const SynthConfig& cfg = {});

/// Deterministic hash split: true for roughly `fraction` of docnos.
bool in_holdout(std::string_view docno, std::uint64_t seed, double fraction = 0.5);

struct HistoryConfig {
    std::size_t n_users = 74;
    std::size_t min_posts = 12;
    std::size_t max_posts = 1143;
    std::size_t min_words = 8;
    std::size_t max_words = 30;
    std::size_t lexicon_per_tier = 12;  // lexicon words per answer level 0..6
    double slope = 0.35;        // lexicon share of words per unit of (mean answer + 1) / 7
    double link_noise = 0.25;   // sd of the per-user jitter on the signal's severity
    double answer_noise = 0.5;  // sd of item answers around the user's severity
    double tier_width = 0.75;   // kernel width over lexicon tiers
    std::size_t vocab_size = 5000;
    double zipf_exponent = 1.1;
    std::string user_prefix = "subject";
    std::uint64_t seed = 7;        // users, answers and posts
    std::uint64_t vocab_seed = 11; // lexicon and noise words; share it across populations

    void validate() const;
};

struct HistoryCorpus {
    std::vector<UserHistory> histories;
    std::vector<QuestionnaireAnswers> truths;
    std::vector<std::vector<std::string>> lexicon_tiers;
    std::vector<double> severity;
};

/// Severity ~ U[0, 6]; each item answer is round(severity + noise) clamped
/// to 0..6. A lexicon share of each post grows linearly with the user's mean
/// answer (slope 0 removes it entirely).
HistoryCorpus generate_user_histories(const HistoryConfig& cfg = {});

struct TwoTopicCorpus {
    TokenDocs sentences;
    std::vector<std::string> topic_a;
    std::vector<std::string> topic_b;
};

/// Sentences each drawn from one of two disjoint keyword sets plus shared
/// Zipf noise.
TwoTopicCorpus generate_two_topic_corpus(std::size_t n_sentences = 2000,
                                         std::size_t keywords_per_topic = 10,
                                         std::uint64_t seed = 3);

struct TopicCosines {
    double intra = 0.0;  // mean cosine over keyword pairs from the same topic
    double inter = 0.0;  // mean cosine over keyword pairs from different topics
};

TopicCosines topic_cosines(const Word2VecModel& model, std::span<const std::string> topic_a,
                           std::span<const std::string> topic_b);

/**
 * Stand-in for a sentence encoder: every token maps to a fixed Gaussian
 * vector derived from its hash and the seed, and a text maps to the mean of
 * its token vectors.
 */
class HashEmbedder {
  public:
    explicit HashEmbedder(std::size_t dim = 768, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {}

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::vector<double> token_vector(std::string_view token) const;
    [[nodiscard]] std::vector<double> embed(std::span<const std::string> tokens) const;
    /// One row per token list, ids taken from `ids`.
    [[nodiscard]] FeatureMatrix embed_all(const TokenDocs& docs, std::vector<std::string> ids) const;
    [[nodiscard]] FeatureMatrix embed_chunks(std::span<const Chunk> chunks) const;

  private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Reference metrics recomputed by rescanning run prefixes.
RankMetrics oracle_rank_metrics(std::span<const RunEntry> run, std::span<const Qrel> qrels);

QuestionnaireMetrics oracle_questionnaire_metrics(std::span<const QuestionnaireAnswers> pred,
                                                  std::span<const QuestionnaireAnswers> truth,
                                                  const SubscaleMap& map);

}  // namespace riskrank
