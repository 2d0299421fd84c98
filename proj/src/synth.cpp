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

#include "riskrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace riskrank {

std::vector<std::string> pseudo_words(std::size_t count, Rng& rng,
                                      std::span<const std::string> exclude) {
    static constexpr std::string_view consonants = "bcdfghjklmnprstvwxz";
    static constexpr std::string_view vowels = "aeiouy";
    std::unordered_set<std::string> seen(exclude.begin(), exclude.end());
    std::vector<std::string> out;
    out.reserve(count);
    while (out.size() < count) {
        std::size_t syllables = 2 + rng.below(3);
        std::string w;
        for (std::size_t s = 0; s < syllables; ++s) {
            w += consonants[rng.below(consonants.size())];
            w += vowels[rng.below(vowels.size())];
        }
        if (rng.bernoulli(0.5)) {
            w += consonants[rng.below(consonants.size())];
        }
        if (seen.insert(w).second) {
            out.push_back(std::move(w));
        }
    }
    return out;
}

DiscreteSampler zipf_sampler(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) {
        w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    }
    return DiscreteSampler(w);
}

void SynthConfig::validate() const {
    if (n_questions == 0 || n_users == 0 || vocab_size == 0) {
        throw Error("synth: n_questions, n_users and vocab_size must be positive");
    }
    if (min_docs_per_user == 0 || min_docs_per_user > max_docs_per_user) {
        throw Error("synth: docs per user range is empty");
    }
    if (min_words == 0 || min_words > max_words) {
        throw Error("synth: words per document range is empty");
    }
    for (double r : {relevance_rate, borderline_rate, majority_fraction, degenerate_rate}) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw Error("synth: rates must lie in [0, 1]");
        }
    }
    if (!(relevance_rate > 0.0 && relevance_rate < 1.0)) {
        throw Error("synth: relevance_rate must lie in (0, 1)");
    }
    if (relevance_rate + borderline_rate + degenerate_rate >= 1.0) {
        throw Error("synth: relevance, borderline and degenerate rates must sum below 1");
    }
    if (!(zipf_exponent > 0.0)) {
        throw Error("synth: zipf exponent must be positive");
    }
    if (!topic_keywords.empty()) {
        if (topic_keywords.size() != n_questions) {
            throw Error("synth: need one keyword list per question");
        }
        std::set<std::string> all;
        for (const auto& list : topic_keywords) {
            if (list.size() < 4) {
                throw Error("synth: each topic needs at least 4 keywords");
            }
            for (const auto& k : list) {
                if (!all.insert(k).second) {
                    throw Error("synth: keyword '" + k + "' appears in more than one topic");
                }
            }
        }
    } else if (keywords_per_topic < 4) {
        throw Error("synth: keywords_per_topic must be at least 4");
    }
}

namespace {

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out += ' ';
        }
        out += w;
    }
    return out;
}

// k distinct entries of `pool`.
std::vector<std::string> pick_distinct(const std::vector<std::string>& pool, std::size_t k,
                                       Rng& rng) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
        out.push_back(pool[idx[i]]);
    }
    return out;
}

void insert_randomly(std::vector<std::string>& words, const std::vector<std::string>& extra,
                     Rng& rng) {
    for (const auto& e : extra) {
        auto pos = static_cast<std::ptrdiff_t>(rng.below(words.size() + 1));
        words.insert(words.begin() + pos, e);
    }
}

}  // namespace

RankingCorpus generate_ranking_corpus(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    RankingCorpus out;
    std::vector<std::string> used;
    if (cfg.topic_keywords.empty()) {
        auto words = pseudo_words(cfg.n_questions * cfg.keywords_per_topic, rng);
        for (std::size_t q = 0; q < cfg.n_questions; ++q) {
            out.topic_keywords.emplace_back(
                words.begin() + static_cast<std::ptrdiff_t>(q * cfg.keywords_per_topic),
                words.begin() + static_cast<std::ptrdiff_t>((q + 1) * cfg.keywords_per_topic));
        }
    } else {
        out.topic_keywords = cfg.topic_keywords;
    }
    for (const auto& list : out.topic_keywords) {
        used.insert(used.end(), list.begin(), list.end());
    }
    const auto noise = pseudo_words(cfg.vocab_size, rng, used);
    const auto zipf = zipf_sampler(noise.size(), cfg.zipf_exponent);

    auto noise_words = [&](std::size_t n) {
        std::vector<std::string> w;
        w.reserve(n + 4);
        for (std::size_t i = 0; i < n; ++i) {
            w.push_back(noise[zipf(rng)]);
        }
        return w;
    };

    const std::size_t nq = cfg.n_questions;
    std::vector<std::vector<std::size_t>> relevant(nq);
    std::vector<std::vector<std::size_t>> borderline(nq);
    std::size_t relevant_count = 0;
    std::size_t borderline_count = 0;
    for (std::size_t u = 0; u < cfg.n_users; ++u) {
        auto n_docs = static_cast<std::size_t>(rng.between(
            static_cast<std::int64_t>(cfg.min_docs_per_user),
            static_cast<std::int64_t>(cfg.max_docs_per_user)));
        std::size_t post = 0;
        std::size_t sentence = 0;
        for (std::size_t d = 0; d < n_docs; ++d) {
            Document doc;
            doc.docno = "s_" + std::to_string(u) + "_" + std::to_string(post) + "_" +
                        std::to_string(sentence);
            // Posts hold 1-3 sentences.
            if (++sentence >= 3 || rng.bernoulli(0.4)) {
                ++post;
                sentence = 0;
            }
            const std::size_t index = out.documents.size();
            double r = rng.uniform();
            auto len = static_cast<std::size_t>(rng.between(
                static_cast<std::int64_t>(cfg.min_words), static_cast<std::int64_t>(cfg.max_words)));
            if (r < cfg.degenerate_rate) {
                auto fragment = noise_words(1 + rng.below(3));
                std::size_t repeats = 20 + rng.below(41);
                std::vector<std::string> words;
                for (std::size_t k = 0; k < repeats; ++k) {
                    words.insert(words.end(), fragment.begin(), fragment.end());
                }
                doc.text = join_words(words);
                out.degenerate_docnos.push_back(doc.docno);
            } else if (r < cfg.degenerate_rate + cfg.relevance_rate) {
                std::size_t q = relevant_count++ % nq;
                auto words = noise_words(len);
                auto k = static_cast<std::size_t>(rng.between(2, 4));
                k = std::min(k, out.topic_keywords[q].size());
                insert_randomly(words, pick_distinct(out.topic_keywords[q], k, rng), rng);
                doc.text = join_words(words);
                relevant[q].push_back(index);
            } else if (r < cfg.degenerate_rate + cfg.relevance_rate + cfg.borderline_rate) {
                std::size_t q = borderline_count++ % nq;
                auto words = noise_words(len);
                insert_randomly(words, pick_distinct(out.topic_keywords[q], 1, rng), rng);
                doc.text = join_words(words);
                borderline[q].push_back(index);
            } else {
                doc.text = join_words(noise_words(len));
            }
            out.documents.push_back(std::move(doc));
        }
    }

    const std::size_t n_docs = out.documents.size();
    for (std::size_t q = 0; q < nq; ++q) {
        const std::string qid = std::to_string(q + 1);
        std::map<std::string, std::pair<int, int>> judged;  // docno -> (majority, unanimity)
        for (std::size_t i : relevant[q]) {
            judged[out.documents[i].docno] = {1, 1};
        }
        for (std::size_t i : borderline[q]) {
            judged[out.documents[i].docno] = {rng.bernoulli(cfg.majority_fraction) ? 1 : 0, 0};
        }
        std::size_t target = std::min(cfg.judged_negatives, n_docs - judged.size());
        std::size_t added = 0;
        while (added < target) {
            const auto& docno = out.documents[rng.below(n_docs)].docno;
            if (judged.emplace(docno, std::pair{0, 0}).second) {
                ++added;
            }
        }
        for (const auto& [docno, rel] : judged) {
            out.qrels_majority.push_back({qid, docno, rel.first});
            out.qrels_unanimity.push_back({qid, docno, rel.second});
        }
    }
    return out;
}

bool in_holdout(std::string_view docno, std::uint64_t seed, double fraction) {
    std::uint64_t h = mix64(fnv1a(docno) ^ mix64(seed));
    return static_cast<double>(h >> 11U) * 0x1.0p-53 < fraction;
}

void HistoryConfig::validate() const {
    if (n_users == 0 || vocab_size == 0 || lexicon_per_tier == 0) {
        throw Error("history synth: n_users, vocab_size and lexicon_per_tier must be positive");
    }
    if (min_posts == 0 || min_posts > max_posts) {
        throw Error("history synth: posts per user range is empty");
    }
    if (min_words == 0 || min_words > max_words) {
        throw Error("history synth: words per post range is empty");
    }
    if (!(slope >= 0.0) || !(link_noise >= 0.0) || !(answer_noise >= 0.0) ||
        !(tier_width > 0.0) || !(zipf_exponent > 0.0)) {
        throw Error("history synth: slope and noises must be non-negative, widths positive");
    }
    if (user_prefix.empty() || user_prefix.find_first_of(" \t#") != std::string::npos) {
        throw Error("history synth: user prefix must be a token without '#'");
    }
}

HistoryCorpus generate_user_histories(const HistoryConfig& cfg) {
    cfg.validate();
    constexpr std::size_t kTiers = kMaxAnswer + 1;
    Rng vocab_rng(cfg.vocab_seed);
    auto lexicon = pseudo_words(kTiers * cfg.lexicon_per_tier, vocab_rng);
    const auto noise = pseudo_words(cfg.vocab_size, vocab_rng, lexicon);
    Rng rng(cfg.seed);
    const auto zipf = zipf_sampler(noise.size(), cfg.zipf_exponent);
    HistoryCorpus out;
    for (std::size_t t = 0; t < kTiers; ++t) {
        out.lexicon_tiers.emplace_back(
            lexicon.begin() + static_cast<std::ptrdiff_t>(t * cfg.lexicon_per_tier),
            lexicon.begin() + static_cast<std::ptrdiff_t>((t + 1) * cfg.lexicon_per_tier));
    }
    const double log_min = std::log(static_cast<double>(cfg.min_posts));
    const double log_max = std::log(static_cast<double>(cfg.max_posts));
    const std::size_t width = std::to_string(cfg.n_users - 1).size();
    for (std::size_t u = 0; u < cfg.n_users; ++u) {
        std::string id = std::to_string(u);
        id = cfg.user_prefix + std::string(width - id.size(), '0') + id;
        double severity = rng.uniform(0.0, static_cast<double>(kMaxAnswer));
        QuestionnaireAnswers truth{id, {}};
        double mean = 0.0;
        for (std::size_t i = 0; i < kQuestionnaireItems; ++i) {
            double v = std::round(severity + cfg.answer_noise * rng.normal());
            int a = static_cast<int>(std::clamp(v, 0.0, static_cast<double>(kMaxAnswer)));
            truth.answers.push_back(a);
            mean += a;
        }
        mean /= static_cast<double>(kQuestionnaireItems);
        double signal = mean + cfg.link_noise * rng.normal();
        double rate = std::clamp(cfg.slope * (signal + 1.0) / 7.0, 0.0, 0.9);
        std::vector<double> tier_weights(kTiers);
        for (std::size_t t = 0; t < kTiers; ++t) {
            double z = (static_cast<double>(t) - signal) / cfg.tier_width;
            tier_weights[t] = std::exp(-0.5 * z * z) + 1e-12;
        }
        DiscreteSampler tiers(tier_weights);

        auto n_posts = static_cast<std::size_t>(std::llround(std::exp(rng.uniform(log_min, log_max))));
        n_posts = std::clamp(n_posts, cfg.min_posts, cfg.max_posts);
        UserHistory history{id, {}};
        std::int64_t ts = 1'600'000'000 + static_cast<std::int64_t>(rng.below(10'000'000));
        for (std::size_t p = 0; p < n_posts; ++p) {
            ts += rng.between(60, 86'400);
            auto len = static_cast<std::size_t>(rng.between(
                static_cast<std::int64_t>(cfg.min_words), static_cast<std::int64_t>(cfg.max_words)));
            std::vector<std::string> words;
            words.reserve(len);
            for (std::size_t w = 0; w < len; ++w) {
                if (rate > 0.0 && rng.bernoulli(rate)) {
                    const auto& tier = out.lexicon_tiers[tiers(rng)];
                    words.push_back(tier[rng.below(tier.size())]);
                } else {
                    words.push_back(noise[zipf(rng)]);
                }
            }
            history.posts.push_back({ts, join_words(words)});
        }
        out.histories.push_back(std::move(history));
        out.truths.push_back(std::move(truth));
        out.severity.push_back(severity);
    }
    return out;
}

TwoTopicCorpus generate_two_topic_corpus(std::size_t n_sentences, std::size_t keywords_per_topic,
                                         std::uint64_t seed) {
    if (n_sentences < 2 || keywords_per_topic < 2) {
        throw Error("two-topic corpus needs at least 2 sentences and 2 keywords per topic");
    }
    Rng rng(seed);
    TwoTopicCorpus out;
    auto keywords = pseudo_words(2 * keywords_per_topic, rng);
    out.topic_a.assign(keywords.begin(), keywords.begin() + static_cast<std::ptrdiff_t>(keywords_per_topic));
    out.topic_b.assign(keywords.begin() + static_cast<std::ptrdiff_t>(keywords_per_topic), keywords.end());
    const auto noise = pseudo_words(2000, rng, keywords);
    const auto zipf = zipf_sampler(noise.size(), 1.1);
    for (std::size_t s = 0; s < n_sentences; ++s) {
        const auto& topic = s % 2 == 0 ? out.topic_a : out.topic_b;
        std::vector<std::string> sentence;
        for (std::size_t w = 0; w < 12; ++w) {
            if (rng.bernoulli(0.4)) {
                sentence.push_back(topic[rng.below(topic.size())]);
            } else {
                sentence.push_back(noise[zipf(rng)]);
            }
        }
        out.sentences.push_back(std::move(sentence));
    }
    return out;
}

TopicCosines topic_cosines(const Word2VecModel& model, std::span<const std::string> topic_a,
                           std::span<const std::string> topic_b) {
    auto vec = [&](const std::string& w) {
        auto idx = model.index(w);
        if (!idx) {
            throw Error("keyword '" + w + "' is not in the word2vec vocabulary");
        }
        return model.vector(*idx);
    };
    double intra = 0.0;
    std::size_t n_intra = 0;
    for (auto topic : {topic_a, topic_b}) {
        for (std::size_t i = 0; i < topic.size(); ++i) {
            for (std::size_t j = i + 1; j < topic.size(); ++j) {
                intra += cosine(vec(topic[i]), vec(topic[j]));
                ++n_intra;
            }
        }
    }
    double inter = 0.0;
    std::size_t n_inter = 0;
    for (const auto& a : topic_a) {
        for (const auto& b : topic_b) {
            inter += cosine(vec(a), vec(b));
            ++n_inter;
        }
    }
    return {n_intra ? intra / static_cast<double>(n_intra) : 0.0,
            n_inter ? inter / static_cast<double>(n_inter) : 0.0};
}

std::vector<double> HashEmbedder::token_vector(std::string_view token) const {
    Rng rng(fnv1a(token) ^ mix64(seed_));
    std::vector<double> v(dim_);
    for (double& x : v) {
        x = rng.normal();
    }
    return v;
}

std::vector<double> HashEmbedder::embed(std::span<const std::string> tokens) const {
    std::vector<double> out(dim_, 0.0);
    for (const auto& t : tokens) {
        auto v = token_vector(t);
        for (std::size_t j = 0; j < dim_; ++j) {
            out[j] += v[j];
        }
    }
    if (!tokens.empty()) {
        for (double& x : out) {
            x /= static_cast<double>(tokens.size());
        }
    }
    return out;
}

FeatureMatrix HashEmbedder::embed_all(const TokenDocs& docs, std::vector<std::string> ids) const {
    if (docs.size() != ids.size()) {
        throw Error("embed_all: token documents and ids differ in length");
    }
    std::unordered_map<std::string, std::vector<double>> cache;
    std::vector<double> values;
    values.reserve(docs.size() * dim_);
    std::vector<double> row(dim_);
    for (const auto& doc : docs) {
        std::fill(row.begin(), row.end(), 0.0);
        for (const auto& t : doc) {
            auto it = cache.find(t);
            if (it == cache.end()) {
                it = cache.emplace(t, token_vector(t)).first;
            }
            for (std::size_t j = 0; j < dim_; ++j) {
                row[j] += it->second[j];
            }
        }
        if (!doc.empty()) {
            for (double& x : row) {
                x /= static_cast<double>(doc.size());
            }
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    return FeatureMatrix::dense(std::move(ids), dim_, std::move(values));
}

FeatureMatrix HashEmbedder::embed_chunks(std::span<const Chunk> chunks) const {
    TokenDocs docs;
    std::vector<std::string> ids;
    for (const auto& c : chunks) {
        docs.push_back(c.tokens);
        ids.push_back(c.id());
    }
    return embed_all(docs, std::move(ids));
}

RankMetrics oracle_rank_metrics(std::span<const RunEntry> run, std::span<const Qrel> qrels) {
    validate_run(run);
    // Question ids with their relevant docnos, found by linear scans.
    std::vector<std::string> qids;
    for (const auto& q : qrels) {
        if (std::find(qids.begin(), qids.end(), q.question_id) == qids.end()) {
            qids.push_back(q.question_id);
        }
    }
    auto is_relevant = [&](const std::string& qid, const std::string& docno) {
        for (const auto& q : qrels) {
            if (q.question_id == qid && q.docno == docno && q.relevance > 0) {
                return true;
            }
        }
        return false;
    };
    RankMetrics m;
    double sum_ap = 0.0;
    double sum_rp = 0.0;
    double sum_p10 = 0.0;
    double sum_ndcg = 0.0;
    for (const auto& qid : qids) {
        std::set<std::string> rel_docs;
        for (const auto& q : qrels) {
            if (q.question_id == qid && q.relevance > 0) {
                rel_docs.insert(q.docno);
            }
        }
        const std::size_t r = rel_docs.size();
        if (r == 0) {
            ++m.skipped;
            continue;
        }
        ++m.evaluated;
        // The question's ranked list, rebuilt by looking up each rank in turn.
        std::vector<std::string> ranked;
        for (std::size_t rank = 1;; ++rank) {
            const RunEntry* found = nullptr;
            for (const auto& e : run) {
                if (e.question_id == qid && e.rank == rank) {
                    found = &e;
                }
            }
            if (found == nullptr) {
                break;
            }
            ranked.push_back(found->docno);
        }
        auto hits_in_prefix = [&](std::size_t len) {
            std::size_t h = 0;
            for (std::size_t i = 0; i < len && i < ranked.size(); ++i) {
                h += is_relevant(qid, ranked[i]) ? 1 : 0;
            }
            return h;
        };
        double ap = 0.0;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (is_relevant(qid, ranked[i])) {
                ap += static_cast<double>(hits_in_prefix(i + 1)) / static_cast<double>(i + 1);
            }
        }
        sum_ap += ap / static_cast<double>(r);
        sum_rp += static_cast<double>(hits_in_prefix(r)) / static_cast<double>(r);
        sum_p10 += static_cast<double>(hits_in_prefix(10)) / 10.0;
        std::vector<int> gains;
        for (const auto& d : ranked) {
            gains.push_back(is_relevant(qid, d) ? 1 : 0);
        }
        std::vector<int> ideal(r, 1);
        auto dcg = [](const std::vector<int>& g) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                s += g[i] / std::log2(static_cast<double>(i + 2));
            }
            return s;
        };
        sum_ndcg += dcg(gains) / dcg(ideal);
    }
    if (m.evaluated > 0) {
        auto n = static_cast<double>(m.evaluated);
        m.map = sum_ap / n;
        m.r_prec = sum_rp / n;
        m.p_at_10 = sum_p10 / n;
        m.ndcg = sum_ndcg / n;
    }
    return m;
}

QuestionnaireMetrics oracle_questionnaire_metrics(std::span<const QuestionnaireAnswers> pred,
                                                  std::span<const QuestionnaireAnswers> truth,
                                                  const SubscaleMap& map) {
    const auto& items = default_item_ids();
    map.validate(items);
    if (truth.empty() || pred.size() != truth.size()) {
        throw Error("oracle: prediction and truth user sets differ");
    }
    std::vector<const QuestionnaireAnswers*> matched;
    for (const auto& t : truth) {
        validate(t);
        const QuestionnaireAnswers* hit = nullptr;
        for (const auto& p : pred) {
            if (p.user_id == t.user_id) {
                if (hit != nullptr) {
                    throw Error("oracle: duplicate prediction for " + t.user_id);
                }
                hit = &p;
            }
        }
        if (hit == nullptr) {
            throw Error("oracle: no prediction for " + t.user_id);
        }
        validate(*hit);
        matched.push_back(hit);
    }
    QuestionnaireMetrics m;
    double abs_sum = 0.0;
    double wrong = 0.0;
    double cells = 0.0;
    std::map<int, std::vector<int>> errors_by_class;
    for (std::size_t u = 0; u < truth.size(); ++u) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            int p = matched[u]->answers[i];
            int t = truth[u].answers[i];
            abs_sum += std::abs(p - t);
            wrong += p == t ? 0.0 : 1.0;
            cells += 1.0;
            errors_by_class[t].push_back(std::abs(p - t));
        }
    }
    m.mae = abs_sum / cells;
    m.mzoe = wrong / cells;
    double macro = 0.0;
    for (const auto& [c, errs] : errors_by_class) {
        double s = 0.0;
        for (int e : errs) {
            s += e;
        }
        macro += s / static_cast<double>(errs.size());
    }
    m.mae_macro = macro / static_cast<double>(errors_by_class.size());

    auto answer_of = [&](const QuestionnaireAnswers& a, const std::string& item) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i] == item) {
                return a.answers[i];
            }
        }
        throw Error("oracle: unknown item " + item);
    };
    auto subscale = [&](const QuestionnaireAnswers& a, const std::vector<std::string>& ids) {
        double s = 0.0;
        for (const auto& id : ids) {
            s += answer_of(a, id);
        }
        return s / static_cast<double>(ids.size());
    };
    const std::vector<std::string>* lists[] = {&map.restraint, &map.eating_concern,
                                               &map.shape_concern, &map.weight_concern};
    double sq[5] = {0, 0, 0, 0, 0};
    for (std::size_t u = 0; u < truth.size(); ++u) {
        double global_p = 0.0;
        double global_t = 0.0;
        for (int k = 0; k < 4; ++k) {
            double sp = subscale(*matched[u], *lists[k]);
            double st = subscale(truth[u], *lists[k]);
            sq[k] += (sp - st) * (sp - st);
            global_p += sp / 4.0;
            global_t += st / 4.0;
        }
        sq[4] += (global_p - global_t) * (global_p - global_t);
    }
    auto n = static_cast<double>(truth.size());
    m.rs = std::sqrt(sq[0] / n);
    m.ecs = std::sqrt(sq[1] / n);
    m.scs = std::sqrt(sq[2] / n);
    m.wcs = std::sqrt(sq[3] / n);
    m.ged = std::sqrt(sq[4] / n);
    return m;
}

}  // namespace riskrank
