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

#include "riskrank/pipeline.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace riskrank {

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::count:
            return "count";
        case FeatureKind::tfidf:
            return "tfidf";
        case FeatureKind::word2vec:
            return "word2vec";
        case FeatureKind::embedding:
            return "embedding";
    }
    return "unknown";
}

FeatureKind parse_feature_kind(std::string_view name) {
    for (auto k : {FeatureKind::count, FeatureKind::tfidf, FeatureKind::word2vec,
                   FeatureKind::embedding}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw Error("unknown feature kind '" + std::string(name) + "'");
}

FeatureKind feature_kind_for(ModelKind kind) {
    switch (kind) {
        case ModelKind::nb_count:
        case ModelKind::logistic_count:
            return FeatureKind::count;
        case ModelKind::logistic_w2v:
            return FeatureKind::word2vec;
        case ModelKind::logistic_embed:
            return FeatureKind::embedding;
        default:
            throw Error("model kind " + std::string(to_string(kind)) + " is not a ranking model");
    }
}

FeatureMatrix build_features(const TokenDocs& fit_docs, const TokenDocs& docs,
                             std::vector<std::string> ids, const FeatureOptions& options,
                             Vocabulary* vocab_out) {
    switch (options.kind) {
        case FeatureKind::count:
        case FeatureKind::tfidf: {
            Vocabulary vocab = fit_vocabulary(fit_docs, options.min_df, options.max_df_fraction);
            FeatureMatrix counts = count_matrix(docs, std::move(ids), vocab);
            if (vocab_out != nullptr) {
                *vocab_out = vocab;
            }
            if (options.kind == FeatureKind::count) {
                return counts;
            }
            return tfidf_transform(counts, fit_idf(vocab));
        }
        case FeatureKind::word2vec: {
            Word2VecModel model = train_word2vec(fit_docs, options.word2vec);
            return doc_vectors(docs, std::move(ids), model);
        }
        case FeatureKind::embedding:
            return HashEmbedder(options.embed_dim, options.embed_seed).embed_all(docs, std::move(ids));
    }
    throw Error("unknown feature kind");
}

double heldout_accuracy(const BankModel& model, const FeatureMatrix& features,
                        std::span<const Qrel> qrels, const std::string& question_id) {
    std::size_t total = 0;
    std::size_t correct = 0;
    for (const Qrel& q : qrels) {
        if (q.question_id != question_id) {
            continue;
        }
        auto row = features.find(q.docno);
        if (!row) {
            continue;
        }
        bool predicted = score_document(model, features, *row) >= 0.5;
        bool actual = q.relevance > 0;
        ++total;
        correct += predicted == actual ? 1 : 0;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

RankPipelineResult run_rank_pipeline(std::span<const Document> documents,
                                     std::span<const Qrel> qrels_majority,
                                     std::span<const Qrel> qrels_unanimity,
                                     const RankPipelineOptions& options) {
    if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
        throw Error("holdout fraction must lie in (0, 1)");
    }
    RankPipelineResult result;
    result.n_documents = documents.size();
    auto kept = filter_documents(documents, {}, options.filter, options.use_context);
    result.n_kept = kept.size();
    {
        std::unordered_set<std::string> kept_ids;
        for (const auto& d : kept) {
            kept_ids.insert(d.docno);
        }
        for (const auto& d : documents) {
            if (!kept_ids.contains(d.docno)) {
                result.removed.push_back(d.docno);
            }
        }
    }

    TokenDocs tokens;
    tokens.reserve(kept.size());
    std::vector<std::string> ids;
    TokenDocs train_tokens;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (const auto& d : kept) {
        tokens.push_back(options.text(d.content(options.use_context)));
        ids.push_back(d.docno);
        if (in_holdout(d.docno, options.split_seed, options.holdout_fraction)) {
            test_rows.push_back(ids.size() - 1);
        } else {
            train_rows.push_back(ids.size() - 1);
            train_tokens.push_back(tokens.back());
        }
    }
    result.n_train = train_rows.size();
    result.n_test = test_rows.size();
    if (train_rows.empty() || test_rows.empty()) {
        throw Error("holdout split left an empty train or test set");
    }

    FeatureOptions fopts = options.features;
    fopts.kind = feature_kind_for(options.model);
    FeatureMatrix all = build_features(train_tokens, tokens, ids, fopts);
    FeatureMatrix train = all.select(train_rows);
    FeatureMatrix test = all.select(test_rows);

    auto split = [&](std::span<const Qrel> qrels, bool heldout) {
        std::vector<Qrel> out;
        for (const Qrel& q : qrels) {
            if (in_holdout(q.docno, options.split_seed, options.holdout_fraction) == heldout) {
                out.push_back(q);
            }
        }
        return out;
    };
    std::span<const Qrel> training_variant =
        options.train_on_majority ? qrels_majority : qrels_unanimity;
    auto train_qrels = split(training_variant, false);
    result.bank = train_question_bank_t1(train, train_qrels, options.model, options.train);
    result.run = rank_documents(result.bank, test, options.k, options.run_tag, options.train.threads);
    result.test_majority = split(qrels_majority, true);
    result.test_unanimity = split(qrels_unanimity, true);
    result.evaluation = evaluate_run(result.run, result.test_majority, result.test_unanimity,
                                     options.run_tag);
    const auto& accuracy_qrels =
        options.train_on_majority ? result.test_majority : result.test_unanimity;
    for (std::size_t q = 0; q < result.bank.keys.size(); ++q) {
        result.accuracy.push_back(
            heldout_accuracy(result.bank.models[q], test, accuracy_qrels, result.bank.keys[q]));
    }
    return result;
}

FeatureMatrix embed_histories(std::span<const UserHistory> histories, const HashEmbedder& embedder,
                              std::size_t chunk_tokens, const TextPipeline& text) {
    std::vector<Chunk> chunks;
    for (const auto& h : histories) {
        auto c = chunk_user_history(h, chunk_tokens, text);
        chunks.insert(chunks.end(), std::make_move_iterator(c.begin()),
                      std::make_move_iterator(c.end()));
    }
    return embedder.embed_chunks(chunks);
}

std::vector<QuestionnaireAnswers> constant_predictions(std::span<const QuestionnaireAnswers> truth,
                                                       int value) {
    std::vector<QuestionnaireAnswers> out;
    for (const auto& t : truth) {
        out.push_back({t.user_id, std::vector<int>(kQuestionnaireItems, value)});
    }
    return out;
}

std::vector<QuestionnaireAnswers> predict_users(const QuestionBank& bank,
                                                const FeatureMatrix& chunk_vectors,
                                                Aggregation aggregate) {
    std::vector<std::string> users;
    std::map<std::string, std::vector<std::vector<double>>> groups;
    for (std::size_t i = 0; i < chunk_vectors.rows(); ++i) {
        std::string user = user_of_chunk(chunk_vectors.docnos()[i]);
        auto& g = groups[user];
        if (g.empty()) {
            users.push_back(user);
        }
        g.push_back(chunk_vectors.dense_row(i));
    }
    std::vector<QuestionnaireAnswers> out;
    for (const auto& u : users) {
        const auto& chunks = groups[u];
        std::vector<int> answers = aggregate == Aggregation::vector_mean
                                       ? predict_questionnaire(bank, aggregate_user(chunks))
                                       : predict_questionnaire_vote(bank, chunks);
        out.push_back({u, std::move(answers)});
    }
    return out;
}

QuestionnairePipelineResult run_questionnaire_pipeline(
    std::span<const UserHistory> train_histories, std::span<const QuestionnaireAnswers> train_truth,
    std::span<const UserHistory> test_histories, std::span<const QuestionnaireAnswers> test_truth,
    const QuestionnairePipelineOptions& options, const SubscaleMap& map) {
    HashEmbedder embedder(options.embed_dim, options.embed_seed);
    FeatureMatrix train_chunks =
        embed_histories(train_histories, embedder, options.chunk_tokens, options.text);
    FeatureMatrix test_chunks =
        embed_histories(test_histories, embedder, options.chunk_tokens, options.text);
    FeatureMatrix train_users = aggregate_users(train_chunks);

    QuestionnairePipelineResult result;
    if (options.pca_k > 0) {
        result.pca = pca_fit(train_users, options.pca_k, options.standardize);
        train_users = pca_transform(train_users, result.pca);
        test_chunks = pca_transform(test_chunks, result.pca);
    }
    result.bank = train_question_bank_t3(train_users, train_truth, options.model, options.train);
    result.predictions = predict_users(result.bank, test_chunks, options.aggregate);
    result.metrics = evaluate_questionnaire(result.predictions, test_truth, map);
    result.all_zero = evaluate_questionnaire(constant_predictions(test_truth, 0), test_truth, map);
    result.all_six =
        evaluate_questionnaire(constant_predictions(test_truth, kMaxAnswer), test_truth, map);
    for (int c = 0; c <= kMaxAnswer; ++c) {
        auto m = evaluate_questionnaire(constant_predictions(test_truth, c), test_truth, map);
        if (c == 0 || m.mae < result.best_constant.mae) {
            result.best_constant = m;
            result.best_constant_value = c;
        }
    }
    return result;
}

}  // namespace riskrank
