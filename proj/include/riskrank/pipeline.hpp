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
//! End-to-end ranking and questionnaire pipelines over in-memory data.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskrank/bank.hpp"
#include "riskrank/eval.hpp"
#include "riskrank/features.hpp"
#include "riskrank/pca.hpp"
#include "riskrank/preprocess.hpp"
#include "riskrank/synth.hpp"
#include "riskrank/word2vec.hpp"

namespace riskrank {

enum class FeatureKind { count, tfidf, word2vec, embedding };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view name);
/// Features a ranking model kind consumes.
FeatureKind feature_kind_for(ModelKind kind);

struct FeatureOptions {
    FeatureKind kind = FeatureKind::count;
    std::size_t min_df = 1;
    double max_df_fraction = 1.0;
    Word2VecConfig word2vec;
    std::size_t embed_dim = 768;
    std::uint64_t embed_seed = 0;
};

/// Fits on `fit_docs` and transforms `docs`. For count/tfidf the vocabulary
/// is fit on `fit_docs`; word2vec trains on `fit_docs`; embeddings need no fit.
FeatureMatrix build_features(const TokenDocs& fit_docs, const TokenDocs& docs,
                             std::vector<std::string> ids, const FeatureOptions& options,
                             Vocabulary* vocab_out = nullptr);

struct RankPipelineOptions {
    ModelKind model = ModelKind::logistic_count;
    FeatureOptions features;  // kind is derived from `model`
    FilterConfig filter;
    bool use_context = false;
    TextPipeline text;
    double holdout_fraction = 0.5;
    std::uint64_t split_seed = 0;
    bool train_on_majority = false;
    std::size_t k = kMaxRunDepth;
    std::string run_tag = "riskrank";
    RankTrainOptions train;
};

struct RankPipelineResult {
    QuestionBank bank;
    std::vector<RunEntry> run;            // over the held-out pool
    std::vector<Qrel> test_majority;      // qrels restricted to held-out docs
    std::vector<Qrel> test_unanimity;
    RunEvaluation evaluation;
    std::vector<double> accuracy;         // per bank question, held-out judged docs
    std::size_t n_documents = 0;
    std::size_t n_kept = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<std::string> removed;     // docnos dropped by the filter
};

/// filter -> tokenize -> split -> featurize -> train -> rank -> evaluate.
RankPipelineResult run_rank_pipeline(std::span<const Document> documents,
                                     std::span<const Qrel> qrels_majority,
                                     std::span<const Qrel> qrels_unanimity,
                                     const RankPipelineOptions& options = {});

/// Fraction of a question's judged rows where (p >= 0.5) matches the label.
double heldout_accuracy(const BankModel& model, const FeatureMatrix& features,
                        std::span<const Qrel> qrels, const std::string& question_id);

struct QuestionnairePipelineOptions {
    ModelKind model = ModelKind::ridge;
    std::size_t embed_dim = 768;
    std::uint64_t embed_seed = 0;
    std::size_t pca_k = 50;  // 0 disables PCA
    bool standardize = true;
    Aggregation aggregate = Aggregation::vector_mean;
    std::size_t chunk_tokens = kChunkTokens;
    TextPipeline text;
    QuestionnaireTrainOptions train;
};

/// Chunk vectors for every user, keyed "<user>#<idx>".
FeatureMatrix embed_histories(std::span<const UserHistory> histories, const HashEmbedder& embedder,
                              std::size_t chunk_tokens = kChunkTokens,
                              const TextPipeline& text = {});

struct QuestionnairePipelineResult {
    QuestionBank bank;
    PcaModel pca;
    std::vector<QuestionnaireAnswers> predictions;
    QuestionnaireMetrics metrics;
    QuestionnaireMetrics all_zero;
    QuestionnaireMetrics all_six;
    QuestionnaireMetrics best_constant;  // constant answer with the lowest held-out MAE
    int best_constant_value = 0;
};

/// Constant prediction for every user and item.
std::vector<QuestionnaireAnswers> constant_predictions(std::span<const QuestionnaireAnswers> truth,
                                                       int value);

QuestionnairePipelineResult run_questionnaire_pipeline(
    std::span<const UserHistory> train_histories, std::span<const QuestionnaireAnswers> train_truth,
    std::span<const UserHistory> test_histories, std::span<const QuestionnaireAnswers> test_truth,
    const QuestionnairePipelineOptions& options = {}, const SubscaleMap& map = SubscaleMap::defaults());

/// Predictions for users with chunk vectors already reduced to the bank's
/// input space.
std::vector<QuestionnaireAnswers> predict_users(const QuestionBank& bank,
                                                const FeatureMatrix& chunk_vectors,
                                                Aggregation aggregate);

}  // namespace riskrank
