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
//! Question banks: one classifier per BDI-II question (ranking) or per EDE-Q
//! item (questionnaire), plus ranking, prediction and serialization.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riskrank/corpus.hpp"
#include "riskrank/features.hpp"
#include "riskrank/forest.hpp"
#include "riskrank/history.hpp"
#include "riskrank/models.hpp"

namespace riskrank {

enum class BankTask { rank, questionnaire };

/// Ranking kinds: nb_count, logistic_count, logistic_w2v, logistic_embed.
/// Questionnaire kinds: ridge, random_forest, extra_trees.
enum class ModelKind {
    nb_count,
    logistic_count,
    logistic_w2v,
    logistic_embed,
    ridge,
    random_forest,
    extra_trees,
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
BankTask task_of(ModelKind kind);

/// Question ids "1".."21".
const std::vector<std::string>& default_question_ids();

using BankModel = std::variant<LogisticModel, NaiveBayesModel, RidgeModel, ForestModel>;

struct QuestionBank {
    ModelKind kind = ModelKind::logistic_count;
    std::size_t dim = 0;
    std::vector<std::string> keys;  // question or item ids, in output order
    std::vector<BankModel> models;  // parallel to keys

    [[nodiscard]] BankTask task() const { return task_of(kind); }
    bool operator==(const QuestionBank&) const = default;
};

struct RankTrainOptions {
    std::vector<std::string> questions = default_question_ids();
    LogisticConfig logistic;
    double nb_alpha = 1.0;
    double max_negative_ratio = 10.0;  // 0 disables subsampling
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// Trains one binary model per question on the question's judged docnos
/// present in `features` (relevance > 0 is positive). Question i uses seed
/// derive_seed(seed, i) for negative subsampling.
QuestionBank train_question_bank_t1(const FeatureMatrix& features, std::span<const Qrel> qrels,
                                    ModelKind kind, const RankTrainOptions& options = {});

/// Relevance probability of one row under one question's model.
double score_document(const BankModel& model, const FeatureMatrix& features, std::size_t row);

/// Per question (bank key order): every row scored, sorted by descending
/// score then ascending docno, top min(k, rows) emitted with ranks 1.. .
std::vector<RunEntry> rank_documents(const QuestionBank& bank, const FeatureMatrix& features,
                                     std::size_t k = kMaxRunDepth,
                                     const std::string& run_tag = "riskrank",
                                     std::size_t threads = 1);

enum class Aggregation { vector_mean, chunk_vote };

std::string_view to_string(Aggregation a);
Aggregation parse_aggregation(std::string_view name);

struct QuestionnaireTrainOptions {
    std::vector<std::string> items = default_item_ids();
    double ridge_lambda = 1.0;
    ForestConfig forest;
    std::uint64_t seed = 0;  // forest seed for item i is derive_seed(seed, i)
    std::size_t threads = 1;
};

/// `user_vectors` rows are keyed by user id; every answered user needs a row.
QuestionBank train_question_bank_t3(const FeatureMatrix& user_vectors,
                                    std::span<const QuestionnaireAnswers> answers,
                                    ModelKind kind,
                                    const QuestionnaireTrainOptions& options = {});

/// Unweighted mean of a user's chunk vectors.
std::vector<double> aggregate_user(std::span<const std::vector<double>> chunks);

/// Groups rows whose ids look like "<user>#<idx>" by user (first-appearance
/// order) and mean-pools each group.
FeatureMatrix aggregate_users(const FeatureMatrix& chunk_vectors);

/// User id part of a chunk id ("<user>#<idx>" -> "<user>").
std::string user_of_chunk(std::string_view chunk_id);

int predict_item(const BankModel& model, std::span<const double> x);

std::vector<int> predict_questionnaire(const QuestionBank& bank, std::span<const double> user_vector);

/// Per-item majority vote over chunk-level predictions; ties go to the
/// smaller answer.
std::vector<int> predict_questionnaire_vote(const QuestionBank& bank,
                                            std::span<const std::vector<double>> chunks);

inline constexpr int kBankSchemaVersion = 1;

/// JSON lines: a header record, then one record per key.
void save_bank(const QuestionBank& bank, std::ostream& out);
QuestionBank load_bank(std::istream& in);

}  // namespace riskrank
