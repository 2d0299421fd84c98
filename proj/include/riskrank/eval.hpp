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
//! Ranking metrics (trec_eval conventions, binary relevance) and
//! questionnaire error metrics.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "riskrank/corpus.hpp"
#include "riskrank/history.hpp"

namespace riskrank {

/// Relevant docnos per question (relevance > 0).
using RelevantSets = std::map<std::string, std::set<std::string>>;

RelevantSets relevant_sets(std::span<const Qrel> qrels);

// Single-question metrics. `run` holds one question's entries in rank order.
double average_precision(std::span<const RunEntry> run, const std::set<std::string>& relevant);
double r_precision(std::span<const RunEntry> run, const std::set<std::string>& relevant);
double precision_at_10(std::span<const RunEntry> run, const std::set<std::string>& relevant);
double ndcg(std::span<const RunEntry> run, const std::set<std::string>& relevant);

struct RankMetrics {
    double map = 0.0;
    double r_prec = 0.0;
    double p_at_10 = 0.0;
    double ndcg = 0.0;
    std::size_t evaluated = 0;  // questions with at least one relevant doc
    std::size_t skipped = 0;    // questions in qrels with no relevant doc

    bool operator==(const RankMetrics&) const = default;
};

/// Averages over questions with R >= 1 in the qrels, in ascending question-id
/// order. A question absent from the run contributes 0.
RankMetrics evaluate_rank(std::span<const RunEntry> run, std::span<const Qrel> qrels);
double map(std::span<const RunEntry> run, std::span<const Qrel> qrels);

struct RunEvaluation {
    std::string run_name;
    RankMetrics majority;
    RankMetrics unanimity;
};

RunEvaluation evaluate_run(std::span<const RunEntry> run, std::span<const Qrel> qrels_majority,
                           std::span<const Qrel> qrels_unanimity,
                           const std::string& run_name = "run");

/// Four named item lists.
struct SubscaleMap {
    std::vector<std::string> restraint;
    std::vector<std::string> eating_concern;
    std::vector<std::string> shape_concern;
    std::vector<std::string> weight_concern;

    static SubscaleMap defaults();
    /// Lines "<name>: <item,item,...>"; '#' starts a comment.
    static SubscaleMap parse(std::istream& in);
    static SubscaleMap load(const std::string& path);
    void validate(std::span<const std::string> items) const;
    bool operator==(const SubscaleMap&) const = default;
};

void write_subscale_map(const SubscaleMap& map, std::ostream& out);

double mae(std::span<const int> pred, std::span<const int> truth);
double mzoe(std::span<const int> pred, std::span<const int> truth);
double mae_macro(std::span<const int> pred, std::span<const int> truth);

struct SubscaleErrors {
    double rs = 0.0;
    double ecs = 0.0;
    double scs = 0.0;
    double wcs = 0.0;
    double ged = 0.0;

    bool operator==(const SubscaleErrors&) const = default;
};

/// Answer vectors follow `items`; predictions and truth are matched by user id.
SubscaleErrors subscale_rmse(std::span<const QuestionnaireAnswers> pred,
                             std::span<const QuestionnaireAnswers> truth, const SubscaleMap& map,
                             std::span<const std::string> items = default_item_ids());

struct QuestionnaireMetrics {
    double mae = 0.0;
    double mzoe = 0.0;
    double mae_macro = 0.0;
    double ged = 0.0;
    double rs = 0.0;
    double ecs = 0.0;
    double scs = 0.0;
    double wcs = 0.0;

    bool operator==(const QuestionnaireMetrics&) const = default;
};

/// Every truth user needs exactly one prediction; extra predictions are an
/// error.
QuestionnaireMetrics evaluate_questionnaire(std::span<const QuestionnaireAnswers> pred,
                                            std::span<const QuestionnaireAnswers> truth,
                                            const SubscaleMap& map,
                                            std::span<const std::string> items = default_item_ids());

/// Flattens matched answer vectors (truth order) for the item-level metrics.
void align_answers(std::span<const QuestionnaireAnswers> pred,
                   std::span<const QuestionnaireAnswers> truth, std::vector<int>& pred_flat,
                   std::vector<int>& truth_flat);

// Reports.
void write_rank_csv(std::span<const RunEvaluation> rows, std::ostream& out);
void write_rank_json(std::span<const RunEvaluation> rows, std::ostream& out);

struct QuestionnaireReportRow {
    std::string team;
    std::string run_id;
    QuestionnaireMetrics metrics;
};

void write_questionnaire_csv(std::span<const QuestionnaireReportRow> rows, std::ostream& out);
void write_questionnaire_json(std::span<const QuestionnaireReportRow> rows, std::ostream& out);

}  // namespace riskrank
