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
//! Linear classifiers: logistic regression, multinomial naive Bayes and the
//! one-vs-rest ridge classifier.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskrank/features.hpp"

namespace riskrank {

struct LogisticConfig {
    double learning_rate = 1.0;
    double l2 = 1e-4;
    std::size_t epochs = 300;
    std::uint64_t seed = 0;

    bool operator==(const LogisticConfig&) const = default;
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    LogisticConfig config;

    [[nodiscard]] std::size_t dim() const noexcept { return weights.size(); }
    bool operator==(const LogisticModel&) const = default;
};

/// Per-epoch objective values recorded during training; entry 0 is the loss
/// of the zero initialization.
struct TrainingTrace {
    std::vector<double> loss;
};

/**
 * Full-batch gradient descent on mean cross-entropy plus (l2/2)|w|^2 (bias
 * unpenalized), starting from zero. A step that would raise the objective is
 * retried with half the step size, so the recorded loss never increases.
 */
LogisticModel train_logistic(const FeatureMatrix& x, std::span<const int> y,
                             const LogisticConfig& config = {}, TrainingTrace* trace = nullptr);

double logistic_objective(const LogisticModel& model, const FeatureMatrix& x,
                          std::span<const int> y);

double predict_proba(const LogisticModel& model, std::span<const double> x);
double predict_proba(const LogisticModel& model, const FeatureMatrix& x, std::size_t row);

/// Multinomial naive Bayes over non-negative count features, two classes.
struct NaiveBayesModel {
    std::array<double, 2> log_prior{};
    std::vector<double> log_likelihood;  // 2 x dim, class-major
    double alpha = 1.0;

    [[nodiscard]] std::size_t dim() const noexcept { return log_likelihood.size() / 2; }
    [[nodiscard]] std::span<const double> class_log_likelihood(std::size_t c) const {
        return {log_likelihood.data() + c * dim(), dim()};
    }
    bool operator==(const NaiveBayesModel&) const = default;
};

/// Requires both classes present and every feature non-negative.
NaiveBayesModel train_naive_bayes(const FeatureMatrix& counts, std::span<const int> y,
                                  double alpha = 1.0);

/// Class posteriors {P(0|x), P(1|x)}, normalized in log space.
std::array<double, 2> nb_posterior(const NaiveBayesModel& model, const FeatureMatrix& x,
                                   std::size_t row);
std::array<double, 2> nb_posterior(const NaiveBayesModel& model, std::span<const double> x);
double nb_predict_proba(const NaiveBayesModel& model, const FeatureMatrix& x, std::size_t row);
double nb_predict_proba(const NaiveBayesModel& model, std::span<const double> x);

/**
 * One-vs-rest ridge classifier. Targets are +1 for the class and -1
 * otherwise; weights solve (A^T A + lambda D) W = A^T Y where A is X with a
 * trailing ones column and D leaves the bias unpenalized.
 */
struct RidgeModel {
    std::vector<int> classes;     // sorted distinct training labels
    std::vector<double> weights;  // (dim + 1) x classes, row-major; last row is the bias
    double lambda = 1.0;

    [[nodiscard]] std::size_t dim() const noexcept {
        return classes.empty() ? 0 : weights.size() / classes.size() - 1;
    }
    bool operator==(const RidgeModel&) const = default;
};

RidgeModel train_ridge(const FeatureMatrix& x, std::span<const int> y, double lambda = 1.0);
std::vector<double> ridge_scores(const RidgeModel& model, std::span<const double> x);
/// Highest-scoring class; ties go to the smaller label.
int ridge_predict(const RidgeModel& model, std::span<const double> x);

}  // namespace riskrank
