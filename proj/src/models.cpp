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

#include "riskrank/models.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>

#include <Eigen/Dense>

namespace riskrank {
namespace {

void check_labels(const FeatureMatrix& x, std::span<const int> y) {
    if (x.rows() != y.size()) {
        throw Error("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                    std::to_string(y.size()) + ") differ in length");
    }
    if (y.empty()) {
        throw Error("cannot train on zero examples");
    }
}

void check_binary(std::span<const int> y) {
    for (int label : y) {
        if (label != 0 && label != 1) {
            throw Error("binary labels must be 0 or 1, got " + std::to_string(label));
        }
    }
}

double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

double logistic_objective(const LogisticModel& model, const FeatureMatrix& x,
                          std::span<const int> y) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double z = x.dot(i, model.weights) + model.bias;
        // -log p(y|x) = softplus(z) - y z
        loss += softplus(z) - (y[i] == 1 ? z : 0.0);
    }
    loss /= static_cast<double>(x.rows());
    double norm2 = 0.0;
    for (double w : model.weights) {
        norm2 += w * w;
    }
    return loss + 0.5 * model.config.l2 * norm2;
}

LogisticModel train_logistic(const FeatureMatrix& x, std::span<const int> y,
                             const LogisticConfig& config, TrainingTrace* trace) {
    check_labels(x, y);
    check_binary(y);
    if (!(config.learning_rate > 0.0) || !(config.l2 >= 0.0)) {
        throw Error("logistic regression needs a positive learning rate and non-negative l2");
    }
    LogisticModel model{std::vector<double>(x.dim(), 0.0), 0.0, config};
    const auto n = static_cast<double>(x.rows());
    double current = logistic_objective(model, x, y);
    if (trace != nullptr) {
        trace->loss.assign(1, current);
    }
    std::vector<double> grad(x.dim());
    LogisticModel candidate = model;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double step = config.learning_rate;
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double residual = sigmoid(x.dot(i, model.weights) + model.bias) - y[i];
            x.add_scaled_row(i, residual / n, grad);
            grad_bias += residual / n;
        }
        for (std::size_t j = 0; j < grad.size(); ++j) {
            grad[j] += config.l2 * model.weights[j];
        }
        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            for (std::size_t j = 0; j < grad.size(); ++j) {
                candidate.weights[j] = model.weights[j] - step * grad[j];
            }
            candidate.bias = model.bias - step * grad_bias;
            double next = logistic_objective(candidate, x, y);
            if (next <= current) {
                std::swap(model, candidate);
                current = next;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (trace != nullptr) {
            trace->loss.push_back(current);
        }
        if (!accepted) {
            // Converged to floating-point resolution.
            if (trace != nullptr) {
                trace->loss.resize(trace->loss.size() + (config.epochs - epoch - 1), current);
            }
            break;
        }
    }
    return model;
}

double predict_proba(const LogisticModel& model, std::span<const double> x) {
    if (x.size() != model.dim()) {
        throw Error("dimension mismatch: model expects " + std::to_string(model.dim()) +
                    " features, got " + std::to_string(x.size()));
    }
    double z = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) {
        z += model.weights[j] * x[j];
    }
    return sigmoid(z);
}

double predict_proba(const LogisticModel& model, const FeatureMatrix& x, std::size_t row) {
    return sigmoid(x.dot(row, model.weights) + model.bias);
}

NaiveBayesModel train_naive_bayes(const FeatureMatrix& counts, std::span<const int> y,
                                  double alpha) {
    check_labels(counts, y);
    check_binary(y);
    if (!(alpha > 0.0)) {
        throw Error("naive Bayes smoothing alpha must be positive");
    }
    if (counts.min_value() < 0.0) {
        throw Error("naive Bayes requires non-negative features (counts)");
    }
    const std::size_t d = counts.dim();
    std::array<double, 2> docs{0.0, 0.0};
    std::vector<double> totals(2 * d, 0.0);
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        auto c = static_cast<std::size_t>(y[i]);
        docs[c] += 1.0;
        counts.add_scaled_row(i, 1.0, std::span<double>(totals.data() + c * d, d));
    }
    if (docs[0] == 0.0 || docs[1] == 0.0) {
        throw Error("naive Bayes needs examples of both classes");
    }
    NaiveBayesModel model;
    model.alpha = alpha;
    model.log_likelihood.resize(2 * d);
    for (std::size_t c = 0; c < 2; ++c) {
        model.log_prior[c] = std::log(docs[c] / (docs[0] + docs[1]));
        double mass = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            mass += totals[c * d + j] + alpha;
        }
        for (std::size_t j = 0; j < d; ++j) {
            model.log_likelihood[c * d + j] = std::log((totals[c * d + j] + alpha) / mass);
        }
    }
    return model;
}

namespace {

std::array<double, 2> normalize_log(std::array<double, 2> joint) {
    double m = std::max(joint[0], joint[1]);
    double e0 = std::exp(joint[0] - m);
    double e1 = std::exp(joint[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace

std::array<double, 2> nb_posterior(const NaiveBayesModel& model, const FeatureMatrix& x,
                                   std::size_t row) {
    if (x.dim() != model.dim()) {
        throw Error("dimension mismatch: model expects " + std::to_string(model.dim()) +
                    " features, got " + std::to_string(x.dim()));
    }
    std::array<double, 2> joint = model.log_prior;
    x.for_each_nonzero(row, [&](std::size_t j, double v) {
        if (v < 0.0) {
            throw Error("naive Bayes requires non-negative features (counts)");
        }
        joint[0] += v * model.log_likelihood[j];
        joint[1] += v * model.log_likelihood[model.dim() + j];
    });
    return normalize_log(joint);
}

std::array<double, 2> nb_posterior(const NaiveBayesModel& model, std::span<const double> x) {
    if (x.size() != model.dim()) {
        throw Error("dimension mismatch: model expects " + std::to_string(model.dim()) +
                    " features, got " + std::to_string(x.size()));
    }
    std::array<double, 2> joint = model.log_prior;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < 0.0) {
            throw Error("naive Bayes requires non-negative features (counts)");
        }
        if (x[j] != 0.0) {
            joint[0] += x[j] * model.log_likelihood[j];
            joint[1] += x[j] * model.log_likelihood[model.dim() + j];
        }
    }
    return normalize_log(joint);
}

double nb_predict_proba(const NaiveBayesModel& model, const FeatureMatrix& x, std::size_t row) {
    return nb_posterior(model, x, row)[1];
}

double nb_predict_proba(const NaiveBayesModel& model, std::span<const double> x) {
    return nb_posterior(model, x)[1];
}

RidgeModel train_ridge(const FeatureMatrix& x, std::span<const int> y, double lambda) {
    check_labels(x, y);
    if (!(lambda > 0.0)) {
        throw Error("ridge lambda must be positive");
    }
    std::set<int> distinct(y.begin(), y.end());
    RidgeModel model;
    model.lambda = lambda;
    model.classes.assign(distinct.begin(), distinct.end());

    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.dim());
    const auto c = static_cast<Eigen::Index>(model.classes.size());
    Eigen::MatrixXd a(n, d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto row = x.dense_row(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < d; ++j) {
            a(i, j) = row[static_cast<std::size_t>(j)];
        }
        a(i, d) = 1.0;
    }
    Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(n, c, -1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto pos = std::lower_bound(model.classes.begin(), model.classes.end(),
                                    y[static_cast<std::size_t>(i)]) -
                   model.classes.begin();
        targets(i, pos) = 1.0;
    }
    Eigen::MatrixXd gram = a.transpose() * a;
    for (Eigen::Index j = 0; j < d; ++j) {
        gram(j, j) += lambda;
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    // The bias-only direction is only singular for an empty design.
    assert(solver.info() == Eigen::Success);
    if (solver.info() != Eigen::Success) {
        throw Error("ridge normal equations are singular");
    }
    Eigen::MatrixXd w = solver.solve(a.transpose() * targets);
    model.weights.resize(static_cast<std::size_t>((d + 1) * c));
    for (Eigen::Index j = 0; j <= d; ++j) {
        for (Eigen::Index k = 0; k < c; ++k) {
            model.weights[static_cast<std::size_t>(j * c + k)] = w(j, k);
        }
    }
    if (!all_finite(model.weights)) {
        throw Error("ridge solution is not finite");
    }
    return model;
}

std::vector<double> ridge_scores(const RidgeModel& model, std::span<const double> x) {
    const std::size_t d = model.dim();
    const std::size_t c = model.classes.size();
    if (x.size() != d) {
        throw Error("dimension mismatch: ridge model expects " + std::to_string(d) +
                    " features, got " + std::to_string(x.size()));
    }
    std::vector<double> scores(model.weights.begin() + static_cast<std::ptrdiff_t>(d * c),
                               model.weights.end());
    for (std::size_t j = 0; j < d; ++j) {
        if (x[j] == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < c; ++k) {
            scores[k] += x[j] * model.weights[j * c + k];
        }
    }
    return scores;
}

int ridge_predict(const RidgeModel& model, std::span<const double> x) {
    auto scores = ridge_scores(model, x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) {
            best = k;
        }
    }
    return model.classes[best];
}

}  // namespace riskrank
