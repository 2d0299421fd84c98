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

#include "riskrank/pca.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace riskrank {

PcaModel pca_fit(const FeatureMatrix& x, std::size_t k, bool standardize) {
    const std::size_t n = x.rows();
    const std::size_t d = x.dim();
    if (n < 2) {
        throw Error("PCA needs at least 2 rows");
    }
    if (k < 1 || k > std::min(n - 1, d)) {
        throw Error("PCA k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(std::min(n - 1, d)) + "]");
    }
    PcaModel model;
    if (standardize) {
        Standardizer s = standardize_fit(x);
        model.mean = std::move(s.mean);
        model.scale = std::move(s.scale);
    } else {
        model.mean.assign(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            x.add_scaled_row(i, 1.0, model.mean);
        }
        for (double& m : model.mean) {
            m /= static_cast<double>(n);
        }
        model.scale.assign(d, 1.0);
    }

    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        auto row = x.dense_row(i);
        for (std::size_t j = 0; j < d; ++j) {
            z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (row[j] - model.mean[j]) / model.scale[j];
        }
    }
    Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error("covariance eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues.
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    model.total_variance = cov.trace();
    model.components.reserve(k * d);
    for (std::size_t c = 0; c < k; ++c) {
        auto col = static_cast<Eigen::Index>(d - 1 - c);
        Eigen::VectorXd v = vectors.col(col);
        Eigen::Index argmax = 0;
        v.cwiseAbs().maxCoeff(&argmax);
        if (v(argmax) < 0.0) {
            v = -v;
        }
        model.eigenvalues.push_back(std::max(values(col), 0.0));
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            model.components.push_back(v(j));
        }
    }
    return model;
}

std::vector<double> pca_transform(std::span<const double> row, const PcaModel& model) {
    const std::size_t d = model.input_dim();
    if (row.size() != d) {
        throw Error("PCA input dimension mismatch: expected " + std::to_string(d) + ", got " +
                    std::to_string(row.size()));
    }
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) {
        z[j] = (row[j] - model.mean[j]) / model.scale[j];
    }
    std::vector<double> out(model.k(), 0.0);
    for (std::size_t c = 0; c < model.k(); ++c) {
        auto comp = model.component(c);
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            s += comp[j] * z[j];
        }
        out[c] = s;
    }
    return out;
}

FeatureMatrix pca_transform(const FeatureMatrix& x, const PcaModel& model) {
    if (x.dim() != model.input_dim()) {
        throw Error("PCA input dimension mismatch: expected " + std::to_string(model.input_dim()) +
                    ", got " + std::to_string(x.dim()));
    }
    std::vector<double> values;
    values.reserve(x.rows() * model.k());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto scores = pca_transform(x.dense_row(i), model);
        values.insert(values.end(), scores.begin(), scores.end());
    }
    return FeatureMatrix::dense(x.docnos(), model.k(), std::move(values));
}

FeatureMatrix pca_inverse_transform(const FeatureMatrix& scores, const PcaModel& model) {
    if (scores.dim() != model.k()) {
        throw Error("PCA score dimension mismatch: expected " + std::to_string(model.k()) +
                    ", got " + std::to_string(scores.dim()));
    }
    const std::size_t d = model.input_dim();
    std::vector<double> values;
    values.reserve(scores.rows() * d);
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto s = scores.dense_row(i);
        std::vector<double> z(d, 0.0);
        for (std::size_t c = 0; c < model.k(); ++c) {
            auto comp = model.component(c);
            for (std::size_t j = 0; j < d; ++j) {
                z[j] += s[c] * comp[j];
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            values.push_back(z[j] * model.scale[j] + model.mean[j]);
        }
    }
    return FeatureMatrix::dense(scores.docnos(), d, std::move(values));
}

}  // namespace riskrank
