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

// Reference computations used only by the tests. They are deliberately
// naive and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "riskrank/common.hpp"
#include "riskrank/features.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix random_matrix(std::size_t rows, std::size_t cols, riskrank::Rng& rng) {
    Matrix m(rows, std::vector<double>(cols));
    for (auto& r : m) {
        for (auto& v : r) {
            v = rng.normal();
        }
    }
    return m;
}

inline riskrank::FeatureMatrix to_features(const Matrix& m) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < m.size(); ++i) {
        ids.push_back("r" + std::to_string(i));
    }
    return riskrank::FeatureMatrix::from_rows(std::move(ids), m);
}

/// Column-standardized copy (population sd, zero-variance columns left centered).
inline Matrix standardized(const Matrix& x) {
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();
    Matrix out = x;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (const auto& r : x) {
            mean += r[j];
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& r : x) {
            var += (r[j] - mean) * (r[j] - mean);
        }
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd == 0.0) {
            sd = 1.0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i][j] = (x[i][j] - mean) / sd;
        }
    }
    return out;
}

/// Sample covariance (n - 1 denominator) of already-centered or raw rows.
inline Matrix covariance(const Matrix& x) {
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : x) {
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += r[j] / static_cast<double>(n);
        }
    }
    Matrix c(d, std::vector<double>(d, 0.0));
    for (const auto& r : x) {
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                c[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]);
            }
        }
    }
    for (auto& row : c) {
        for (auto& v : row) {
            v /= static_cast<double>(n - 1);
        }
    }
    return c;
}

struct Eigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // vectors[i] pairs with values[i]
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline Eigen jacobi(Matrix a) {
    const std::size_t n = a.size();
    Matrix v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        v[i][i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) {
                    continue;
                }
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p];
                    double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k];
                    double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v[k][p];
                    double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
    Eigen out;
    for (std::size_t i : order) {
        out.values.push_back(a[i][i]);
        std::vector<double> vec(n);
        for (std::size_t k = 0; k < n; ++k) {
            vec[k] = v[k][i];
        }
        // Largest-magnitude entry positive.
        std::size_t big = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs(vec[k]) > std::abs(vec[big])) {
                big = k;
            }
        }
        if (vec[big] < 0) {
            for (auto& x : vec) {
                x = -x;
            }
        }
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

/// Ridge one-vs-rest weights by plain gradient descent on
/// |AW - Y|^2 + lambda |W_features|^2, A = [X 1].
inline Matrix ridge_gradient_descent(const Matrix& x, const std::vector<int>& y,
                                     const std::vector<int>& classes, double lambda,
                                     std::size_t iterations) {
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();
    const std::size_t c = classes.size();
    Matrix a = x;
    for (auto& r : a) {
        r.push_back(1.0);
    }
    Matrix w(d + 1, std::vector<double>(c, 0.0));
    // Step from a bound on the largest Hessian eigenvalue (Frobenius norm).
    double frob = 0.0;
    for (const auto& r : a) {
        for (double v : r) {
            frob += v * v;
        }
    }
    double step = 1.0 / (frob + lambda);
    for (std::size_t it = 0; it < iterations; ++it) {
        Matrix grad(d + 1, std::vector<double>(c, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < c; ++k) {
                double pred = 0.0;
                for (std::size_t j = 0; j <= d; ++j) {
                    pred += a[i][j] * w[j][k];
                }
                double target = y[i] == classes[k] ? 1.0 : -1.0;
                double r = pred - target;
                for (std::size_t j = 0; j <= d; ++j) {
                    grad[j][k] += a[i][j] * r;
                }
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < c; ++k) {
                grad[j][k] += lambda * w[j][k];
            }
        }
        for (std::size_t j = 0; j <= d; ++j) {
            for (std::size_t k = 0; k < c; ++k) {
                w[j][k] -= step * grad[j][k];
            }
        }
    }
    return w;
}

}  // namespace oracle
