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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riskrank/features.hpp"

namespace riskrank {

inline constexpr std::size_t kDefaultPcaComponents = 50;

/**
 * Principal components of the standardized inputs.
 *
 * `components` holds k orthonormal rows of length `input_dim` (row-major),
 * ordered by descending eigenvalue of the sample covariance. Each row's
 * largest-magnitude entry is positive.
 */
struct PcaModel {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> components;
    std::vector<double> eigenvalues;
    double total_variance = 0.0;  // trace of the covariance

    [[nodiscard]] std::size_t input_dim() const noexcept { return mean.size(); }
    [[nodiscard]] std::size_t k() const noexcept { return eigenvalues.size(); }
    [[nodiscard]] std::span<const double> component(std::size_t i) const {
        return {components.data() + i * input_dim(), input_dim()};
    }

    bool operator==(const PcaModel&) const = default;
};

/// Fits on `x` after standardizing it (or only centering it when
/// `standardize` is false). Requires 1 <= k <= min(rows - 1, dim).
PcaModel pca_fit(const FeatureMatrix& x, std::size_t k = kDefaultPcaComponents,
                 bool standardize = true);

std::vector<double> pca_transform(std::span<const double> row, const PcaModel& model);
FeatureMatrix pca_transform(const FeatureMatrix& x, const PcaModel& model);

/// Maps component scores back to the input space.
FeatureMatrix pca_inverse_transform(const FeatureMatrix& scores, const PcaModel& model);

}  // namespace riskrank
