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
//! Gini decision-tree ensembles (random forest and extremely randomized trees).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "riskrank/features.hpp"

namespace riskrank {

enum class ForestMode { random_forest, extra_trees };

std::string_view to_string(ForestMode mode);
ForestMode parse_forest_mode(std::string_view name);

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;     // 0: unlimited
    std::size_t min_leaf = 1;
    std::size_t max_features = 0;  // 0: ceil(sqrt(d))
    ForestMode mode = ForestMode::random_forest;
    std::uint64_t seed = 0;
    std::size_t threads = 1;       // not part of the model identity

    bool operator==(const ForestConfig& o) const {
        return n_trees == o.n_trees && max_depth == o.max_depth && min_leaf == o.min_leaf &&
               max_features == o.max_features && mode == o.mode && seed == o.seed;
    }
};

/// Flat binary tree. Node i is a leaf iff feature[i] < 0; internal nodes send
/// x[feature] <= threshold to `left`.
struct DecisionTree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> histogram;  // nodes x n_classes; zero for internal nodes

    [[nodiscard]] std::size_t nodes() const noexcept { return feature.size(); }
    bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
    ForestConfig config;
    std::size_t dim = 0;
    std::size_t n_classes = 0;  // labels are 0..n_classes-1
    std::vector<DecisionTree> trees;

    bool operator==(const ForestModel&) const = default;
};

/// Labels must be non-negative. Tree t draws from seed derive_seed(seed, t).
ForestModel train_forest(const FeatureMatrix& x, std::span<const int> y,
                         const ForestConfig& config = {});

/// Sum of the reached leaf histograms over all trees.
std::vector<double> forest_histogram(const ForestModel& model, std::span<const double> x);
/// Argmax of forest_histogram; ties go to the smaller class.
int forest_predict(const ForestModel& model, std::span<const double> x);

}  // namespace riskrank
