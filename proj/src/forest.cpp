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

#include "riskrank/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskrank {

std::string_view to_string(ForestMode mode) {
    return mode == ForestMode::random_forest ? "random_forest" : "extra_trees";
}

ForestMode parse_forest_mode(std::string_view name) {
    if (name == "random_forest") {
        return ForestMode::random_forest;
    }
    if (name == "extra_trees") {
        return ForestMode::extra_trees;
    }
    throw Error("unknown forest mode '" + std::string(name) + "'");
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child Gini
};

class TreeBuilder {
  public:
    TreeBuilder(const std::vector<double>& columns, std::size_t n, std::size_t d,
                std::span<const int> y, std::size_t n_classes, const ForestConfig& config,
                std::size_t max_features, Rng& rng)
        : cols_(columns), n_(n), d_(d), y_(y), k_(n_classes), config_(config),
          max_features_(max_features), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> samples) {
        struct Pending {
            int node;
            std::size_t begin;
            std::size_t end;
            std::size_t depth;
        };
        samples_ = std::move(samples);
        std::vector<Pending> stack;
        stack.push_back({add_node(), 0, samples_.size(), 0});
        while (!stack.empty()) {
            Pending p = stack.back();
            stack.pop_back();
            auto counts = class_counts(p.begin, p.end);
            bool can_split = (config_.max_depth == 0 || p.depth < config_.max_depth) &&
                             p.end - p.begin >= 2 * config_.min_leaf && !is_pure(counts);
            Split split;
            if (can_split) {
                split = find_split(p.begin, p.end, counts);
            }
            if (split.feature < 0) {
                std::copy(counts.begin(), counts.end(),
                          tree_.histogram.begin() + static_cast<std::ptrdiff_t>(p.node * k_));
                continue;
            }
            auto mid_it = std::partition(
                samples_.begin() + static_cast<std::ptrdiff_t>(p.begin),
                samples_.begin() + static_cast<std::ptrdiff_t>(p.end), [&](std::size_t s) {
                    return value(s, static_cast<std::size_t>(split.feature)) <= split.threshold;
                });
            auto mid = static_cast<std::size_t>(mid_it - samples_.begin());
            int left = add_node();
            int right = add_node();
            auto node = static_cast<std::size_t>(p.node);
            tree_.feature[node] = split.feature;
            tree_.threshold[node] = split.threshold;
            tree_.left[node] = left;
            tree_.right[node] = right;
            stack.push_back({right, mid, p.end, p.depth + 1});
            stack.push_back({left, p.begin, mid, p.depth + 1});
        }
        return std::move(tree_);
    }

  private:
    [[nodiscard]] double value(std::size_t sample, std::size_t feature) const {
        return cols_[feature * n_ + sample];
    }

    int add_node() {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0.0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.histogram.resize(tree_.histogram.size() + k_, 0.0);
        return static_cast<int>(tree_.feature.size() - 1);
    }

    [[nodiscard]] std::vector<double> class_counts(std::size_t begin, std::size_t end) const {
        std::vector<double> counts(k_, 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            counts[static_cast<std::size_t>(y_[samples_[i]])] += 1.0;
        }
        return counts;
    }

    static bool is_pure(const std::vector<double>& counts) {
        return std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    }

    // Sum of squared class counts; Gini * size = size - sum_sq / size.
    static double gini_mass(const std::vector<double>& counts, double size) {
        double sq = 0.0;
        for (double c : counts) {
            sq += c * c;
        }
        return size - sq / size;
    }

    Split find_split(std::size_t begin, std::size_t end, const std::vector<double>& counts) {
        std::vector<std::size_t> features(d_);
        std::iota(features.begin(), features.end(), 0);
        Split best;
        best.impurity = INFINITY;
        std::size_t tried = 0;
        // Draw features without replacement; constant features do not count
        // against the budget.
        for (std::size_t remaining = d_; remaining > 0 && tried < max_features_; --remaining) {
            std::size_t pick = rng_.below(remaining);
            std::size_t f = features[pick];
            std::swap(features[pick], features[remaining - 1]);
            double lo = INFINITY;
            double hi = -INFINITY;
            for (std::size_t i = begin; i < end; ++i) {
                double v = value(samples_[i], f);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(lo < hi)) {
                continue;
            }
            ++tried;
            Split candidate = config_.mode == ForestMode::random_forest
                                  ? best_threshold(f, begin, end, counts)
                                  : random_threshold(f, begin, end, lo, hi);
            if (candidate.feature >= 0 && candidate.impurity < best.impurity) {
                best = candidate;
            }
        }
        return best;
    }

    Split best_threshold(std::size_t f, std::size_t begin, std::size_t end,
                         const std::vector<double>& counts) {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            vals.emplace_back(value(samples_[i], f), y_[samples_[i]]);
        }
        std::sort(vals.begin(), vals.end());
        const double total = static_cast<double>(vals.size());
        std::vector<double> left(k_, 0.0);
        std::vector<double> right = counts;
        Split best;
        best.impurity = INFINITY;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            auto c = static_cast<std::size_t>(vals[i].second);
            left[c] += 1.0;
            right[c] -= 1.0;
            if (vals[i].first == vals[i + 1].first) {
                continue;
            }
            double nl = static_cast<double>(i + 1);
            double nr = total - nl;
            if (nl < static_cast<double>(config_.min_leaf) ||
                nr < static_cast<double>(config_.min_leaf)) {
                continue;
            }
            double impurity = gini_mass(left, nl) + gini_mass(right, nr);
            if (impurity < best.impurity) {
                double a = vals[i].first;
                double b = vals[i + 1].first;
                double mid = a + (b - a) / 2.0;
                best = {static_cast<int>(f), mid < b ? mid : a, impurity};
            }
        }
        return best;
    }

    Split random_threshold(std::size_t f, std::size_t begin, std::size_t end, double lo,
                           double hi) {
        double t = rng_.uniform(lo, hi);
        std::vector<double> left(k_, 0.0);
        std::vector<double> right(k_, 0.0);
        double nl = 0.0;
        double nr = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            auto c = static_cast<std::size_t>(y_[samples_[i]]);
            if (value(samples_[i], f) <= t) {
                left[c] += 1.0;
                nl += 1.0;
            } else {
                right[c] += 1.0;
                nr += 1.0;
            }
        }
        Split s;
        if (nl < static_cast<double>(config_.min_leaf) || nr < static_cast<double>(config_.min_leaf) ||
            nl == 0.0 || nr == 0.0) {
            return s;
        }
        s.feature = static_cast<int>(f);
        s.threshold = t;
        s.impurity = gini_mass(left, nl) + gini_mass(right, nr);
        return s;
    }

    const std::vector<double>& cols_;
    std::size_t n_;
    std::size_t d_;
    std::span<const int> y_;
    std::size_t k_;
    const ForestConfig& config_;
    std::size_t max_features_;
    Rng& rng_;
    std::vector<std::size_t> samples_;
    DecisionTree tree_;
};

}  // namespace

ForestModel train_forest(const FeatureMatrix& x, std::span<const int> y,
                         const ForestConfig& config) {
    if (x.rows() != y.size()) {
        throw Error("feature rows and labels differ in length");
    }
    if (x.rows() < 2) {
        throw Error("forest training needs at least 2 examples");
    }
    if (config.n_trees == 0 || config.min_leaf == 0) {
        throw Error("forest n_trees and min_leaf must be positive");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.dim();
    int max_label = 0;
    for (int label : y) {
        if (label < 0) {
            throw Error("forest labels must be non-negative, got " + std::to_string(label));
        }
        max_label = std::max(max_label, label);
    }
    ForestModel model;
    model.config = config;
    model.dim = d;
    model.n_classes = static_cast<std::size_t>(max_label) + 1;
    std::size_t max_features = config.max_features;
    if (max_features == 0) {
        max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    }
    max_features = std::clamp<std::size_t>(max_features, 1, std::max<std::size_t>(d, 1));

    std::vector<double> columns(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = x.dense_row(i);
        for (std::size_t j = 0; j < d; ++j) {
            columns[j * n + i] = row[j];
        }
    }
    model.trees.resize(config.n_trees);
    parallel_for(config.n_trees, config.threads, [&](std::size_t t) {
        Rng rng(derive_seed(config.seed, t));
        std::vector<std::size_t> samples(n);
        if (config.mode == ForestMode::random_forest) {
            for (auto& s : samples) {
                s = rng.below(n);
            }
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        TreeBuilder builder(columns, n, d, y, model.n_classes, config, max_features, rng);
        model.trees[t] = builder.build(std::move(samples));
    });
    return model;
}

std::vector<double> forest_histogram(const ForestModel& model, std::span<const double> x) {
    if (x.size() != model.dim) {
        throw Error("dimension mismatch: forest expects " + std::to_string(model.dim) +
                    " features, got " + std::to_string(x.size()));
    }
    std::vector<double> total(model.n_classes, 0.0);
    for (const DecisionTree& tree : model.trees) {
        std::size_t node = 0;
        while (tree.feature[node] >= 0) {
            auto f = static_cast<std::size_t>(tree.feature[node]);
            node = static_cast<std::size_t>(x[f] <= tree.threshold[node] ? tree.left[node]
                                                                         : tree.right[node]);
        }
        for (std::size_t c = 0; c < model.n_classes; ++c) {
            total[c] += tree.histogram[node * model.n_classes + c];
        }
    }
    return total;
}

int forest_predict(const ForestModel& model, std::span<const double> x) {
    auto hist = forest_histogram(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < hist.size(); ++c) {
        if (hist[c] > hist[best]) {
            best = c;
        }
    }
    return static_cast<int>(best);
}

}  // namespace riskrank
