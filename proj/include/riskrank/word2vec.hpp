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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskrank/features.hpp"

namespace riskrank {

enum class Word2VecMode { cbow, skipgram };

std::string_view to_string(Word2VecMode mode);
Word2VecMode parse_word2vec_mode(std::string_view name);

struct Word2VecConfig {
    std::size_t dim = 100;
    std::size_t window = 5;
    std::size_t epochs = 5;
    std::size_t negatives = 5;
    double learning_rate = 0.025;  // decays linearly to 1e-4 of its start
    Word2VecMode mode = Word2VecMode::cbow;
    std::size_t min_count = 1;
    std::uint64_t seed = 1;

    bool operator==(const Word2VecConfig&) const = default;
};

/// Word vectors trained with negative sampling. Rows of `input` and `output`
/// follow `terms` (lexicographic order).
struct Word2VecModel {
    std::vector<std::string> terms;
    std::vector<std::size_t> counts;
    std::vector<double> input;   // terms.size() x dim
    std::vector<double> output;  // terms.size() x dim
    Word2VecConfig config;
    std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch

    [[nodiscard]] std::size_t dim() const noexcept { return config.dim; }
    [[nodiscard]] std::optional<std::size_t> index(const std::string& token) const;
    [[nodiscard]] std::span<const double> vector(std::size_t index) const {
        return {input.data() + index * config.dim, config.dim};
    }

    bool operator==(const Word2VecModel& other) const {
        return terms == other.terms && counts == other.counts && input == other.input &&
               output == other.output && config == other.config;
    }
};

/// Single-threaded SGD over (center, context) pairs; bitwise deterministic
/// for a fixed config.
Word2VecModel train_word2vec(const TokenDocs& docs, const Word2VecConfig& config);

/// Mean input vector of the in-vocabulary tokens; zero vector if none.
std::vector<double> doc_vector(std::span<const std::string> tokens, const Word2VecModel& model);

FeatureMatrix doc_vectors(const TokenDocs& docs, std::vector<std::string> docnos,
                          const Word2VecModel& model);

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace riskrank
