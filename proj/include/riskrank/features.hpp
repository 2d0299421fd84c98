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
//! Document vectors: vocabularies, count and TF-IDF matrices, dense
//! embedding files and column standardization.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "riskrank/common.hpp"

namespace riskrank {

using TokenDocs = std::vector<std::vector<std::string>>;

/// Token index. Indices are dense 0..size()-1 in lexicographic token order.
class Vocabulary {
  public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
               std::size_t n_docs);

    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] std::size_t n_docs() const noexcept { return n_docs_; }
    [[nodiscard]] const std::vector<std::string>& terms() const noexcept { return terms_; }
    [[nodiscard]] const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }
    [[nodiscard]] std::optional<std::uint32_t> index(const std::string& token) const;

    bool operator==(const Vocabulary& other) const {
        return terms_ == other.terms_ && doc_freq_ == other.doc_freq_ && n_docs_ == other.n_docs_;
    }

  private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> doc_freq_;
    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Keeps tokens with min_df <= df and df / n_docs <= max_df_fraction; when
/// more than max_features survive, the highest-df tokens win (ties broken
/// lexicographically). `max_features` unset means no cap; zero is an error.
Vocabulary fit_vocabulary(const TokenDocs& docs, std::size_t min_df = 1,
                          double max_df_fraction = 1.0,
                          std::optional<std::size_t> max_features = std::nullopt);

/// Sorted, duplicate-free indices with their values.
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    [[nodiscard]] std::vector<double> to_dense(std::size_t dim) const;
    bool operator==(const SparseVector&) const = default;
};

SparseVector count_vectorize(std::span<const std::string> tokens, const Vocabulary& vocab);

/**
 * Document-by-feature matrix with an aligned docno index. Rows are stored
 * either sparse (count/TF-IDF) or dense row-major (embeddings); every value is
 * finite.
 */
class FeatureMatrix {
  public:
    FeatureMatrix() = default;

    static FeatureMatrix dense(std::vector<std::string> docnos, std::size_t dim,
                               std::vector<double> values);
    static FeatureMatrix sparse(std::vector<std::string> docnos, std::size_t dim,
                                std::vector<SparseVector> rows);
    /// Dense matrix from equal-length rows.
    static FeatureMatrix from_rows(std::vector<std::string> docnos,
                                   const std::vector<std::vector<double>>& rows);

    [[nodiscard]] bool is_sparse() const noexcept { return sparse_; }
    [[nodiscard]] std::size_t rows() const noexcept { return docnos_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<std::string>& docnos() const noexcept { return docnos_; }
    [[nodiscard]] std::optional<std::size_t> find(const std::string& docno) const;

    [[nodiscard]] double dot(std::size_t row, std::span<const double> weights) const;
    /// out += alpha * row
    void add_scaled_row(std::size_t row, double alpha, std::span<double> out) const;
    [[nodiscard]] std::vector<double> dense_row(std::size_t row) const;
    /// Dense storage only.
    [[nodiscard]] std::span<const double> row_span(std::size_t row) const;
    /// Sparse storage only.
    [[nodiscard]] const SparseVector& sparse_row(std::size_t row) const;
    [[nodiscard]] double min_value() const;

    /// Rows in the given order.
    [[nodiscard]] FeatureMatrix select(std::span<const std::size_t> rows) const;

    template <typename F>
    void for_each_nonzero(std::size_t row, F&& f) const {
        if (sparse_) {
            const SparseVector& r = sparse_rows_[row];
            for (std::size_t k = 0; k < r.indices.size(); ++k) {
                f(static_cast<std::size_t>(r.indices[k]), r.values[k]);
            }
        } else {
            const double* base = dense_values_.data() + row * dim_;
            for (std::size_t j = 0; j < dim_; ++j) {
                if (base[j] != 0.0) {
                    f(j, base[j]);
                }
            }
        }
    }

    bool operator==(const FeatureMatrix&) const;

  private:
    void build_index();

    std::vector<std::string> docnos_;
    std::size_t dim_ = 0;
    bool sparse_ = false;
    std::vector<double> dense_values_;
    std::vector<SparseVector> sparse_rows_;
    std::unordered_map<std::string, std::size_t> index_;
};

FeatureMatrix count_matrix(const TokenDocs& docs, std::vector<std::string> docnos,
                           const Vocabulary& vocab);

/// Smoothed inverse document frequency: ln((1 + n_docs) / (1 + df)) + 1.
std::vector<double> fit_idf(const FeatureMatrix& counts);
std::vector<double> fit_idf(const Vocabulary& vocab);

/// count * idf per entry, then each nonzero row scaled to unit L2 norm.
FeatureMatrix tfidf_transform(const FeatureMatrix& counts, std::span<const double> idf);
FeatureMatrix tfidf_transform(const FeatureMatrix& counts);

/// Dense embedding file: "<count> <dim>" then "<docno> v1 ... v_dim" per row.
FeatureMatrix load_embeddings(std::istream& in);
FeatureMatrix load_embeddings(const std::string& path);
void write_embeddings(const FeatureMatrix& matrix, std::ostream& out);

/// Sparse feature file: "sparse <count> <dim>" then "<docno> i:v i:v ..." per row.
FeatureMatrix load_sparse_features(std::istream& in);
void write_sparse_features(const FeatureMatrix& matrix, std::ostream& out);

/// Reads either feature file flavour, dispatching on the header.
FeatureMatrix load_features(const std::string& path);
void save_features(const FeatureMatrix& matrix, const std::string& path);

/// Column means and population standard deviations (zero-variance columns get
/// scale 1).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    [[nodiscard]] std::vector<double> apply(std::span<const double> row) const;
    [[nodiscard]] FeatureMatrix apply(const FeatureMatrix& x) const;

    bool operator==(const Standardizer&) const = default;
};

Standardizer standardize_fit(const FeatureMatrix& x);
FeatureMatrix standardize_apply(const FeatureMatrix& x, const Standardizer& s);

}  // namespace riskrank
