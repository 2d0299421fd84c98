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

#include "riskrank/features.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "text_util.hpp"

namespace riskrank {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       std::size_t n_docs)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs) {
    if (terms_.size() != doc_freq_.size()) {
        throw Error("vocabulary terms and document frequencies differ in length");
    }
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i > 0 && !(terms_[i - 1] < terms_[i])) {
            throw Error("vocabulary terms must be unique and sorted");
        }
        if (doc_freq_[i] > n_docs_) {
            throw Error("document frequency of '" + terms_[i] + "' exceeds the document count");
        }
        index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    }
}

std::optional<std::uint32_t> Vocabulary::index(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Vocabulary fit_vocabulary(const TokenDocs& docs, std::size_t min_df, double max_df_fraction,
                          std::optional<std::size_t> max_features) {
    if (docs.empty()) {
        throw Error("cannot fit a vocabulary on an empty corpus");
    }
    if (min_df < 1) {
        throw Error("min_df must be at least 1");
    }
    if (!(max_df_fraction > 0.0 && max_df_fraction <= 1.0)) {
        throw Error("max_df_fraction must lie in (0, 1]");
    }
    if (max_features && *max_features == 0) {
        throw Error("max_features must be positive");
    }
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::unordered_set<std::string_view> distinct(doc.begin(), doc.end());
        for (std::string_view t : distinct) {
            ++df[std::string(t)];
        }
    }
    auto n = static_cast<double>(docs.size());
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [term, count] : df) {
        if (count >= min_df && static_cast<double>(count) / n <= max_df_fraction) {
            kept.emplace_back(term, count);
        }
    }
    if (max_features && kept.size() > *max_features) {
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        kept.resize(*max_features);
        std::sort(kept.begin(), kept.end());
    }
    std::vector<std::string> terms;
    std::vector<std::size_t> freqs;
    terms.reserve(kept.size());
    freqs.reserve(kept.size());
    for (auto& [term, count] : kept) {
        terms.push_back(term);
        freqs.push_back(count);
    }
    return {std::move(terms), std::move(freqs), docs.size()};
}

std::vector<double> SparseVector::to_dense(std::size_t dim) const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out.at(indices[k]) = values[k];
    }
    return out;
}

SparseVector count_vectorize(std::span<const std::string> tokens, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const std::string& t : tokens) {
        if (auto idx = vocab.index(t)) {
            counts[*idx] += 1.0;
        }
    }
    SparseVector v;
    v.indices.reserve(counts.size());
    v.values.reserve(counts.size());
    for (auto [idx, c] : counts) {
        v.indices.push_back(idx);
        v.values.push_back(c);
    }
    return v;
}

FeatureMatrix FeatureMatrix::dense(std::vector<std::string> docnos, std::size_t dim,
                                   std::vector<double> values) {
    if (values.size() != docnos.size() * dim) {
        throw Error("dense feature matrix: expected " + std::to_string(docnos.size() * dim) +
                    " values, got " + std::to_string(values.size()));
    }
    if (!all_finite(values)) {
        throw Error("dense feature matrix contains a non-finite value");
    }
    FeatureMatrix m;
    m.docnos_ = std::move(docnos);
    m.dim_ = dim;
    m.sparse_ = false;
    m.dense_values_ = std::move(values);
    m.build_index();
    return m;
}

FeatureMatrix FeatureMatrix::sparse(std::vector<std::string> docnos, std::size_t dim,
                                    std::vector<SparseVector> rows) {
    if (rows.size() != docnos.size()) {
        throw Error("sparse feature matrix: row count differs from docno count");
    }
    for (const SparseVector& r : rows) {
        if (r.indices.size() != r.values.size()) {
            throw Error("sparse row has mismatched indices and values");
        }
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            if (r.indices[k] >= dim || (k > 0 && r.indices[k - 1] >= r.indices[k])) {
                throw Error("sparse row indices must be increasing and below the dimension");
            }
            if (!std::isfinite(r.values[k])) {
                throw Error("sparse feature matrix contains a non-finite value");
            }
        }
    }
    FeatureMatrix m;
    m.docnos_ = std::move(docnos);
    m.dim_ = dim;
    m.sparse_ = true;
    m.sparse_rows_ = std::move(rows);
    m.build_index();
    return m;
}

FeatureMatrix FeatureMatrix::from_rows(std::vector<std::string> docnos,
                                       const std::vector<std::vector<double>>& rows) {
    std::size_t dim = rows.empty() ? 0 : rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        if (r.size() != dim) {
            throw Error("rows of a dense matrix must have equal length");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return dense(std::move(docnos), dim, std::move(values));
}

void FeatureMatrix::build_index() {
    index_.clear();
    index_.reserve(docnos_.size());
    for (std::size_t i = 0; i < docnos_.size(); ++i) {
        if (!index_.emplace(docnos_[i], i).second) {
            throw Error("duplicate docno " + docnos_[i] + " in feature matrix");
        }
    }
}

std::optional<std::size_t> FeatureMatrix::find(const std::string& docno) const {
    auto it = index_.find(docno);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double FeatureMatrix::dot(std::size_t row, std::span<const double> weights) const {
    if (weights.size() != dim_) {
        throw Error("dimension mismatch: features have " + std::to_string(dim_) +
                    " columns, weights " + std::to_string(weights.size()));
    }
    double sum = 0.0;
    if (sparse_) {
        const SparseVector& r = sparse_rows_[row];
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            sum += r.values[k] * weights[r.indices[k]];
        }
    } else {
        const double* base = dense_values_.data() + row * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            sum += base[j] * weights[j];
        }
    }
    return sum;
}

void FeatureMatrix::add_scaled_row(std::size_t row, double alpha, std::span<double> out) const {
    if (sparse_) {
        const SparseVector& r = sparse_rows_[row];
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            out[r.indices[k]] += alpha * r.values[k];
        }
    } else {
        const double* base = dense_values_.data() + row * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            out[j] += alpha * base[j];
        }
    }
}

std::vector<double> FeatureMatrix::dense_row(std::size_t row) const {
    if (sparse_) {
        return sparse_rows_.at(row).to_dense(dim_);
    }
    auto s = row_span(row);
    return {s.begin(), s.end()};
}

std::span<const double> FeatureMatrix::row_span(std::size_t row) const {
    if (sparse_) {
        throw Error("row_span requires dense storage");
    }
    return {dense_values_.data() + row * dim_, dim_};
}

const SparseVector& FeatureMatrix::sparse_row(std::size_t row) const {
    if (!sparse_) {
        throw Error("sparse_row requires sparse storage");
    }
    return sparse_rows_.at(row);
}

double FeatureMatrix::min_value() const {
    double lo = 0.0;
    bool any = false;
    if (sparse_) {
        for (const auto& r : sparse_rows_) {
            for (double v : r.values) {
                lo = any ? std::min(lo, v) : v;
                any = true;
            }
        }
        // Implicit zeros.
        return any ? std::min(lo, 0.0) : 0.0;
    }
    for (double v : dense_values_) {
        lo = any ? std::min(lo, v) : v;
        any = true;
    }
    return lo;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> rows) const {
    std::vector<std::string> docnos;
    docnos.reserve(rows.size());
    for (std::size_t r : rows) {
        docnos.push_back(docnos_.at(r));
    }
    if (sparse_) {
        std::vector<SparseVector> out;
        out.reserve(rows.size());
        for (std::size_t r : rows) {
            out.push_back(sparse_rows_[r]);
        }
        return sparse(std::move(docnos), dim_, std::move(out));
    }
    std::vector<double> values;
    values.reserve(rows.size() * dim_);
    for (std::size_t r : rows) {
        auto s = row_span(r);
        values.insert(values.end(), s.begin(), s.end());
    }
    return dense(std::move(docnos), dim_, std::move(values));
}

bool FeatureMatrix::operator==(const FeatureMatrix& other) const {
    return docnos_ == other.docnos_ && dim_ == other.dim_ && sparse_ == other.sparse_ &&
           dense_values_ == other.dense_values_ && sparse_rows_ == other.sparse_rows_;
}

FeatureMatrix count_matrix(const TokenDocs& docs, std::vector<std::string> docnos,
                           const Vocabulary& vocab) {
    if (docs.size() != docnos.size()) {
        throw Error("count_matrix: token documents and docnos differ in length");
    }
    std::vector<SparseVector> rows;
    rows.reserve(docs.size());
    for (const auto& doc : docs) {
        rows.push_back(count_vectorize(doc, vocab));
    }
    return FeatureMatrix::sparse(std::move(docnos), vocab.size(), std::move(rows));
}

namespace {

std::vector<double> idf_from_df(const std::vector<std::size_t>& df, std::size_t n_docs) {
    std::vector<double> idf(df.size());
    for (std::size_t t = 0; t < df.size(); ++t) {
        idf[t] = std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df[t]))) +
                 1.0;
    }
    return idf;
}

}  // namespace

std::vector<double> fit_idf(const FeatureMatrix& counts) {
    std::vector<std::size_t> df(counts.dim(), 0);
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        counts.for_each_nonzero(i, [&](std::size_t j, double v) {
            if (v < 0.0) {
                throw Error("tf-idf requires non-negative counts");
            }
            ++df[j];
        });
    }
    return idf_from_df(df, counts.rows());
}

std::vector<double> fit_idf(const Vocabulary& vocab) {
    return idf_from_df(vocab.doc_freq(), vocab.n_docs());
}

FeatureMatrix tfidf_transform(const FeatureMatrix& counts, std::span<const double> idf) {
    if (idf.size() != counts.dim()) {
        throw Error("idf length differs from the feature dimension");
    }
    std::vector<SparseVector> rows;
    rows.reserve(counts.rows());
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        SparseVector r;
        double norm2 = 0.0;
        counts.for_each_nonzero(i, [&](std::size_t j, double v) {
            if (v < 0.0) {
                throw Error("tf-idf requires non-negative counts");
            }
            double w = v * idf[j];
            r.indices.push_back(static_cast<std::uint32_t>(j));
            r.values.push_back(w);
            norm2 += w * w;
        });
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (double& v : r.values) {
                v *= inv;
            }
        }
        rows.push_back(std::move(r));
    }
    return FeatureMatrix::sparse(counts.docnos(), counts.dim(), std::move(rows));
}

FeatureMatrix tfidf_transform(const FeatureMatrix& counts) {
    return tfidf_transform(counts, fit_idf(counts));
}

namespace {

bool parse_real(std::string_view s, double& value) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& value) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_real(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

[[noreturn]] void fail_at(std::size_t line_no, const std::string& why) {
    throw ParseError("line " + std::to_string(line_no) + ": " + why, line_no);
}

}  // namespace

FeatureMatrix load_embeddings(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        fail_at(1, "missing '<count> <dim>' header");
    }
    ++line_no;
    auto header = detail::split_whitespace(line);
    std::size_t count = 0;
    std::size_t dim = 0;
    if (header.size() != 2 || !parse_size(header[0], count) || !parse_size(header[1], dim) ||
        dim == 0) {
        fail_at(line_no, "header must be '<count> <dim>' with positive dim");
    }
    std::vector<std::string> docnos;
    std::vector<double> values;
    docnos.reserve(count);
    values.reserve(count * dim);
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        if (docnos.size() == count) {
            fail_at(line_no, "more rows than the header count " + std::to_string(count));
        }
        if (fields.size() != dim + 1) {
            fail_at(line_no, "expected docno plus " + std::to_string(dim) + " values, found " +
                                 std::to_string(fields.size() - 1));
        }
        std::string docno(fields[0]);
        if (!seen.insert(docno).second) {
            fail_at(line_no, "duplicate docno " + docno);
        }
        for (std::size_t j = 1; j < fields.size(); ++j) {
            double v = 0.0;
            if (!parse_real(fields[j], v) || !std::isfinite(v)) {
                fail_at(line_no, "value '" + std::string(fields[j]) + "' is not a finite real");
            }
            values.push_back(v);
        }
        docnos.push_back(std::move(docno));
    }
    if (docnos.size() != count) {
        fail_at(line_no, "header promised " + std::to_string(count) + " rows, found " +
                             std::to_string(docnos.size()));
    }
    return FeatureMatrix::dense(std::move(docnos), dim, std::move(values));
}

FeatureMatrix load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open embedding file " + path);
    }
    return load_embeddings(in);
}

void write_embeddings(const FeatureMatrix& matrix, std::ostream& out) {
    out << matrix.rows() << ' ' << matrix.dim() << '\n';
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << matrix.docnos()[i];
        for (double v : matrix.dense_row(i)) {
            out << ' ' << format_real(v);
        }
        out << '\n';
    }
    if (!out) {
        throw Error("failed to write embeddings");
    }
}

FeatureMatrix load_sparse_features(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        fail_at(1, "missing 'sparse <count> <dim>' header");
    }
    auto header = detail::split_whitespace(line);
    std::size_t count = 0;
    std::size_t dim = 0;
    if (header.size() != 3 || header[0] != "sparse" || !parse_size(header[1], count) ||
        !parse_size(header[2], dim)) {
        fail_at(line_no, "header must be 'sparse <count> <dim>'");
    }
    std::vector<std::string> docnos;
    std::vector<SparseVector> rows;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        if (docnos.size() == count) {
            fail_at(line_no, "more rows than the header count " + std::to_string(count));
        }
        SparseVector r;
        for (std::size_t k = 1; k < fields.size(); ++k) {
            auto colon = fields[k].find(':');
            std::size_t idx = 0;
            double v = 0.0;
            if (colon == std::string_view::npos || !parse_size(fields[k].substr(0, colon), idx) ||
                !parse_real(fields[k].substr(colon + 1), v) || !std::isfinite(v)) {
                fail_at(line_no, "bad entry '" + std::string(fields[k]) + "'");
            }
            if (idx >= dim || (!r.indices.empty() && r.indices.back() >= idx)) {
                fail_at(line_no, "indices must be increasing and below " + std::to_string(dim));
            }
            r.indices.push_back(static_cast<std::uint32_t>(idx));
            r.values.push_back(v);
        }
        docnos.emplace_back(fields[0]);
        rows.push_back(std::move(r));
    }
    if (docnos.size() != count) {
        fail_at(line_no, "header promised " + std::to_string(count) + " rows, found " +
                             std::to_string(docnos.size()));
    }
    try {
        return FeatureMatrix::sparse(std::move(docnos), dim, std::move(rows));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail_at(line_no, e.what());
    }
}

void write_sparse_features(const FeatureMatrix& matrix, std::ostream& out) {
    out << "sparse " << matrix.rows() << ' ' << matrix.dim() << '\n';
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << matrix.docnos()[i];
        matrix.for_each_nonzero(i, [&out](std::size_t j, double v) {
            out << ' ' << j << ':' << format_real(v);
        });
        out << '\n';
    }
    if (!out) {
        throw Error("failed to write sparse features");
    }
}

FeatureMatrix load_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open feature file " + path);
    }
    std::array<char, 6> probe{};
    in.read(probe.data(), probe.size());
    bool is_sparse = in.gcount() == 6 && std::string_view(probe.data(), 6) == "sparse";
    in.clear();
    in.seekg(0);
    return is_sparse ? load_sparse_features(in) : load_embeddings(in);
}

void save_features(const FeatureMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write feature file " + path);
    }
    if (matrix.is_sparse()) {
        write_sparse_features(matrix, out);
    } else {
        write_embeddings(matrix, out);
    }
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
    if (row.size() != mean.size()) {
        throw Error("standardizer dimension mismatch: expected " + std::to_string(mean.size()) +
                    ", got " + std::to_string(row.size()));
    }
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        out[j] = (row[j] - mean[j]) / scale[j];
    }
    return out;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
    if (x.dim() != mean.size()) {
        throw Error("standardizer dimension mismatch: expected " + std::to_string(mean.size()) +
                    ", got " + std::to_string(x.dim()));
    }
    std::vector<double> values;
    values.reserve(x.rows() * x.dim());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = apply(x.dense_row(i));
        values.insert(values.end(), row.begin(), row.end());
    }
    return FeatureMatrix::dense(x.docnos(), x.dim(), std::move(values));
}

Standardizer standardize_fit(const FeatureMatrix& x) {
    if (x.rows() < 2) {
        throw Error("standardization needs at least 2 rows");
    }
    std::size_t d = x.dim();
    auto n = static_cast<double>(x.rows());
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
    std::vector<bool> constant(d, true);
    std::vector<double> first = x.dense_row(0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = x.dense_row(i);
        for (std::size_t j = 0; j < d; ++j) {
            s.mean[j] += row[j];
            constant[j] = constant[j] && row[j] == first[j];
        }
    }
    for (double& m : s.mean) {
        m /= n;
    }
    std::vector<double> ss(d, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = x.dense_row(i);
        for (std::size_t j = 0; j < d; ++j) {
            double c = row[j] - s.mean[j];
            ss[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (constant[j]) {
            s.mean[j] = first[j];
            s.scale[j] = 1.0;
            continue;
        }
        double sd = std::sqrt(ss[j] / n);
        s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

FeatureMatrix standardize_apply(const FeatureMatrix& x, const Standardizer& s) {
    return s.apply(x);
}

}  // namespace riskrank
