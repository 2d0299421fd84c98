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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "riskrank/features.hpp"
#include "riskrank/pca.hpp"
#include "riskrank/synth.hpp"
#include "riskrank/word2vec.hpp"

using namespace riskrank;
using doctest::Approx;

TEST_CASE("vocabulary fitting") {
    TokenDocs docs{{"a", "b"}, {"a"}};
    auto v = fit_vocabulary(docs);
    CHECK(v.terms() == std::vector<std::string>{"a", "b"});
    CHECK(v.doc_freq() == std::vector<std::size_t>{2, 1});
    CHECK(v.n_docs() == 2);
    CHECK(*v.index("b") == 1);
    CHECK_FALSE(v.index("zzz").has_value());

    CHECK(fit_vocabulary(docs, 2).terms() == std::vector<std::string>{"a"});
    CHECK(fit_vocabulary(docs, 1, 0.5).terms() == std::vector<std::string>{"b"});
    CHECK_THROWS(fit_vocabulary(docs, 1, 1.0, 0));
    CHECK_THROWS(fit_vocabulary({}, 1));
    CHECK_THROWS(fit_vocabulary(docs, 0));

    TokenDocs wide{{"c", "d", "e"}, {"c", "e"}, {"e", "b"}, {"b"}};
    // df: b 2, c 2, d 1, e 3 -> keep e, then b/c tie broken lexicographically.
    auto top = fit_vocabulary(wide, 1, 1.0, 2);
    CHECK(top.terms() == std::vector<std::string>{"b", "e"});
}

TEST_CASE("vocabulary indices are a bijection") {
    Rng rng(1);
    TokenDocs docs;
    for (int i = 0; i < 50; ++i) {
        std::vector<std::string> d;
        for (int j = 0; j < 20; ++j) {
            d.push_back("t" + std::to_string(rng.below(300)));
        }
        docs.push_back(d);
    }
    auto v = fit_vocabulary(docs);
    std::set<std::uint32_t> seen;
    for (const auto& t : v.terms()) {
        seen.insert(*v.index(t));
    }
    CHECK(seen.size() == v.size());
    CHECK(*seen.rbegin() == v.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(v.doc_freq()[i] <= v.n_docs());
    }
}

TEST_CASE("count vectorization") {
    Vocabulary vocab({"depressed", "feel"}, {1, 1}, 1);
    std::vector<std::string> tokens{"i", "feel", "depressed"};
    auto v = count_vectorize(tokens, vocab);
    CHECK(v.to_dense(2) == std::vector<double>{1, 1});
    CHECK(count_vectorize(std::vector<std::string>{}, vocab).indices.empty());
    std::vector<std::string> five(5, "feel");
    CHECK(count_vectorize(five, vocab).to_dense(2) == std::vector<double>{0, 5});
}

TEST_CASE("tf-idf") {
    TokenDocs docs{{"a", "b"}, {"a"}};
    auto vocab = fit_vocabulary(docs);
    auto idf = fit_idf(vocab);
    CHECK(idf[0] == Approx(1.0).epsilon(1e-12));
    CHECK(idf[1] == Approx(std::log(1.5) + 1.0).epsilon(1e-12));
    CHECK(idf[1] == Approx(1.405465).epsilon(1e-6));

    TokenDocs more{{"a", "b", "b"}, {"a"}, {}, {"zz"}};
    auto counts = count_matrix(more, {"d0", "d1", "d2", "d3"}, vocab);
    auto tfidf = tfidf_transform(counts, idf);
    for (std::size_t i = 0; i < tfidf.rows(); ++i) {
        auto row = tfidf.dense_row(i);
        double norm = 0.0;
        for (double x : row) {
            norm += x * x;
        }
        if (i < 2) {
            CHECK(std::sqrt(norm) == Approx(1.0).epsilon(1e-9));
        } else {
            CHECK(norm == 0.0);
        }
    }
    auto r0 = tfidf.dense_row(0);
    CHECK(r0[1] / r0[0] == Approx(2.0 * idf[1]).epsilon(1e-12));
}

TEST_CASE("embedding file format") {
    std::istringstream one("1 3\nd1 0.0 1.0 0.0\n");
    auto m = load_embeddings(one);
    CHECK(m.rows() == 1);
    CHECK(m.dim() == 3);
    CHECK(m.dense_row(0) == std::vector<double>{0.0, 1.0, 0.0});

    std::istringstream short_file("2 3\nd1 0 1 0\n");
    CHECK_THROWS_AS(load_embeddings(short_file), ParseError);
    std::istringstream bad_value("1 2\nd1 0 nan\n");
    CHECK_THROWS_AS(load_embeddings(bad_value), ParseError);
    std::istringstream wrong_dim("1 2\nd1 0 1 2\n");
    CHECK_THROWS_AS(load_embeddings(wrong_dim), ParseError);
    std::istringstream dup("2 1\nd1 0\nd1 1\n");
    try {
        load_embeddings(dup);
        FAIL("expected a duplicate error");
    } catch (const ParseError& e) {
        CHECK(e.location() == 3);
    }
    std::istringstream sci("1 2\nx 1e-3 -2.5E2\n");
    CHECK(load_embeddings(sci).dense_row(0) == std::vector<double>{1e-3, -250.0});
}

TEST_CASE("embedding round-trip") {
    Rng rng(8);
    std::vector<std::vector<double>> rows(100, std::vector<double>(384));
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ids.push_back("doc" + std::to_string(i));
        for (auto& v : rows[i]) {
            v = rng.normal();
        }
    }
    auto m = FeatureMatrix::from_rows(ids, rows);
    std::stringstream buf;
    write_embeddings(m, buf);
    auto back = load_embeddings(buf);
    REQUIRE(back.rows() == 100);
    CHECK(back.docnos() == ids);
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        auto r = back.dense_row(i);
        for (std::size_t j = 0; j < 384; ++j) {
            worst = std::max(worst, std::abs(r[j] - rows[i][j]));
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("sparse feature round-trip") {
    TokenDocs docs{{"a", "b", "b"}, {"c"}, {}};
    auto vocab = fit_vocabulary(docs);
    auto counts = count_matrix(docs, {"x", "y", "z"}, vocab);
    std::stringstream buf;
    write_sparse_features(counts, buf);
    CHECK(load_sparse_features(buf) == counts);
    auto tfidf = tfidf_transform(counts);
    std::stringstream buf2;
    write_sparse_features(tfidf, buf2);
    CHECK(load_sparse_features(buf2) == tfidf);
}

TEST_CASE("standardization") {
    auto m = FeatureMatrix::from_rows({"a", "b"}, {{0.0, 5.0}, {2.0, 5.0}});
    auto s = standardize_fit(m);
    CHECK(s.mean == std::vector<double>{1.0, 5.0});
    CHECK(s.scale == std::vector<double>{1.0, 1.0});
    auto z = standardize_apply(m, s);
    CHECK(z.dense_row(0) == std::vector<double>{-1.0, 0.0});
    CHECK(z.dense_row(1) == std::vector<double>{1.0, 0.0});
    CHECK_THROWS(standardize_fit(FeatureMatrix::from_rows({"a"}, {{1.0}})));

    Rng rng(4);
    auto x = oracle::to_features(oracle::random_matrix(30, 5, rng));
    auto zx = standardize_apply(x, standardize_fit(x));
    auto again = standardize_fit(zx);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(std::abs(again.mean[j]) <= 1e-9);
        CHECK(again.scale[j] * again.scale[j] == Approx(1.0).epsilon(1e-6));
    }
}

namespace {

void check_pca_against_oracle(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    auto raw = oracle::random_matrix(n, d, rng);
    // Correlated columns so the spectrum is not flat.
    for (auto& r : raw) {
        for (std::size_t j = 1; j < d; ++j) {
            r[j] += 0.5 * r[j - 1];
        }
    }
    auto x = oracle::to_features(raw);
    auto model = pca_fit(x, d);
    auto z = oracle::standardized(raw);
    auto eig = oracle::jacobi(oracle::covariance(z));
    for (std::size_t i = 0; i < d; ++i) {
        CHECK(std::abs(model.eigenvalues[i] - eig.values[i]) <= 1e-8);
    }
    // Projections match wherever the eigenvalue is well separated.
    auto projected = pca_transform(x, model);
    for (std::size_t c = 0; c < d; ++c) {
        bool separated = (c == 0 || eig.values[c - 1] - eig.values[c] > 1e-3) &&
                         (c + 1 == d || eig.values[c] - eig.values[c + 1] > 1e-3);
        if (!separated) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double expected = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                expected += eig.vectors[c][j] * z[i][j];
            }
            CHECK(std::abs(projected.dense_row(i)[c] - expected) <= 1e-8);
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                dot += model.component(a)[j] * model.component(b)[j];
            }
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
        }
    }
}

}  // namespace

TEST_CASE("PCA matches a Jacobi eigensolver") {
    check_pca_against_oracle(20, 6, 1);
    check_pca_against_oracle(100, 50, 2);
}

TEST_CASE("PCA edge cases") {
    SUBCASE("points on a line") {
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < 10; ++i) {
            rows.push_back({static_cast<double>(i), 2.0 * i + 1.0});
        }
        auto x = FeatureMatrix::from_rows({"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"}, rows);
        auto model = pca_fit(x, 2, false);
        CHECK(model.eigenvalues[0] / model.total_variance == Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(model.eigenvalues[1]) <= 1e-9);
        auto one = pca_fit(x, 1, false);
        auto scores = pca_transform(x, one);
        double unit = std::sqrt(5.0);
        for (int i = 0; i < 10; ++i) {
            // Signed distance from the mean point along the line.
            CHECK(std::abs(std::abs(scores.dense_row(i)[0]) - std::abs((i - 4.5) * unit)) <= 1e-9);
        }
    }
    SUBCASE("full rank reconstruction and centering") {
        Rng rng(12);
        auto x = oracle::to_features(oracle::random_matrix(15, 4, rng));
        auto model = pca_fit(x, 4);
        auto back = pca_inverse_transform(pca_transform(x, model), model);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                CHECK(std::abs(back.dense_row(i)[j] - x.dense_row(i)[j]) < 1e-6);
            }
        }
        auto at_mean = pca_transform(model.mean, model);
        for (double v : at_mean) {
            CHECK(std::abs(v) <= 1e-12);
        }
        double sum = 0.0;
        for (double e : model.eigenvalues) {
            sum += e;
        }
        CHECK(sum == Approx(model.total_variance).epsilon(1e-9));
        auto partial = pca_fit(x, 2);
        CHECK(partial.eigenvalues[0] + partial.eigenvalues[1] <= model.total_variance + 1e-12);
    }
    SUBCASE("transformed covariance is diagonal") {
        Rng rng(13);
        auto x = oracle::to_features(oracle::random_matrix(40, 6, rng));
        auto model = pca_fit(x, 3);
        auto scores = pca_transform(x, model);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < scores.rows(); ++i) {
            rows.push_back(scores.dense_row(i));
        }
        auto cov = oracle::covariance(rows);
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                CHECK(std::abs(cov[a][b] - (a == b ? model.eigenvalues[a] : 0.0)) <= 1e-6);
            }
        }
    }
    SUBCASE("errors") {
        Rng rng(14);
        auto x = oracle::to_features(oracle::random_matrix(5, 8, rng));
        CHECK_THROWS(pca_fit(x, 0));
        CHECK_THROWS(pca_fit(x, 5));
        auto model = pca_fit(x, 4);
        CHECK_THROWS(pca_transform(std::vector<double>(3, 0.0), model));
    }
}

TEST_CASE("word2vec determinism and initialization") {
    auto corpus = generate_two_topic_corpus(200, 5, 1);
    Word2VecConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 2;
    auto a = train_word2vec(corpus.sentences, cfg);
    auto b = train_word2vec(corpus.sentences, cfg);
    CHECK(a == b);
    CHECK(all_finite(a.input));

    cfg.epochs = 0;
    auto zero = train_word2vec(corpus.sentences, cfg);
    Rng rng(cfg.seed);
    bool matches = true;
    for (double v : zero.input) {
        matches = matches && v == (rng.uniform() - 0.5) / static_cast<double>(cfg.dim);
    }
    CHECK(matches);
    CHECK(std::all_of(zero.output.begin(), zero.output.end(), [](double v) { return v == 0.0; }));

    Word2VecConfig wide;
    wide.window = 50;
    CHECK_THROWS(train_word2vec(TokenDocs{{"a", "b", "c"}}, wide));
}

TEST_CASE("word2vec separates planted topics and its loss falls") {
    auto corpus = generate_two_topic_corpus();
    for (auto mode : {Word2VecMode::cbow, Word2VecMode::skipgram}) {
        Word2VecConfig cfg;
        cfg.dim = 50;
        cfg.mode = mode;
        auto model = train_word2vec(corpus.sentences, cfg);
        auto cos = topic_cosines(model, corpus.topic_a, corpus.topic_b);
        CHECK(cos.intra - cos.inter >= 0.1);
        REQUIRE(model.epoch_loss.size() == 5);
        for (double l : model.epoch_loss) {
            CHECK(std::isfinite(l));
        }
        CHECK(model.epoch_loss.back() < model.epoch_loss.front());
    }
}

TEST_CASE("document vectors") {
    Word2VecModel m;
    m.config.dim = 2;
    m.terms = {"a", "b"};
    m.counts = {1, 1};
    m.input = {1.0, 2.0, 3.0, 6.0};
    m.output = {0, 0, 0, 0};
    CHECK(doc_vector(std::vector<std::string>{"a"}, m) == std::vector<double>{1.0, 2.0});
    CHECK(doc_vector(std::vector<std::string>{"a", "b", "zz"}, m) == std::vector<double>{2.0, 4.0});
    CHECK(doc_vector(std::vector<std::string>{"zz"}, m) == std::vector<double>{0.0, 0.0});
    CHECK(doc_vector(std::vector<std::string>{}, m) == std::vector<double>{0.0, 0.0});
}
