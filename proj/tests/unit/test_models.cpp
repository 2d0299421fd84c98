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

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "riskrank/bank.hpp"
#include "riskrank/forest.hpp"
#include "riskrank/models.hpp"

using namespace riskrank;
using doctest::Approx;

namespace {

FeatureMatrix rows(const std::vector<std::vector<double>>& values) {
    return oracle::to_features(values);
}

// Two Gaussian blobs pushed apart so that a margin of at least 1 separates them.
void separable_2d(std::size_t n, std::uint64_t seed, std::vector<std::vector<double>>& x,
                  std::vector<int>& y) {
    Rng rng(seed);
    while (x.size() < n) {
        double a = rng.uniform(-3, 3);
        double b = rng.uniform(-3, 3);
        double side = a + 2 * b - 0.5;
        if (std::abs(side) < 1.0) {
            continue;
        }
        x.push_back({a, b});
        y.push_back(side > 0 ? 1 : 0);
    }
}

}  // namespace

TEST_CASE("logistic basics") {
    auto x = rows({{-1.0}, {1.0}});
    std::vector<int> y{0, 1};
    LogisticConfig none;
    none.epochs = 0;
    auto zero = train_logistic(x, y, none);
    CHECK(zero.weights == std::vector<double>{0.0});
    CHECK(zero.bias == 0.0);
    CHECK(predict_proba(zero, std::vector<double>{3.0}) == 0.5);

    auto m = train_logistic(x, y);
    CHECK(predict_proba(m, std::vector<double>{1.0}) > 0.5);
    CHECK(predict_proba(m, std::vector<double>{-1.0}) < 0.5);

    CHECK_THROWS(train_logistic(x, std::vector<int>{0}));
    CHECK_THROWS(train_logistic(x, std::vector<int>{0, 2}));
    CHECK_THROWS(predict_proba(m, std::vector<double>{1.0, 2.0}));
}

TEST_CASE("logistic predict_proba arithmetic") {
    LogisticModel big{{100.0}, 0.0, {}};
    CHECK(predict_proba(big, std::vector<double>{1.0}) == Approx(1.0).epsilon(1e-6));
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        LogisticModel m{{rng.normal(), rng.normal(), rng.normal()}, rng.normal(), {}};
        std::vector<double> v{rng.normal(), rng.normal(), rng.normal()};
        double z = m.bias + m.weights[0] * v[0] + m.weights[1] * v[1] + m.weights[2] * v[2];
        CHECK(std::abs(predict_proba(m, v) - 1.0 / (1.0 + std::exp(-z))) <= 1e-12);
    }
}

TEST_CASE("logistic separates linearly separable data with non-increasing loss") {
    std::vector<std::vector<double>> xs;
    std::vector<int> y;
    separable_2d(200, 5, xs, y);
    auto x = rows(xs);
    LogisticConfig cfg;
    cfg.epochs = 500;
    TrainingTrace trace;
    auto m = train_logistic(x, y, cfg, &trace);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        correct += (predict_proba(m, xs[i]) >= 0.5) == (y[i] == 1) ? 1 : 0;
    }
    CHECK(correct == xs.size());
    REQUIRE(trace.loss.size() == cfg.epochs + 1);
    for (std::size_t e = 1; e < trace.loss.size(); ++e) {
        CHECK(trace.loss[e] <= trace.loss[e - 1]);
    }
    CHECK(trace.loss.back() < trace.loss.front());
    CHECK(train_logistic(x, y, cfg) == m);
}

TEST_CASE("naive Bayes") {
    // Vocabulary [happy, sad].
    auto x = rows({{0.0, 1.0}, {1.0, 0.0}});
    std::vector<int> y{1, 0};
    auto m = train_naive_bayes(x, y, 1.0);
    // P(sad|1) = 2/3, P(sad|0) = 1/3, equal priors.
    double expected = (4.0 / 9.0) / (4.0 / 9.0 + 1.0 / 9.0);
    CHECK(std::abs(nb_predict_proba(m, std::vector<double>{0.0, 2.0}) - expected) <= 1e-9);
    CHECK(nb_predict_proba(m, std::vector<double>{0.0, 2.0}) > 0.5);

    for (std::size_t c = 0; c < 2; ++c) {
        double sum = 0.0;
        for (double l : m.class_log_likelihood(c)) {
            sum += std::exp(l);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }

    auto swapped = train_naive_bayes(rows({{1.0, 0.0}, {0.0, 1.0}}), std::vector<int>{1, 0}, 1.0);
    auto swapped_labels = train_naive_bayes(x, std::vector<int>{0, 1}, 1.0);
    std::vector<double> doc{3.0, 1.0};
    std::vector<double> mirrored{1.0, 3.0};
    CHECK(nb_predict_proba(swapped_labels, doc) ==
          Approx(1.0 - nb_predict_proba(m, doc)).epsilon(1e-12));
    CHECK(nb_predict_proba(swapped, mirrored) == Approx(nb_predict_proba(m, doc)).epsilon(1e-12));

    CHECK_THROWS(train_naive_bayes(rows({{-1.0, 0.0}, {1.0, 0.0}}), y, 1.0));
    CHECK_THROWS(nb_predict_proba(m, std::vector<double>{-1.0, 0.0}));
    CHECK_THROWS(train_naive_bayes(x, y, 0.0));
    CHECK_THROWS(train_naive_bayes(x, std::vector<int>{1, 1}, 1.0));
}

TEST_CASE("naive Bayes posterior properties") {
    Rng rng(9);
    std::vector<std::vector<double>> xs;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> r(8);
        for (auto& v : r) {
            v = static_cast<double>(rng.below(4));
        }
        xs.push_back(r);
        y.push_back(static_cast<int>(rng.below(2)));
    }
    y[0] = 0;
    y[1] = 1;
    auto m = train_naive_bayes(rows(xs), y);
    for (const auto& r : xs) {
        auto p = nb_posterior(m, r);
        CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-9);
        std::vector<double> scaled = r;
        for (auto& v : scaled) {
            v *= 3.0;
        }
        auto q = nb_posterior(m, scaled);
        if (std::abs(p[1] - 0.5) > 1e-12) {
            CHECK((p[1] > 0.5) == (q[1] > 0.5));
        }
    }
}

TEST_CASE("ridge limits") {
    std::vector<std::vector<double>> eye;
    std::vector<int> y;
    for (int i = 0; i < 4; ++i) {
        std::vector<double> r(4, 0.0);
        r[static_cast<std::size_t>(i)] = 1.0;
        eye.push_back(r);
        y.push_back(i);
    }
    auto tight = train_ridge(rows(eye), y, 1e-9);
    for (int i = 0; i < 4; ++i) {
        CHECK(ridge_predict(tight, eye[static_cast<std::size_t>(i)]) == i);
    }

    std::vector<std::vector<double>> xs{{0.1}, {0.2}, {0.3}, {0.4}, {0.5}};
    std::vector<int> labels{2, 2, 2, 5, 5};
    auto flat = train_ridge(rows(xs), labels, 1e9);
    for (const auto& r : xs) {
        CHECK(ridge_predict(flat, r) == 2);
    }
    CHECK(flat.classes == std::vector<int>{2, 5});
    CHECK_THROWS(train_ridge(rows(xs), labels, 0.0));
    CHECK_THROWS(ridge_predict(flat, std::vector<double>{1.0, 2.0}));

    // Tied scores go to the smaller label.
    RidgeModel tie{{1, 4}, {0.0, 0.0, 0.5, 0.5}, 1.0};
    CHECK(ridge_predict(tie, std::vector<double>{7.0}) == 1);
}

TEST_CASE("ridge closed form matches gradient descent and stationarity") {
    Rng rng(21);
    auto xs = oracle::random_matrix(40, 8, rng);
    std::vector<int> y;
    for (std::size_t i = 0; i < 40; ++i) {
        y.push_back(static_cast<int>(rng.below(3)));
    }
    const double lambda = 0.7;
    auto m = train_ridge(rows(xs), y, lambda);
    const std::size_t c = m.classes.size();
    auto w = oracle::ridge_gradient_descent(xs, y, m.classes, lambda, 20000);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 8; ++j) {
        for (std::size_t k = 0; k < c; ++k) {
            worst = std::max(worst, std::abs(m.weights[j * c + k] - w[j][k]));
        }
    }
    CHECK(worst <= 1e-6);

    // A^T (A W - Y) + lambda D W = 0.
    double norm2 = 0.0;
    for (std::size_t j = 0; j <= 8; ++j) {
        for (std::size_t k = 0; k < c; ++k) {
            double g = 0.0;
            for (std::size_t i = 0; i < 40; ++i) {
                double pred = m.weights[8 * c + k];
                for (std::size_t f = 0; f < 8; ++f) {
                    pred += xs[i][f] * m.weights[f * c + k];
                }
                double target = y[i] == m.classes[k] ? 1.0 : -1.0;
                g += (j < 8 ? xs[i][j] : 1.0) * (pred - target);
            }
            if (j < 8) {
                g += lambda * m.weights[j * c + k];
            }
            norm2 += g * g;
        }
    }
    CHECK(std::sqrt(norm2) <= 1e-6);
}

TEST_CASE("forest purity, separability and determinism") {
    Rng rng(31);
    auto xs = oracle::random_matrix(50, 4, rng);
    auto x = rows(xs);
    for (auto mode : {ForestMode::random_forest, ForestMode::extra_trees}) {
        ForestConfig cfg;
        cfg.mode = mode;
        cfg.n_trees = 10;
        auto pure = train_forest(x, std::vector<int>(50, 3), cfg);
        for (const auto& r : xs) {
            CHECK(forest_predict(pure, r) == 3);
        }

        std::vector<std::vector<double>> line;
        std::vector<int> y;
        for (int i = 0; i < 60; ++i) {
            line.push_back({rng.uniform(-1, 1)});
            y.push_back(line.back()[0] > 0.2 ? 1 : 0);
        }
        auto sep = train_forest(rows(line), y, cfg);
        for (std::size_t i = 0; i < line.size(); ++i) {
            CHECK(forest_predict(sep, line[i]) == y[i]);
        }
    }

    std::vector<int> labels;
    for (std::size_t i = 0; i < 50; ++i) {
        labels.push_back(static_cast<int>(rng.below(4)));
    }
    ForestConfig rf;
    rf.n_trees = 25;
    rf.seed = 5;
    ForestConfig et = rf;
    et.mode = ForestMode::extra_trees;
    auto a = train_forest(x, labels, rf);
    auto b = train_forest(x, labels, rf);
    rf.threads = 4;
    auto threaded = train_forest(x, labels, rf);
    auto e = train_forest(x, labels, et);
    CHECK(a == b);
    CHECK(a == threaded);
    bool differs = false;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> probe{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        CHECK(forest_predict(a, probe) == forest_predict(b, probe));
        differs = differs || forest_predict(a, probe) != forest_predict(e, probe);
    }
    CHECK(differs);
    for (const auto& tree : a.trees) {
        for (std::size_t nidx = 0; nidx < tree.nodes(); ++nidx) {
            if (tree.feature[nidx] >= 0) {
                CHECK(tree.left[nidx] > 0);
                CHECK(tree.right[nidx] > 0);
            }
        }
        for (double h : tree.histogram) {
            CHECK(h >= 0.0);
        }
    }
    CHECK_THROWS(train_forest(rows({{1.0}}), std::vector<int>{0}, rf));
}

namespace {

// Count features where question q's relevant docs contain token q.
struct RankFixture {
    FeatureMatrix features;
    std::vector<Qrel> qrels;
};

RankFixture rank_fixture(std::size_t questions, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> xs;
    std::vector<std::string> ids;
    std::vector<Qrel> qrels;
    for (std::size_t i = 0; i < 40 * questions; ++i) {
        std::vector<double> r(questions + 5, 0.0);
        std::size_t topic = i % questions;
        bool relevant = (i / questions) % 3 == 0;
        if (relevant) {
            r[topic] = 1.0 + static_cast<double>(rng.below(2));
        }
        for (int k = 0; k < 3; ++k) {
            r[questions + rng.below(5)] += 1.0;
        }
        ids.push_back("d" + std::to_string(i));
        xs.push_back(r);
        qrels.push_back({std::to_string(topic + 1), ids.back(), relevant ? 1 : 0});
    }
    return {FeatureMatrix::from_rows(ids, xs), qrels};
}

}  // namespace

TEST_CASE("ranking bank training and ranking") {
    auto fx = rank_fixture(21, 3);
    auto bank = train_question_bank_t1(fx.features, fx.qrels, ModelKind::logistic_count);
    CHECK(bank.keys.size() == 21);
    CHECK(bank.models.size() == 21);
    auto run = rank_documents(bank, fx.features, 1000, "t");
    validate_run(run);
    auto grouped = group_run(run);
    CHECK(grouped.size() == 21);
    for (const auto& [qid, entries] : grouped) {
        CHECK(entries.size() == fx.features.rows());
        // Relevant docs of the question come first.
        std::size_t topic = static_cast<std::size_t>(std::stoi(qid)) - 1;
        std::size_t n_rel = 0;
        for (const auto& q : fx.qrels) {
            n_rel += q.question_id == qid && q.relevance == 1 ? 1 : 0;
        }
        for (std::size_t r = 0; r < n_rel; ++r) {
            auto row = *fx.features.find(entries[r].docno);
            CHECK(fx.features.dense_row(row)[topic] > 0.0);
        }
    }

    RankTrainOptions threaded;
    threaded.threads = 4;
    CHECK(train_question_bank_t1(fx.features, fx.qrels, ModelKind::logistic_count, threaded) ==
          bank);
    auto nb = train_question_bank_t1(fx.features, fx.qrels, ModelKind::nb_count);
    CHECK(std::holds_alternative<NaiveBayesModel>(nb.models[0]));

    auto three = rank_documents(bank, fx.features, 3, "t");
    for (const auto& [qid, entries] : group_run(three)) {
        CHECK(entries.size() == 3);
    }
    CHECK_THROWS(rank_documents(bank, fx.features, 0, "t"));
    CHECK_THROWS(rank_documents(bank, fx.features, 1001, "t"));
    CHECK_THROWS(rank_documents(bank, FeatureMatrix::from_rows({}, {}), 10, "t"));
}

TEST_CASE("ranking bank errors") {
    auto fx = rank_fixture(21, 4);
    std::vector<Qrel> missing;
    for (const auto& q : fx.qrels) {
        if (q.question_id != "7") {
            missing.push_back(q);
        }
    }
    try {
        train_question_bank_t1(fx.features, missing, ModelKind::logistic_count);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
    std::vector<Qrel> single;
    for (auto q : fx.qrels) {
        if (q.question_id == "3") {
            q.relevance = 1;
        }
        single.push_back(q);
    }
    try {
        train_question_bank_t1(fx.features, single, ModelKind::logistic_count);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("question 3") != std::string::npos);
    }
    Rng rng(2);
    std::vector<std::vector<double>> emb;
    for (std::size_t i = 0; i < fx.features.rows(); ++i) {
        emb.push_back({rng.normal(), rng.normal()});
    }
    auto embedded = FeatureMatrix::from_rows(fx.features.docnos(), emb);
    CHECK_THROWS(train_question_bank_t1(embedded, fx.qrels, ModelKind::nb_count));
    CHECK_THROWS(train_question_bank_t1(fx.features, fx.qrels, ModelKind::ridge));
}

TEST_CASE("rank_documents ordering rules") {
    QuestionBank bank;
    bank.kind = ModelKind::logistic_embed;
    bank.dim = 1;
    bank.keys = {"1"};
    bank.models = {LogisticModel{{1.0}, 0.0, {}}};
    auto pool = FeatureMatrix::from_rows({"b", "a", "c"}, {{0.0}, {2.0}, {-2.0}});
    auto run = rank_documents(bank, pool, 1000, "x");
    REQUIRE(run.size() == 3);
    CHECK(run[0].docno == "a");
    CHECK(run[1].docno == "b");
    CHECK(run[2].docno == "c");
    CHECK(run[2].rank == 3);

    auto ties = FeatureMatrix::from_rows({"z", "m", "a"}, {{1.0}, {1.0}, {1.0}});
    run = rank_documents(bank, ties, 1000, "x");
    CHECK(run[0].docno == "a");
    CHECK(run[1].docno == "m");
    CHECK(run[2].docno == "z");
}

namespace {

std::vector<QuestionnaireAnswers> answers_for(std::size_t users, Rng& rng) {
    std::vector<QuestionnaireAnswers> out;
    for (std::size_t u = 0; u < users; ++u) {
        QuestionnaireAnswers a{"u" + std::to_string(u), {}};
        for (std::size_t i = 0; i < kQuestionnaireItems; ++i) {
            a.answers.push_back(static_cast<int>(rng.below(7)));
        }
        out.push_back(a);
    }
    return out;
}

FeatureMatrix user_matrix(std::size_t users, std::size_t dim, Rng& rng) {
    std::vector<std::string> ids;
    for (std::size_t u = 0; u < users; ++u) {
        ids.push_back("u" + std::to_string(u));
    }
    std::vector<std::vector<double>> rows_(users, std::vector<double>(dim));
    for (auto& r : rows_) {
        for (auto& v : r) {
            v = rng.normal();
        }
    }
    return FeatureMatrix::from_rows(ids, rows_);
}

}  // namespace

TEST_CASE("questionnaire banks") {
    Rng rng(41);
    auto x = user_matrix(74, 6, rng);
    auto answers = answers_for(74, rng);
    for (auto kind : {ModelKind::ridge, ModelKind::random_forest, ModelKind::extra_trees}) {
        QuestionnaireTrainOptions opts;
        opts.forest.n_trees = 5;
        auto bank = train_question_bank_t3(x, answers, kind, opts);
        CHECK(bank.keys.size() == 22);
        auto pred = predict_questionnaire(bank, x.dense_row(0));
        CHECK(pred.size() == 22);
        for (std::size_t i = 0; i < 22; ++i) {
            CHECK(pred[i] >= 0);
            CHECK(pred[i] <= 6);
            CHECK(pred[i] == predict_item(bank.models[i], x.dense_row(0)));
        }
        CHECK_THROWS(predict_questionnaire(bank, std::vector<double>(3, 0.0)));
    }
    auto constant = answers;
    for (auto& a : constant) {
        a.answers[4] = 2;
    }
    auto bank = train_question_bank_t3(x, constant, ModelKind::ridge);
    for (std::size_t u = 0; u < 10; ++u) {
        CHECK(predict_questionnaire(bank, x.dense_row(u))[4] == 2);
    }
    auto bad = answers;
    bad[3].answers[0] = 7;
    CHECK_THROWS(train_question_bank_t3(x, bad, ModelKind::ridge));
    CHECK_THROWS(train_question_bank_t3(x, answers, ModelKind::logistic_count));
}

TEST_CASE("user aggregation") {
    std::vector<std::vector<double>> one{{1.0, 2.0}};
    CHECK(aggregate_user(one) == std::vector<double>{1.0, 2.0});
    std::vector<std::vector<double>> two{{1.0, 2.0}, {3.0, 6.0}};
    CHECK(aggregate_user(two) == std::vector<double>{2.0, 4.0});
    std::vector<std::vector<double>> swapped{{3.0, 6.0}, {1.0, 2.0}};
    CHECK(aggregate_user(swapped) == aggregate_user(two));
    CHECK_THROWS(aggregate_user(std::vector<std::vector<double>>{}));

    auto chunks = FeatureMatrix::from_rows({"a#0", "b#0", "a#1"}, {{1.0}, {5.0}, {3.0}});
    auto users = aggregate_users(chunks);
    CHECK(users.docnos() == std::vector<std::string>{"a", "b"});
    CHECK(users.dense_row(0) == std::vector<double>{2.0});
    CHECK(user_of_chunk("sub#ject#12") == "sub#ject");
    CHECK_THROWS(user_of_chunk("nochunk"));
}

TEST_CASE("bank serialization round-trip") {
    Rng rng(51);
    auto fx = rank_fixture(21, 5);
    auto x = user_matrix(30, 4, rng);
    auto answers = answers_for(30, rng);
    QuestionnaireTrainOptions opts;
    opts.forest.n_trees = 3;
    std::vector<QuestionBank> banks{
        train_question_bank_t1(fx.features, fx.qrels, ModelKind::logistic_count),
        train_question_bank_t1(fx.features, fx.qrels, ModelKind::nb_count),
        train_question_bank_t3(x, answers, ModelKind::ridge, opts),
        train_question_bank_t3(x, answers, ModelKind::extra_trees, opts),
    };
    for (const auto& bank : banks) {
        std::stringstream buf;
        save_bank(bank, buf);
        auto first = buf.str();
        CHECK(first.find("\"schema_version\":1") != std::string::npos);
        auto loaded = load_bank(buf);
        CHECK(loaded == bank);
        std::stringstream again;
        save_bank(loaded, again);
        CHECK(again.str() == first);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(load_bank(empty), ParseError);
    std::istringstream future("{\"schema_version\":99,\"kind\":\"ridge\",\"dim\":1,\"keys\":[]}\n");
    CHECK_THROWS_AS(load_bank(future), ParseError);
}
