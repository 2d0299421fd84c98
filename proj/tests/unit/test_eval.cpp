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

#include "fixtures.hpp"
#include "riskrank/eval.hpp"
#include "riskrank/synth.hpp"

using namespace riskrank;
using doctest::Approx;

namespace {

std::vector<RunEntry> run_of(const std::vector<std::string>& docs, const std::string& qid = "1") {
    std::vector<RunEntry> run;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        run.push_back({qid, docs[i], i + 1, 1.0 - 0.01 * static_cast<double>(i), "t"});
    }
    return run;
}

QuestionnaireAnswers user(const std::string& id, int value) {
    return {id, std::vector<int>(kQuestionnaireItems, value)};
}

}  // namespace

TEST_CASE("average precision") {
    std::set<std::string> rel{"d1", "d2"};
    CHECK(average_precision(run_of({"d1", "d3", "d2"}), rel) ==
          Approx(0.5 * (1.0 + 2.0 / 3.0)).epsilon(1e-12));
    CHECK(average_precision(run_of({"d2", "d1", "d3"}), rel) == 1.0);
    CHECK(average_precision(run_of({"d3", "d4"}), rel) == 0.0);
    auto broken = run_of({"d1", "d2"});
    broken[1].rank = 3;
    CHECK_THROWS(average_precision(broken, rel));
}

TEST_CASE("R-precision and P@10") {
    std::set<std::string> rel{"a", "b"};
    CHECK(r_precision(run_of({"a", "x", "b"}), rel) == 0.5);
    CHECK(r_precision(run_of({"b", "a"}), rel) == 1.0);
    CHECK(r_precision({}, rel) == 0.0);
    CHECK(r_precision(run_of({"a"}), rel) == 0.5);

    CHECK(precision_at_10(run_of({"a", "x", "b"}), rel) == Approx(0.2));
    std::set<std::string> ten;
    std::vector<std::string> docs;
    for (int i = 0; i < 12; ++i) {
        docs.push_back("r" + std::to_string(i));
        ten.insert(docs.back());
    }
    CHECK(precision_at_10(run_of(docs), ten) == 1.0);
    CHECK(precision_at_10(run_of({"x", "y"}), rel) == 0.0);
}

TEST_CASE("NDCG") {
    std::set<std::string> rel{"d1", "d2"};
    double ideal = 1.0 + 1.0 / std::log2(3.0);
    CHECK(ideal == Approx(1.63093).epsilon(1e-5));
    CHECK(ndcg(run_of({"d1", "d3", "d2"}), rel) == Approx(1.5 / ideal).epsilon(1e-12));
    CHECK(ndcg(run_of({"d1", "d3", "d2"}), rel) == Approx(0.91972).epsilon(1e-5));
    CHECK(ndcg(run_of({"d2", "d1", "d3"}), rel) == 1.0);
    CHECK(ndcg(run_of({"d3"}), rel) == 0.0);
}

TEST_CASE("run evaluation conventions") {
    std::vector<Qrel> qrels{{"1", "a", 1}, {"1", "b", 0}, {"2", "c", 0}, {"10", "z", 1}};
    auto run = run_of({"a", "b"});
    auto m = evaluate_rank(run, qrels);
    CHECK(m.evaluated == 2);
    CHECK(m.skipped == 1);
    // Question 10 is judged but missing from the run: it scores 0.
    CHECK(m.map == 0.5);
    CHECK(m.ndcg == 0.5);

    auto both = evaluate_run(run, qrels, qrels, "x");
    CHECK(both.majority == both.unanimity);
    CHECK(both.run_name == "x");
    CHECK(map(run, qrels) == m.map);
}

TEST_CASE("rank metrics ignore positive affine score transforms") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto inst = fixtures::random_rank_instance(s);
        auto base = evaluate_rank(inst.run, inst.qrels);
        auto scaled = inst.run;
        for (auto& e : scaled) {
            e.score = 3.5 * e.score + 12.0;
        }
        CHECK(evaluate_rank(scaled, inst.qrels) == base);
        for (double v : {base.map, base.r_prec, base.p_at_10, base.ndcg}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("rank metrics agree with the brute-force oracle") {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto inst = fixtures::random_rank_instance(1000 + s);
        auto a = evaluate_rank(inst.run, inst.qrels);
        auto b = oracle_rank_metrics(inst.run, inst.qrels);
        CHECK(a.evaluated == b.evaluated);
        CHECK(a.skipped == b.skipped);
        worst = std::max({worst, std::abs(a.map - b.map), std::abs(a.r_prec - b.r_prec),
                          std::abs(a.p_at_10 - b.p_at_10), std::abs(a.ndcg - b.ndcg)});
    }
    CHECK(worst <= 1e-9);

    std::vector<Qrel> qrels{{"1", "a", 1}, {"1", "b", 1}};
    auto perfect = run_of({"b", "a", "c"});
    CHECK(evaluate_rank(perfect, qrels).map == 1.0);
    CHECK(oracle_rank_metrics(perfect, qrels).map == 1.0);
    std::vector<Qrel> none{{"1", "a", 0}};
    CHECK(evaluate_rank(perfect, none).skipped == 1);
    CHECK(oracle_rank_metrics(perfect, none).skipped == 1);
}

TEST_CASE("flat questionnaire errors") {
    std::vector<int> p{0, 1, 2};
    std::vector<int> t{0, 2, 2};
    CHECK(mae(p, t) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mzoe(p, t) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mae(t, t) == 0.0);
    CHECK(mzoe(t, t) == 0.0);
    CHECK_THROWS(mae(p, std::vector<int>{0, 1}));
    CHECK_THROWS(mae(std::vector<int>{7}, std::vector<int>{0}));

    CHECK(mae_macro(std::vector<int>{0, 6, 6}, std::vector<int>{0, 0, 6}) == 1.5);
    CHECK(mae_macro(t, t) == 0.0);
    std::vector<int> single{3, 3, 3};
    std::vector<int> guesses{0, 3, 5};
    CHECK(mae_macro(guesses, single) == mae(guesses, single));

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> truth;
        for (int i = 0; i < 100; ++i) {
            truth.push_back(static_cast<int>(rng.below(7)));
        }
        std::vector<int> zeros(truth.size(), 0);
        std::vector<int> sixes(truth.size(), 6);
        CHECK(mae(zeros, truth) + mae(sixes, truth) == 6.0);
    }
}

TEST_CASE("subscale map") {
    auto defaults = SubscaleMap::defaults();
    defaults.validate(default_item_ids());
    std::stringstream buf;
    write_subscale_map(defaults, buf);
    CHECK(SubscaleMap::parse(buf) == defaults);
    CHECK(SubscaleMap::load(std::string(RISKRANK_DATA_DIR) + "/subscales.txt") == defaults);

    std::istringstream unknown("restraint: 1,13\neating_concern: 7\nshape_concern: 6\nweight_concern: 8\n");
    auto bad = SubscaleMap::parse(unknown);
    CHECK_THROWS(bad.validate(default_item_ids()));
    std::istringstream missing("restraint: 1\n");
    CHECK_THROWS(SubscaleMap::parse(missing));
}

TEST_CASE("subscale RMSE") {
    auto map = SubscaleMap::defaults();
    std::vector<QuestionnaireAnswers> truth{user("a", 4)};
    std::vector<QuestionnaireAnswers> pred{user("a", 0)};
    auto e = subscale_rmse(pred, truth, map);
    CHECK(e == SubscaleErrors{4.0, 4.0, 4.0, 4.0, 4.0});
    CHECK(subscale_rmse(truth, truth, map) == SubscaleErrors{});

    // Two users, one exact and one off by 2 on everything: RMSE = sqrt(2).
    std::vector<QuestionnaireAnswers> t2{user("a", 1), user("b", 1)};
    std::vector<QuestionnaireAnswers> p2{user("b", 3), user("a", 1)};
    auto e2 = subscale_rmse(p2, t2, map);
    CHECK(e2.rs == Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(e2.ged == Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("questionnaire evaluation") {
    auto map = SubscaleMap::defaults();
    std::vector<QuestionnaireAnswers> truth{user("a", 2), user("b", 5)};
    truth[0].answers[3] = 6;
    auto perfect = evaluate_questionnaire(truth, truth, map);
    CHECK(perfect == QuestionnaireMetrics{});

    std::vector<QuestionnaireAnswers> zeros{user("a", 0), user("b", 0)};
    std::vector<QuestionnaireAnswers> sixes{user("a", 6), user("b", 6)};
    CHECK(evaluate_questionnaire(zeros, truth, map).mae + evaluate_questionnaire(sixes, truth, map).mae ==
          6.0);

    CHECK_THROWS(evaluate_questionnaire(std::vector<QuestionnaireAnswers>{user("a", 0)}, truth, map));
    CHECK_THROWS(evaluate_questionnaire(std::vector<QuestionnaireAnswers>{user("a", 0), user("c", 0)},
                                        truth, map));

    double worst = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto inst = fixtures::random_questionnaire_instance(s);
        auto a = evaluate_questionnaire(inst.pred, inst.truth, map);
        auto b = oracle_questionnaire_metrics(inst.pred, inst.truth, map);
        for (auto [x, y] : {std::pair{a.mae, b.mae}, {a.mzoe, b.mzoe}, {a.mae_macro, b.mae_macro},
                            {a.ged, b.ged}, {a.rs, b.rs}, {a.ecs, b.ecs}, {a.scs, b.scs},
                            {a.wcs, b.wcs}}) {
            worst = std::max(worst, std::abs(x - y));
        }
        CHECK(a.mzoe <= 1.0);
        CHECK(a.mae <= 6.0);
        if (a.mzoe == 0.0) {
            CHECK(a.mae == 0.0);
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("truth file round-trip") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto inst = fixtures::random_questionnaire_instance(s);
        std::stringstream buf;
        write_answers(inst.truth, buf);
        CHECK(read_answers(buf) == inst.truth);
    }
    std::istringstream short_line("u 1 2 3\n");
    CHECK_THROWS_AS(read_answers(short_line), ParseError);
    std::istringstream out_of_range("u 7 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0\n");
    CHECK_THROWS_AS(read_answers(out_of_range), ParseError);
}

TEST_CASE("reports") {
    RunEvaluation row{"runA", {0.5, 0.25, 0.1, 0.75, 1, 0}, {1.0, 0.5, 0.2, 0.9, 1, 0}};
    std::ostringstream csv;
    write_rank_csv(std::vector<RunEvaluation>{row}, csv);
    CHECK(csv.str() ==
          "Run,Unanimity MAP,Unanimity R-PREC,Unanimity P@10,Unanimity NDCG,"
          "Majority MAP,Majority R-PREC,Majority P@10,Majority NDCG\n"
          "runA,1.000000,0.500000,0.200000,0.900000,0.500000,0.250000,0.100000,0.750000\n");
    std::ostringstream json;
    write_rank_json(std::vector<RunEvaluation>{row}, json);
    CHECK(json.str().find("\"run\":\"runA\"") != std::string::npos);

    QuestionnaireReportRow q{"team", "r1", {1, 0.5, 1.5, 2, 3, 4, 5, 6}};
    std::ostringstream qcsv;
    write_questionnaire_csv(std::vector<QuestionnaireReportRow>{q}, qcsv);
    CHECK(qcsv.str() ==
          "team,run ID,MAE,MZOE,MAEmacro,GED,RS,ECS,SCS,WCS\n"
          "team,r1,1.000000,0.500000,1.500000,2.000000,3.000000,4.000000,5.000000,6.000000\n");
}
