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

// Seeded random instances shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "riskrank/corpus.hpp"
#include "riskrank/history.hpp"

namespace fixtures {

struct RankInstance {
    std::vector<riskrank::RunEntry> run;
    std::vector<riskrank::Qrel> qrels;
};

/// A few questions over a small pool; some questions have no relevant docs,
/// some are judged but absent from the run, and runs have ties and gaps.
inline RankInstance random_rank_instance(std::uint64_t seed) {
    riskrank::Rng rng(seed);
    RankInstance out;
    auto n_questions = static_cast<std::size_t>(rng.between(1, 6));
    for (std::size_t q = 1; q <= n_questions; ++q) {
        std::string qid = std::to_string(q);
        auto pool = static_cast<std::size_t>(rng.between(1, 40));
        double rel_rate = rng.uniform(0.0, 0.6);
        if (rng.bernoulli(0.1)) {
            rel_rate = 0.0;
        }
        for (std::size_t d = 0; d < pool; ++d) {
            if (rng.bernoulli(0.8)) {
                out.qrels.push_back({qid, "d" + std::to_string(d), rng.bernoulli(rel_rate) ? 1 : 0});
            }
        }
        if (rng.bernoulli(0.1)) {
            continue;  // judged but never retrieved
        }
        std::vector<std::string> docs;
        for (std::size_t d = 0; d < pool + 5; ++d) {
            docs.push_back("d" + std::to_string(d));
        }
        rng.shuffle(docs);
        docs.resize(static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(docs.size()))));
        double score = rng.uniform(0.5, 1.0);
        for (std::size_t r = 0; r < docs.size(); ++r) {
            if (!rng.bernoulli(0.2)) {
                score -= rng.uniform(0.0, 0.05);
            }
            out.run.push_back({qid, docs[r], r + 1, score, "rnd"});
        }
    }
    return out;
}

struct QuestionnaireInstance {
    std::vector<riskrank::QuestionnaireAnswers> pred;
    std::vector<riskrank::QuestionnaireAnswers> truth;
};

inline QuestionnaireInstance random_questionnaire_instance(std::uint64_t seed) {
    riskrank::Rng rng(seed);
    QuestionnaireInstance out;
    auto users = static_cast<std::size_t>(rng.between(1, 12));
    bool skewed = rng.bernoulli(0.3);
    for (std::size_t u = 0; u < users; ++u) {
        riskrank::QuestionnaireAnswers t{"user" + std::to_string(u), {}};
        riskrank::QuestionnaireAnswers p{t.user_id, {}};
        for (std::size_t i = 0; i < riskrank::kQuestionnaireItems; ++i) {
            int truth = skewed ? static_cast<int>(rng.below(2)) * 6 : static_cast<int>(rng.below(7));
            t.answers.push_back(truth);
            p.answers.push_back(rng.bernoulli(0.3) ? truth : static_cast<int>(rng.below(7)));
        }
        out.truth.push_back(std::move(t));
        out.pred.push_back(std::move(p));
    }
    rng.shuffle(out.pred);
    return out;
}

}  // namespace fixtures
