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

#include "riskrank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "text_util.hpp"

namespace riskrank {

RelevantSets relevant_sets(std::span<const Qrel> qrels) {
    RelevantSets out;
    for (const Qrel& q : qrels) {
        auto& set = out[q.question_id];
        if (q.relevance > 0) {
            set.insert(q.docno);
        }
    }
    return out;
}

namespace {

void check_single_question(std::span<const RunEntry> run) {
    if (run.empty()) {
        return;
    }
    validate_run(run);
    for (const auto& e : run) {
        if (e.question_id != run.front().question_id) {
            throw Error("single-question metric given entries for questions " +
                        run.front().question_id + " and " + e.question_id);
        }
    }
}

}  // namespace

double average_precision(std::span<const RunEntry> run, const std::set<std::string>& relevant) {
    check_single_question(run);
    if (relevant.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < run.size(); ++i) {
        if (relevant.contains(run[i].docno)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double r_precision(std::span<const RunEntry> run, const std::set<std::string>& relevant) {
    check_single_question(run);
    if (relevant.empty()) {
        return 0.0;
    }
    const std::size_t r = relevant.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(r, run.size()); ++i) {
        hits += relevant.contains(run[i].docno) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(r);
}

double precision_at_10(std::span<const RunEntry> run, const std::set<std::string>& relevant) {
    check_single_question(run);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, run.size()); ++i) {
        hits += relevant.contains(run[i].docno) ? 1 : 0;
    }
    return static_cast<double>(hits) / 10.0;
}

double ndcg(std::span<const RunEntry> run, const std::set<std::string>& relevant) {
    check_single_question(run);
    if (relevant.empty()) {
        return 0.0;
    }
    double dcg = 0.0;
    for (std::size_t i = 0; i < run.size(); ++i) {
        if (relevant.contains(run[i].docno)) {
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
        }
    }
    double ideal = 0.0;
    for (std::size_t i = 0; i < relevant.size(); ++i) {
        ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / ideal;
}

RankMetrics evaluate_rank(std::span<const RunEntry> run, std::span<const Qrel> qrels) {
    validate_run(run);
    auto grouped = group_run(run);
    auto rel = relevant_sets(qrels);
    // Ascending question id, numeric when both ids are numbers.
    std::vector<std::string> questions;
    for (const auto& [qid, docs] : rel) {
        questions.push_back(qid);
    }
    std::sort(questions.begin(), questions.end(), [](const std::string& a, const std::string& b) {
        auto digits = [](const std::string& s) {
            return !s.empty() && std::all_of(s.begin(), s.end(),
                                             [](char c) { return c >= '0' && c <= '9'; });
        };
        bool na = digits(a);
        bool nb = digits(b);
        if (na && nb && a.size() != b.size()) {
            return a.size() < b.size();
        }
        return a < b;
    });
    RankMetrics m;
    static const std::vector<RunEntry> kEmpty;
    for (const auto& qid : questions) {
        const auto& relevant = rel.at(qid);
        if (relevant.empty()) {
            ++m.skipped;
            continue;
        }
        auto it = grouped.find(qid);
        std::span<const RunEntry> entries = it == grouped.end() ? kEmpty : it->second;
        ++m.evaluated;
        if (entries.empty()) {
            continue;
        }
        m.map += average_precision(entries, relevant);
        m.r_prec += r_precision(entries, relevant);
        m.p_at_10 += precision_at_10(entries, relevant);
        m.ndcg += ndcg(entries, relevant);
    }
    if (m.evaluated > 0) {
        auto n = static_cast<double>(m.evaluated);
        m.map /= n;
        m.r_prec /= n;
        m.p_at_10 /= n;
        m.ndcg /= n;
    }
    return m;
}

double map(std::span<const RunEntry> run, std::span<const Qrel> qrels) {
    return evaluate_rank(run, qrels).map;
}

RunEvaluation evaluate_run(std::span<const RunEntry> run, std::span<const Qrel> qrels_majority,
                           std::span<const Qrel> qrels_unanimity, const std::string& run_name) {
    return {run_name, evaluate_rank(run, qrels_majority), evaluate_rank(run, qrels_unanimity)};
}

SubscaleMap SubscaleMap::defaults() {
    return {{"1", "2", "3", "4", "5"},
            {"7", "9", "19", "20", "21"},
            {"6", "8", "10", "11", "23", "26", "27", "28"},
            {"8", "12", "22", "24", "25"}};
}

SubscaleMap SubscaleMap::parse(std::istream& in) {
    SubscaleMap map;
    std::vector<std::string>* slots[] = {&map.restraint, &map.eating_concern, &map.shape_concern,
                                         &map.weight_concern};
    const char* names[] = {"restraint", "eating_concern", "shape_concern", "weight_concern"};
    bool seen[4] = {false, false, false, false};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::string_view text = detail::trim(line);
        if (text.empty()) {
            continue;
        }
        auto colon = text.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError("subscale line lacks ':'", line_no);
        }
        std::string_view name = detail::trim(text.substr(0, colon));
        int slot = -1;
        for (int s = 0; s < 4; ++s) {
            if (name == names[s]) {
                slot = s;
            }
        }
        if (slot < 0) {
            throw ParseError("unknown subscale '" + std::string(name) + "'", line_no);
        }
        if (seen[slot]) {
            throw ParseError("subscale '" + std::string(name) + "' listed twice", line_no);
        }
        seen[slot] = true;
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            auto comma = rest.find(',');
            std::string_view item = detail::trim(rest.substr(0, comma));
            if (item.empty()) {
                throw ParseError("empty item id in subscale '" + std::string(name) + "'", line_no);
            }
            slots[slot]->emplace_back(item);
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
    }
    for (int s = 0; s < 4; ++s) {
        if (!seen[s] || slots[s]->empty()) {
            throw Error(std::string("subscale map is missing '") + names[s] + "'");
        }
    }
    return map;
}

SubscaleMap SubscaleMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open subscale map '" + path + "'");
    }
    return parse(in);
}

void SubscaleMap::validate(std::span<const std::string> items) const {
    for (const auto* list : {&restraint, &eating_concern, &shape_concern, &weight_concern}) {
        if (list->empty()) {
            throw Error("subscale with no items");
        }
        for (const auto& id : *list) {
            if (std::find(items.begin(), items.end(), id) == items.end()) {
                throw Error("subscale item '" + id + "' is not a configured questionnaire item");
            }
        }
    }
}

void write_subscale_map(const SubscaleMap& map, std::ostream& out) {
    auto line = [&](const char* name, const std::vector<std::string>& items) {
        out << name << ':';
        for (std::size_t i = 0; i < items.size(); ++i) {
            out << (i == 0 ? " " : ",") << items[i];
        }
        out << '\n';
    };
    line("restraint", map.restraint);
    line("eating_concern", map.eating_concern);
    line("shape_concern", map.shape_concern);
    line("weight_concern", map.weight_concern);
}

namespace {

void check_answers(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) {
        throw Error("prediction and truth lengths differ (" + std::to_string(pred.size()) +
                    " vs " + std::to_string(truth.size()) + ")");
    }
    if (truth.empty()) {
        throw Error("no answers to evaluate");
    }
    for (auto seq : {pred, truth}) {
        for (int v : seq) {
            if (v < 0 || v > kMaxAnswer) {
                throw Error("answer " + std::to_string(v) + " outside 0.." +
                            std::to_string(kMaxAnswer));
            }
        }
    }
}

}  // namespace

double mae(std::span<const int> pred, std::span<const int> truth) {
    check_answers(pred, truth);
    long total = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        total += std::abs(pred[i] - truth[i]);
    }
    return static_cast<double>(total) / static_cast<double>(pred.size());
}

double mzoe(std::span<const int> pred, std::span<const int> truth) {
    check_answers(pred, truth);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        wrong += pred[i] != truth[i] ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

double mae_macro(std::span<const int> pred, std::span<const int> truth) {
    check_answers(pred, truth);
    std::array<long, kMaxAnswer + 1> err{};
    std::array<long, kMaxAnswer + 1> count{};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        auto c = static_cast<std::size_t>(truth[i]);
        err[c] += std::abs(pred[i] - truth[i]);
        ++count[c];
    }
    double sum = 0.0;
    int classes = 0;
    for (std::size_t c = 0; c < count.size(); ++c) {
        if (count[c] > 0) {
            sum += static_cast<double>(err[c]) / static_cast<double>(count[c]);
            ++classes;
        }
    }
    return sum / classes;
}

namespace {

std::vector<std::pair<const QuestionnaireAnswers*, const QuestionnaireAnswers*>> match_users(
    std::span<const QuestionnaireAnswers> pred, std::span<const QuestionnaireAnswers> truth) {
    std::unordered_map<std::string, const QuestionnaireAnswers*> by_user;
    for (const auto& p : pred) {
        validate(p);
        if (!by_user.emplace(p.user_id, &p).second) {
            throw Error("duplicate prediction for user " + p.user_id);
        }
    }
    if (truth.empty()) {
        throw Error("no truth users to evaluate");
    }
    std::vector<std::pair<const QuestionnaireAnswers*, const QuestionnaireAnswers*>> out;
    for (const auto& t : truth) {
        validate(t);
        auto it = by_user.find(t.user_id);
        if (it == by_user.end()) {
            throw Error("no prediction for user " + t.user_id);
        }
        out.emplace_back(it->second, &t);
    }
    if (out.size() != pred.size()) {
        throw Error("predictions include users absent from the truth file");
    }
    return out;
}

}  // namespace

void align_answers(std::span<const QuestionnaireAnswers> pred,
                   std::span<const QuestionnaireAnswers> truth, std::vector<int>& pred_flat,
                   std::vector<int>& truth_flat) {
    pred_flat.clear();
    truth_flat.clear();
    for (const auto& [p, t] : match_users(pred, truth)) {
        pred_flat.insert(pred_flat.end(), p->answers.begin(), p->answers.end());
        truth_flat.insert(truth_flat.end(), t->answers.begin(), t->answers.end());
    }
}

SubscaleErrors subscale_rmse(std::span<const QuestionnaireAnswers> pred,
                             std::span<const QuestionnaireAnswers> truth, const SubscaleMap& map,
                             std::span<const std::string> items) {
    map.validate(items);
    if (items.size() != kQuestionnaireItems) {
        throw Error("item list must have " + std::to_string(kQuestionnaireItems) + " entries");
    }
    auto positions = [&](const std::vector<std::string>& ids) {
        std::vector<std::size_t> pos;
        for (const auto& id : ids) {
            pos.push_back(static_cast<std::size_t>(std::find(items.begin(), items.end(), id) -
                                                   items.begin()));
        }
        return pos;
    };
    const std::array<std::vector<std::size_t>, 4> subscales = {
        positions(map.restraint), positions(map.eating_concern), positions(map.shape_concern),
        positions(map.weight_concern)};
    auto scores = [&](const QuestionnaireAnswers& a) {
        std::array<double, 5> s{};
        for (std::size_t k = 0; k < 4; ++k) {
            double sum = 0.0;
            for (std::size_t p : subscales[k]) {
                sum += a.answers[p];
            }
            s[k] = sum / static_cast<double>(subscales[k].size());
        }
        s[4] = (s[0] + s[1] + s[2] + s[3]) / 4.0;
        return s;
    };
    std::array<double, 5> sq{};
    auto matched = match_users(pred, truth);
    for (const auto& [p, t] : matched) {
        auto sp = scores(*p);
        auto st = scores(*t);
        for (std::size_t k = 0; k < 5; ++k) {
            sq[k] += (sp[k] - st[k]) * (sp[k] - st[k]);
        }
    }
    auto n = static_cast<double>(matched.size());
    return {std::sqrt(sq[0] / n), std::sqrt(sq[1] / n), std::sqrt(sq[2] / n),
            std::sqrt(sq[3] / n), std::sqrt(sq[4] / n)};
}

QuestionnaireMetrics evaluate_questionnaire(std::span<const QuestionnaireAnswers> pred,
                                            std::span<const QuestionnaireAnswers> truth,
                                            const SubscaleMap& map,
                                            std::span<const std::string> items) {
    std::vector<int> p;
    std::vector<int> t;
    align_answers(pred, truth, p, t);
    auto sub = subscale_rmse(pred, truth, map, items);
    return {mae(p, t), mzoe(p, t), mae_macro(p, t), sub.ged, sub.rs, sub.ecs, sub.scs, sub.wcs};
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

nlohmann::ordered_json rank_json(const RankMetrics& m) {
    nlohmann::ordered_json j;
    j["MAP"] = m.map;
    j["R-PREC"] = m.r_prec;
    j["P@10"] = m.p_at_10;
    j["NDCG"] = m.ndcg;
    j["evaluated_questions"] = m.evaluated;
    j["skipped_questions"] = m.skipped;
    return j;
}

}  // namespace

void write_rank_csv(std::span<const RunEvaluation> rows, std::ostream& out) {
    out << "Run,Unanimity MAP,Unanimity R-PREC,Unanimity P@10,Unanimity NDCG,"
           "Majority MAP,Majority R-PREC,Majority P@10,Majority NDCG\n";
    for (const auto& r : rows) {
        out << csv_field(r.run_name);
        for (const auto* m : {&r.unanimity, &r.majority}) {
            out << ',' << fixed6(m->map) << ',' << fixed6(m->r_prec) << ','
                << fixed6(m->p_at_10) << ',' << fixed6(m->ndcg);
        }
        out << '\n';
    }
}

void write_rank_json(std::span<const RunEvaluation> rows, std::ostream& out) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["run"] = r.run_name;
        j["unanimity"] = rank_json(r.unanimity);
        j["majority"] = rank_json(r.majority);
        out << j.dump() << '\n';
    }
}

void write_questionnaire_csv(std::span<const QuestionnaireReportRow> rows, std::ostream& out) {
    out << "team,run ID,MAE,MZOE,MAEmacro,GED,RS,ECS,SCS,WCS\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out << csv_field(r.team) << ',' << csv_field(r.run_id);
        for (double v : {m.mae, m.mzoe, m.mae_macro, m.ged, m.rs, m.ecs, m.scs, m.wcs}) {
            out << ',' << fixed6(v);
        }
        out << '\n';
    }
}

void write_questionnaire_json(std::span<const QuestionnaireReportRow> rows, std::ostream& out) {
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        nlohmann::ordered_json j;
        j["team"] = r.team;
        j["run ID"] = r.run_id;
        j["MAE"] = m.mae;
        j["MZOE"] = m.mzoe;
        j["MAEmacro"] = m.mae_macro;
        j["GED"] = m.ged;
        j["RS"] = m.rs;
        j["ECS"] = m.ecs;
        j["SCS"] = m.scs;
        j["WCS"] = m.wcs;
        out << j.dump() << '\n';
    }
}

}  // namespace riskrank
