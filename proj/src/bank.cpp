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

#include "riskrank/bank.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include <json.hpp>

namespace riskrank {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 7> kKindNames{{
    {ModelKind::nb_count, "nb_count"},
    {ModelKind::logistic_count, "logistic_count"},
    {ModelKind::logistic_w2v, "logistic_w2v"},
    {ModelKind::logistic_embed, "logistic_embed"},
    {ModelKind::ridge, "ridge"},
    {ModelKind::random_forest, "random_forest"},
    {ModelKind::extra_trees, "extra_trees"},
}};

}  // namespace

std::string_view to_string(ModelKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    throw Error("unknown model kind '" + std::string(name) + "'");
}

BankTask task_of(ModelKind kind) {
    switch (kind) {
        case ModelKind::ridge:
        case ModelKind::random_forest:
        case ModelKind::extra_trees:
            return BankTask::questionnaire;
        default:
            return BankTask::rank;
    }
}

const std::vector<std::string>& default_question_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (int q = 1; q <= 21; ++q) {
            out.push_back(std::to_string(q));
        }
        return out;
    }();
    return ids;
}

QuestionBank train_question_bank_t1(const FeatureMatrix& features, std::span<const Qrel> qrels,
                                    ModelKind kind, const RankTrainOptions& options) {
    if (task_of(kind) != BankTask::rank) {
        throw Error("model kind " + std::string(to_string(kind)) + " is not a ranking model");
    }
    if (kind == ModelKind::nb_count && features.min_value() < 0.0) {
        throw Error("nb_count requires non-negative count features; got negative values "
                    "(embedding features?)");
    }
    std::map<std::string, std::vector<std::pair<std::size_t, int>>> labeled;
    for (const Qrel& q : qrels) {
        if (auto row = features.find(q.docno)) {
            labeled[q.question_id].emplace_back(*row, q.relevance > 0 ? 1 : 0);
        }
    }
    QuestionBank bank;
    bank.kind = kind;
    bank.dim = features.dim();
    bank.keys = options.questions;
    bank.models.resize(bank.keys.size());
    // Validate before spending time on training.
    for (const auto& qid : bank.keys) {
        auto it = labeled.find(qid);
        if (it == labeled.end()) {
            throw Error("question " + qid + " has no judged documents in the feature set");
        }
        bool pos = false;
        bool neg = false;
        for (const auto& [row, label] : it->second) {
            (label == 1 ? pos : neg) = true;
        }
        if (!pos || !neg) {
            throw Error("question " + qid + " has single-class labels (" +
                        (pos ? "no negatives" : "no positives") + ")");
        }
    }
    parallel_for(bank.keys.size(), options.threads, [&](std::size_t qi) {
        const auto& examples = labeled.at(bank.keys[qi]);
        std::vector<std::size_t> positives;
        std::vector<std::size_t> negatives;
        for (std::size_t e = 0; e < examples.size(); ++e) {
            (examples[e].second == 1 ? positives : negatives).push_back(e);
        }
        if (options.max_negative_ratio > 0.0) {
            auto cap = static_cast<std::size_t>(
                std::ceil(options.max_negative_ratio * static_cast<double>(positives.size())));
            if (negatives.size() > cap) {
                Rng rng(derive_seed(options.seed, qi));
                rng.shuffle(negatives);
                negatives.resize(cap);
            }
        }
        std::vector<std::size_t> chosen = positives;
        chosen.insert(chosen.end(), negatives.begin(), negatives.end());
        std::sort(chosen.begin(), chosen.end());
        std::vector<std::size_t> rows;
        std::vector<int> y;
        for (std::size_t e : chosen) {
            rows.push_back(examples[e].first);
            y.push_back(examples[e].second);
        }
        FeatureMatrix x = features.select(rows);
        if (kind == ModelKind::nb_count) {
            bank.models[qi] = train_naive_bayes(x, y, options.nb_alpha);
        } else {
            bank.models[qi] = train_logistic(x, y, options.logistic);
        }
    });
    return bank;
}

double score_document(const BankModel& model, const FeatureMatrix& features, std::size_t row) {
    if (const auto* lr = std::get_if<LogisticModel>(&model)) {
        if (lr->dim() != features.dim()) {
            throw Error("dimension mismatch: model expects " + std::to_string(lr->dim()) +
                        " features, got " + std::to_string(features.dim()));
        }
        return predict_proba(*lr, features, row);
    }
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        return nb_predict_proba(*nb, features, row);
    }
    throw Error("questionnaire models cannot score documents");
}

std::vector<RunEntry> rank_documents(const QuestionBank& bank, const FeatureMatrix& features,
                                     std::size_t k, const std::string& run_tag,
                                     std::size_t threads) {
    if (bank.task() != BankTask::rank) {
        throw Error("rank_documents needs a ranking bank");
    }
    if (features.rows() == 0) {
        throw Error("empty candidate pool");
    }
    if (k == 0 || k > kMaxRunDepth) {
        throw Error("run depth k must be in [1, " + std::to_string(kMaxRunDepth) + "]");
    }
    if (run_tag.empty() || run_tag.find_first_of(" \t\n") != std::string::npos) {
        throw Error("run tag must be a non-empty token without whitespace");
    }
    std::vector<std::vector<RunEntry>> per_question(bank.keys.size());
    parallel_for(bank.keys.size(), threads, [&](std::size_t qi) {
        std::vector<double> scores(features.rows());
        for (std::size_t i = 0; i < features.rows(); ++i) {
            scores[i] = score_document(bank.models[qi], features, i);
        }
        std::vector<std::size_t> order(features.rows());
        std::iota(order.begin(), order.end(), 0);
        const auto& docnos = features.docnos();
        auto better = [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) {
                return scores[a] > scores[b];
            }
            return docnos[a] < docnos[b];
        };
        std::size_t depth = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(depth),
                          order.end(), better);
        auto& out = per_question[qi];
        for (std::size_t r = 0; r < depth; ++r) {
            out.push_back({bank.keys[qi], docnos[order[r]], r + 1, scores[order[r]], run_tag});
        }
    });
    std::vector<RunEntry> run;
    for (auto& q : per_question) {
        run.insert(run.end(), std::make_move_iterator(q.begin()), std::make_move_iterator(q.end()));
    }
    return run;
}

std::string_view to_string(Aggregation a) {
    return a == Aggregation::vector_mean ? "vector_mean" : "chunk_vote";
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "vector_mean") {
        return Aggregation::vector_mean;
    }
    if (name == "chunk_vote") {
        return Aggregation::chunk_vote;
    }
    throw Error("unknown aggregation '" + std::string(name) + "'");
}

QuestionBank train_question_bank_t3(const FeatureMatrix& user_vectors,
                                    std::span<const QuestionnaireAnswers> answers,
                                    ModelKind kind, const QuestionnaireTrainOptions& options) {
    if (task_of(kind) != BankTask::questionnaire) {
        throw Error("model kind " + std::string(to_string(kind)) + " is not a questionnaire model");
    }
    if (answers.empty()) {
        throw Error("no training users");
    }
    const auto& all_items = default_item_ids();
    std::vector<std::size_t> positions;
    for (const auto& item : options.items) {
        auto it = std::find(all_items.begin(), all_items.end(), item);
        if (it == all_items.end()) {
            throw Error("item '" + item + "' is not a scored questionnaire item");
        }
        positions.push_back(static_cast<std::size_t>(it - all_items.begin()));
    }
    std::vector<std::size_t> rows;
    for (const auto& a : answers) {
        validate(a);
        auto row = user_vectors.find(a.user_id);
        if (!row) {
            throw Error("no vector for user " + a.user_id);
        }
        rows.push_back(*row);
    }
    FeatureMatrix x = user_vectors.select(rows);

    QuestionBank bank;
    bank.kind = kind;
    bank.dim = user_vectors.dim();
    bank.keys = options.items;
    bank.models.resize(bank.keys.size());
    parallel_for(bank.keys.size(), options.threads, [&](std::size_t ii) {
        std::vector<int> y;
        y.reserve(answers.size());
        for (const auto& a : answers) {
            y.push_back(a.answers[positions[ii]]);
        }
        if (kind == ModelKind::ridge) {
            bank.models[ii] = train_ridge(x, y, options.ridge_lambda);
        } else {
            ForestConfig cfg = options.forest;
            cfg.mode = kind == ModelKind::random_forest ? ForestMode::random_forest
                                                        : ForestMode::extra_trees;
            cfg.seed = derive_seed(options.seed, ii);
            cfg.threads = 1;
            bank.models[ii] = train_forest(x, y, cfg);
        }
    });
    return bank;
}

std::vector<double> aggregate_user(std::span<const std::vector<double>> chunks) {
    if (chunks.empty()) {
        throw Error("cannot aggregate a user with zero chunks");
    }
    std::vector<double> mean(chunks.front().size(), 0.0);
    for (const auto& c : chunks) {
        if (c.size() != mean.size()) {
            throw Error("chunk vectors differ in dimension");
        }
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] += c[j];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(chunks.size());
    }
    return mean;
}

std::string user_of_chunk(std::string_view chunk_id) {
    auto hash = chunk_id.rfind('#');
    if (hash == std::string_view::npos || hash == 0) {
        throw Error("chunk id '" + std::string(chunk_id) + "' is not of the form <user>#<index>");
    }
    return std::string(chunk_id.substr(0, hash));
}

FeatureMatrix aggregate_users(const FeatureMatrix& chunk_vectors) {
    std::vector<std::string> users;
    std::map<std::string, std::vector<std::vector<double>>> groups;
    for (std::size_t i = 0; i < chunk_vectors.rows(); ++i) {
        std::string user = user_of_chunk(chunk_vectors.docnos()[i]);
        auto& g = groups[user];
        if (g.empty()) {
            users.push_back(user);
        }
        g.push_back(chunk_vectors.dense_row(i));
    }
    std::vector<double> values;
    values.reserve(users.size() * chunk_vectors.dim());
    for (const auto& u : users) {
        auto m = aggregate_user(groups[u]);
        values.insert(values.end(), m.begin(), m.end());
    }
    return FeatureMatrix::dense(std::move(users), chunk_vectors.dim(), std::move(values));
}

int predict_item(const BankModel& model, std::span<const double> x) {
    if (const auto* ridge = std::get_if<RidgeModel>(&model)) {
        return ridge_predict(*ridge, x);
    }
    if (const auto* forest = std::get_if<ForestModel>(&model)) {
        return forest_predict(*forest, x);
    }
    throw Error("ranking models cannot predict questionnaire answers");
}

std::vector<int> predict_questionnaire(const QuestionBank& bank,
                                       std::span<const double> user_vector) {
    if (bank.task() != BankTask::questionnaire) {
        throw Error("predict_questionnaire needs a questionnaire bank");
    }
    if (user_vector.size() != bank.dim) {
        throw Error("dimension mismatch: bank expects " + std::to_string(bank.dim) +
                    " features, got " + std::to_string(user_vector.size()));
    }
    std::vector<int> out;
    out.reserve(bank.models.size());
    for (const auto& m : bank.models) {
        out.push_back(std::clamp(predict_item(m, user_vector), 0, kMaxAnswer));
    }
    return out;
}

std::vector<int> predict_questionnaire_vote(const QuestionBank& bank,
                                            std::span<const std::vector<double>> chunks) {
    if (chunks.empty()) {
        throw Error("cannot predict for a user with zero chunks");
    }
    std::vector<std::array<int, kMaxAnswer + 1>> votes(bank.models.size());
    for (auto& v : votes) {
        v.fill(0);
    }
    for (const auto& c : chunks) {
        auto pred = predict_questionnaire(bank, c);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            ++votes[i][static_cast<std::size_t>(pred[i])];
        }
    }
    std::vector<int> out;
    for (const auto& v : votes) {
        out.push_back(static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin()));
    }
    return out;
}

namespace {

ordered_json model_record(const std::string& key, const BankModel& model) {
    ordered_json r;
    r["key"] = key;
    if (const auto* lr = std::get_if<LogisticModel>(&model)) {
        r["type"] = "logistic";
        r["learning_rate"] = lr->config.learning_rate;
        r["l2"] = lr->config.l2;
        r["epochs"] = lr->config.epochs;
        r["seed"] = lr->config.seed;
        r["bias"] = lr->bias;
        r["weights"] = lr->weights;
    } else if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        r["type"] = "naive_bayes";
        r["alpha"] = nb->alpha;
        r["log_prior"] = nb->log_prior;
        r["log_likelihood"] = nb->log_likelihood;
    } else if (const auto* ridge = std::get_if<RidgeModel>(&model)) {
        r["type"] = "ridge";
        r["lambda"] = ridge->lambda;
        r["classes"] = ridge->classes;
        r["weights"] = ridge->weights;
    } else {
        const auto& f = std::get<ForestModel>(model);
        r["type"] = "forest";
        r["mode"] = to_string(f.config.mode);
        r["n_trees"] = f.config.n_trees;
        r["max_depth"] = f.config.max_depth;
        r["min_leaf"] = f.config.min_leaf;
        r["max_features"] = f.config.max_features;
        r["seed"] = f.config.seed;
        r["dim"] = f.dim;
        r["n_classes"] = f.n_classes;
        auto trees = ordered_json::array();
        for (const auto& t : f.trees) {
            ordered_json jt;
            jt["feature"] = t.feature;
            jt["threshold"] = t.threshold;
            jt["left"] = t.left;
            jt["right"] = t.right;
            jt["histogram"] = t.histogram;
            trees.push_back(std::move(jt));
        }
        r["trees"] = std::move(trees);
    }
    return r;
}

BankModel parse_model(const json& r) {
    const auto type = r.at("type").get<std::string>();
    if (type == "logistic") {
        LogisticModel m;
        m.config.learning_rate = r.at("learning_rate").get<double>();
        m.config.l2 = r.at("l2").get<double>();
        m.config.epochs = r.at("epochs").get<std::size_t>();
        m.config.seed = r.at("seed").get<std::uint64_t>();
        m.bias = r.at("bias").get<double>();
        m.weights = r.at("weights").get<std::vector<double>>();
        return m;
    }
    if (type == "naive_bayes") {
        NaiveBayesModel m;
        m.alpha = r.at("alpha").get<double>();
        m.log_prior = r.at("log_prior").get<std::array<double, 2>>();
        m.log_likelihood = r.at("log_likelihood").get<std::vector<double>>();
        return m;
    }
    if (type == "ridge") {
        RidgeModel m;
        m.lambda = r.at("lambda").get<double>();
        m.classes = r.at("classes").get<std::vector<int>>();
        m.weights = r.at("weights").get<std::vector<double>>();
        if (m.classes.empty() || m.weights.size() % m.classes.size() != 0) {
            throw Error("ridge record has inconsistent weight shape");
        }
        return m;
    }
    if (type == "forest") {
        ForestModel m;
        m.config.mode = parse_forest_mode(r.at("mode").get<std::string>());
        m.config.n_trees = r.at("n_trees").get<std::size_t>();
        m.config.max_depth = r.at("max_depth").get<std::size_t>();
        m.config.min_leaf = r.at("min_leaf").get<std::size_t>();
        m.config.max_features = r.at("max_features").get<std::size_t>();
        m.config.seed = r.at("seed").get<std::uint64_t>();
        m.dim = r.at("dim").get<std::size_t>();
        m.n_classes = r.at("n_classes").get<std::size_t>();
        for (const auto& jt : r.at("trees")) {
            DecisionTree t;
            t.feature = jt.at("feature").get<std::vector<int>>();
            t.threshold = jt.at("threshold").get<std::vector<double>>();
            t.left = jt.at("left").get<std::vector<int>>();
            t.right = jt.at("right").get<std::vector<int>>();
            t.histogram = jt.at("histogram").get<std::vector<double>>();
            const std::size_t nodes = t.feature.size();
            if (nodes == 0 || t.threshold.size() != nodes || t.left.size() != nodes ||
                t.right.size() != nodes || t.histogram.size() != nodes * m.n_classes) {
                throw Error("forest record has inconsistent tree arrays");
            }
            for (std::size_t i = 0; i < nodes; ++i) {
                if (t.feature[i] >= 0 &&
                    (static_cast<std::size_t>(t.feature[i]) >= m.dim || t.left[i] <= 0 ||
                     t.right[i] <= 0 || static_cast<std::size_t>(t.left[i]) >= nodes ||
                     static_cast<std::size_t>(t.right[i]) >= nodes)) {
                    throw Error("forest record has an invalid split node");
                }
            }
            m.trees.push_back(std::move(t));
        }
        return m;
    }
    throw Error("unknown model record type '" + type + "'");
}

}  // namespace

void save_bank(const QuestionBank& bank, std::ostream& out) {
    ordered_json header;
    header["schema_version"] = kBankSchemaVersion;
    header["kind"] = to_string(bank.kind);
    header["dim"] = bank.dim;
    header["keys"] = bank.keys;
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < bank.keys.size(); ++i) {
        out << model_record(bank.keys[i], bank.models[i]).dump() << '\n';
    }
}

QuestionBank load_bank(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    QuestionBank bank;
    try {
        if (!std::getline(in, line)) {
            throw ParseError("empty model bank", 1);
        }
        ++line_no;
        auto header = json::parse(line);
        int version = header.at("schema_version").get<int>();
        if (version != kBankSchemaVersion) {
            throw ParseError("unsupported bank schema_version " + std::to_string(version), 1);
        }
        bank.kind = parse_model_kind(header.at("kind").get<std::string>());
        bank.dim = header.at("dim").get<std::size_t>();
        bank.keys = header.at("keys").get<std::vector<std::string>>();
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) {
                continue;
            }
            auto record = json::parse(line);
            auto key = record.at("key").get<std::string>();
            if (bank.models.size() >= bank.keys.size() || key != bank.keys[bank.models.size()]) {
                throw ParseError("unexpected model record for key '" + key + "'", line_no);
            }
            bank.models.push_back(parse_model(record));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model bank: ") + e.what(), line_no);
    }
    if (bank.models.size() != bank.keys.size()) {
        throw ParseError("model bank has " + std::to_string(bank.models.size()) +
                             " records for " + std::to_string(bank.keys.size()) + " keys",
                         line_no);
    }
    return bank;
}

}  // namespace riskrank
