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

// riskrank command-line tool.
//
// Every command writes its artifact plus "<artifact>.manifest.json" (or
// "<dir>/manifest.json" for synth) recording the effective configuration, its
// hash, the seed and digests of inputs and outputs. Exit codes: 0 success,
// 1 runtime or data error, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "riskrank/bank.hpp"
#include "riskrank/corpus.hpp"
#include "riskrank/eval.hpp"
#include "riskrank/features.hpp"
#include "riskrank/history.hpp"
#include "riskrank/pca.hpp"
#include "riskrank/pipeline.hpp"
#include "riskrank/preprocess.hpp"
#include "riskrank/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace riskrank;

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Global {
    std::size_t threads = std::max(1U, std::thread::hardware_concurrency());
    bool json = false;
};

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::uint64_t h = fnv1a("");
    std::array<char, 1 << 16> buf{};
    while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
        h = fnv1a(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
    }
    return "fnv1a64:" + hex64(h);
}

void require_file(const std::string& path, const std::string& hint) {
    if (!fs::is_regular_file(path)) {
        throw Error("missing input " + path + "; " + hint);
    }
}

std::ifstream open_in(const std::string& path, const std::string& hint) {
    require_file(path, hint);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

/// Effective option values of one subcommand, excluding options that do not
/// influence outputs.
json effective_config(const CLI::App* app) {
    static const std::unordered_set<std::string> ignored{"help", "config", "threads", "json"};
    json config = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        std::string name = opt->get_single_name();
        if (name.empty() || ignored.contains(name)) {
            continue;
        }
        if (opt->get_expected_max() == 0) {
            config[name] = opt->count() > 0 ? "true" : "false";
        } else if (opt->count() > 0) {
            const auto& results = opt->results();
            if (results.size() == 1 && opt->get_expected_max() <= 1) {
                config[name] = results.front();
            } else {
                config[name] = results;
            }
        } else if (opt->get_expected_max() > 1) {
            config[name] = json::array();
        } else {
            config[name] = opt->get_default_str();
        }
    }
    return config;
}

struct Manifest {
    std::string command;
    json config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    json extra = json::object();

    void write(const fs::path& path) const {
        json m;
        m["tool"] = "riskrank";
        m["version"] = kVersion;
        m["command"] = command;
        m["config"] = config;
        m["config_hash"] = "fnv1a64:" + hex64(fnv1a(config.dump()));
        m["seed"] = seed ? json(*seed) : json(nullptr);
        json in = json::object();
        for (const auto& p : inputs) {
            in[p] = file_digest(p);
        }
        m["inputs"] = in;
        json out = json::object();
        for (const auto& p : outputs) {
            out[p] = file_digest(p);
        }
        m["outputs"] = out;
        for (const auto& [k, v] : extra.items()) {
            m[k] = v;
        }
        auto f = open_out(path);
        f << m.dump(2) << '\n';
        close_out(f, path);
    }
};

fs::path manifest_for(const std::string& artifact) { return artifact + ".manifest.json"; }

/// Applies the RISKRANK_SEED fallback when --seed was given neither on the
/// command line nor in a config file.
std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value, json& config) {
    if (opt->count() == 0) {
        if (const char* env = std::getenv("RISKRANK_SEED"); env != nullptr && *env != '\0') {
            try {
                std::size_t used = 0;
                value = std::stoull(env, &used);
                if (used != std::string_view(env).size()) {
                    throw std::invalid_argument(env);
                }
            } catch (const std::exception&) {
                throw UsageError(std::string("RISKRANK_SEED is not an unsigned integer: ") + env);
            }
        }
    }
    config["seed"] = std::to_string(value);
    return value;
}

template <typename F>
auto as_usage(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

TextPipeline text_pipeline(bool stem, const Stoplist* stoplist) {
    TextPipeline p;
    p.stem = stem;
    p.stopwords = stoplist;
    return p;
}

json pca_to_json(const PcaModel& m) {
    json j;
    j["schema_version"] = 1;
    j["mean"] = m.mean;
    j["scale"] = m.scale;
    j["eigenvalues"] = m.eigenvalues;
    j["total_variance"] = m.total_variance;
    j["components"] = m.components;
    return j;
}

PcaModel pca_from_json(const json& j) {
    if (j.value("schema_version", 0) != 1) {
        throw Error("unsupported PCA file schema");
    }
    PcaModel m;
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.total_variance = j.at("total_variance").get<double>();
    m.components = j.at("components").get<std::vector<double>>();
    if (m.scale.size() != m.mean.size() || m.components.size() != m.k() * m.input_dim()) {
        throw Error("PCA file has inconsistent shapes");
    }
    return m;
}

// ---------------------------------------------------------------- synth

struct SynthRankingArgs {
    std::string out;
    SynthConfig cfg;
};

json run_synth_ranking(SynthRankingArgs& a, const CLI::App* app) {
    Manifest m{"synth ranking", effective_config(app)};
    a.cfg.seed = resolve_seed(app->get_option("--seed"), a.cfg.seed, m.config);
    m.seed = a.cfg.seed;
    as_usage([&] {
        a.cfg.validate();
        return 0;
    });
    auto corpus = generate_ranking_corpus(a.cfg);
    fs::path dir(a.out);
    fs::create_directories(dir);
    auto docs_path = (dir / "documents.trec").string();
    auto maj_path = (dir / "qrels.majority").string();
    auto una_path = (dir / "qrels.unanimity").string();
    {
        auto f = open_out(docs_path);
        write_trec_documents(corpus.documents, f);
        close_out(f, docs_path);
    }
    {
        auto f = open_out(maj_path);
        write_qrels(corpus.qrels_majority, f);
        close_out(f, maj_path);
    }
    {
        auto f = open_out(una_path);
        write_qrels(corpus.qrels_unanimity, f);
        close_out(f, una_path);
    }
    m.outputs = {docs_path, maj_path, una_path};
    m.extra["documents"] = corpus.documents.size();
    m.extra["degenerate_documents"] = corpus.degenerate_docnos.size();
    m.write(dir / "manifest.json");

    json r;
    r["documents"] = corpus.documents.size();
    r["qrels_majority"] = corpus.qrels_majority.size();
    r["qrels_unanimity"] = corpus.qrels_unanimity.size();
    r["degenerate_documents"] = corpus.degenerate_docnos.size();
    r["out"] = a.out;
    return r;
}

struct SynthHistoriesArgs {
    std::string out;
    HistoryConfig cfg;
};

json run_synth_histories(SynthHistoriesArgs& a, const CLI::App* app) {
    Manifest m{"synth histories", effective_config(app)};
    a.cfg.seed = resolve_seed(app->get_option("--seed"), a.cfg.seed, m.config);
    m.seed = a.cfg.seed;
    as_usage([&] {
        a.cfg.validate();
        return 0;
    });
    auto corpus = generate_user_histories(a.cfg);
    fs::path dir(a.out);
    fs::create_directories(dir);
    auto hist_path = (dir / "histories.jsonl").string();
    auto truth_path = (dir / "truth.jsonl").string();
    {
        auto f = open_out(hist_path);
        write_histories(corpus.histories, f);
        close_out(f, hist_path);
    }
    {
        auto f = open_out(truth_path);
        write_answers(corpus.truths, f);
        close_out(f, truth_path);
    }
    m.outputs = {hist_path, truth_path};
    m.extra["users"] = corpus.histories.size();
    m.extra["null_control"] = a.cfg.slope == 0.0;
    m.write(dir / "manifest.json");

    std::size_t posts = 0;
    for (const auto& h : corpus.histories) {
        posts += h.posts.size();
    }
    json r;
    r["users"] = corpus.histories.size();
    r["posts"] = posts;
    r["null_control"] = a.cfg.slope == 0.0;
    r["out"] = a.out;
    return r;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::vector<std::string> files;
    std::string out;
    std::string user_pattern = "_:2";
};

json run_ingest(IngestArgs& a, const CLI::App* app) {
    Manifest m{"ingest", effective_config(app)};
    auto pattern = as_usage([&] { return UserPattern::parse(a.user_pattern); });
    std::unordered_set<std::string> seen;
    CorpusStatsBuilder stats(pattern);
    std::vector<Document> docs;
    for (const auto& path : a.files) {
        auto in = open_in(path, "check the TREC file path");
        TrecReader reader(in, &seen);
        try {
            while (auto doc = reader.next()) {
                stats.add(*doc);
                docs.push_back(std::move(*doc));
            }
        } catch (const ParseError& e) {
            throw Error(path + ": " + e.what());
        }
    }
    {
        auto f = open_out(a.out);
        write_documents(docs, f);
        close_out(f, a.out);
    }
    m.inputs = a.files;
    m.outputs = {a.out};
    m.write(manifest_for(a.out));

    auto s = stats.finish();
    json r;
    r["documents"] = docs.size();
    r["n_users"] = s.n_users;
    r["n_sentences"] = s.n_sentences;
    r["mean_words_per_sentence"] = s.mean_words_per_sentence;
    r["median_words_per_sentence"] = s.median_words_per_sentence;
    r["out"] = a.out;
    return r;
}

std::vector<Document> load_corpus(const std::string& path) {
    auto in = open_in(path, "run `riskrank ingest` to build the corpus file");
    return read_documents(in);
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
    std::string corpus;
    std::string out;
    std::string prefilter_scores;
    std::string removed;
    FilterConfig cfg;
    bool use_context = false;
};

json run_filter(FilterArgs& a, const CLI::App* app) {
    Manifest m{"filter", effective_config(app)};
    as_usage([&] {
        a.cfg.validate();
        return 0;
    });
    auto docs = load_corpus(a.corpus);
    m.inputs = {a.corpus};
    std::unordered_map<std::string, double> scores;
    if (!a.prefilter_scores.empty()) {
        auto in = open_in(a.prefilter_scores, "expected lines of \"docno score\"");
        std::string docno;
        double score = 0.0;
        while (in >> docno >> score) {
            scores[docno] = score;
        }
        if (!in.eof()) {
            throw Error(a.prefilter_scores + ": malformed score line");
        }
        m.inputs.push_back(a.prefilter_scores);
    } else if (a.cfg.prefilter_threshold > 0.0) {
        throw UsageError("--prefilter-threshold needs --prefilter-scores");
    }
    auto kept = filter_documents(docs, scores, a.cfg, a.use_context);
    {
        auto f = open_out(a.out);
        write_documents(kept, f);
        close_out(f, a.out);
    }
    m.outputs = {a.out};
    if (!a.removed.empty()) {
        std::unordered_set<std::string> kept_ids;
        for (const auto& d : kept) {
            kept_ids.insert(d.docno);
        }
        auto f = open_out(a.removed);
        for (const auto& d : docs) {
            if (!kept_ids.contains(d.docno)) {
                f << d.docno << '\n';
            }
        }
        close_out(f, a.removed);
        m.outputs.push_back(a.removed);
    }
    m.write(manifest_for(a.out));

    json r;
    r["documents"] = docs.size();
    r["kept"] = kept.size();
    r["removed"] = docs.size() - kept.size();
    r["out"] = a.out;
    return r;
}

// ---------------------------------------------------------------- featurize

struct SplitArgs {
    std::uint64_t seed = 0;
    double fraction = 0.5;

    void add(CLI::App* app) {
        app->add_option("--split-seed", seed, "Seed of the docno-hash holdout split");
        app->add_option("--holdout-fraction", fraction, "Share of documents held out for testing")
            ->check(CLI::Range(0.0, 1.0));
    }
    [[nodiscard]] bool heldout(const std::string& docno) const {
        return in_holdout(docno, seed, fraction);
    }
};

struct FeaturizeArgs {
    std::string corpus;
    std::string histories;
    std::string out;
    std::string kind = "count";
    std::size_t min_df = 1;
    double max_df = 1.0;
    bool use_context = false;
    bool stem = false;
    std::string stopwords;
    SplitArgs split;
    Word2VecConfig w2v;
    std::string w2v_mode = "cbow";
    std::size_t embed_dim = 768;
    std::uint64_t embed_seed = 0;
    std::size_t chunk_tokens = kChunkTokens;
};

json run_featurize(FeaturizeArgs& a, const CLI::App* app) {
    Manifest m{"featurize", effective_config(app)};
    a.w2v.seed = resolve_seed(app->get_option("--seed"), a.w2v.seed, m.config);
    m.seed = a.w2v.seed;
    FeatureOptions opts;
    as_usage([&] {
        opts.kind = parse_feature_kind(a.kind);
        a.w2v.mode = parse_word2vec_mode(a.w2v_mode);
        return 0;
    });
    opts.min_df = a.min_df;
    opts.max_df_fraction = a.max_df;
    opts.word2vec = a.w2v;
    opts.embed_dim = a.embed_dim;
    opts.embed_seed = a.embed_seed;

    Stoplist stoplist;
    if (!a.stopwords.empty()) {
        require_file(a.stopwords, "pass a stopword list, one word per line");
        stoplist = load_stoplist(fs::path(a.stopwords));
        m.inputs.push_back(a.stopwords);
    }
    auto text = text_pipeline(a.stem, a.stopwords.empty() ? nullptr : &stoplist);

    FeatureMatrix features;
    json r;
    if (!a.histories.empty()) {
        if (opts.kind != FeatureKind::embedding) {
            throw UsageError("user histories are featurized with --kind embedding");
        }
        auto in = open_in(a.histories, "run `riskrank synth histories` or supply a histories file");
        auto histories = read_histories(in);
        m.inputs.insert(m.inputs.begin(), a.histories);
        features = embed_histories(histories, HashEmbedder(a.embed_dim, a.embed_seed),
                                   a.chunk_tokens, text);
        r["users"] = histories.size();
        r["chunks"] = features.rows();
    } else {
        auto docs = load_corpus(a.corpus);
        m.inputs.insert(m.inputs.begin(), a.corpus);
        TokenDocs tokens;
        TokenDocs fit;
        std::vector<std::string> ids;
        for (const auto& d : docs) {
            tokens.push_back(text(d.content(a.use_context)));
            ids.push_back(d.docno);
            if (!a.split.heldout(d.docno)) {
                fit.push_back(tokens.back());
            }
        }
        if (fit.empty()) {
            throw Error("the holdout split left no training documents to fit on");
        }
        features = build_features(fit, tokens, std::move(ids), opts);
        r["documents"] = docs.size();
        r["fit_documents"] = fit.size();
    }
    save_features(features, a.out);
    m.outputs = {a.out};
    m.write(manifest_for(a.out));
    r["kind"] = to_string(opts.kind);
    r["dim"] = features.dim();
    r["out"] = a.out;
    return r;
}

FeatureMatrix load_feature_file(const std::string& path) {
    require_file(path, "run `riskrank featurize` first");
    return load_features(path);
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string features;
    std::string qrels;
    std::string truth;
    std::string out;
    std::string pca_out;
    std::string model = "logistic_count";
    SplitArgs split;
    bool all_docs = false;
    std::vector<std::string> questions;
    std::uint64_t seed = 0;
    LogisticConfig logistic;
    double nb_alpha = 1.0;
    double max_negative_ratio = 10.0;
    std::size_t pca_k = kDefaultPcaComponents;
    bool no_standardize = false;
    double ridge_lambda = 1.0;
    ForestConfig forest;
    std::string forest_mode;
};

json run_train(TrainArgs& a, const CLI::App* app, const Global& g) {
    Manifest m{"train", effective_config(app)};
    a.seed = resolve_seed(app->get_option("--seed"), a.seed, m.config);
    m.seed = a.seed;
    auto kind = as_usage([&] { return parse_model_kind(a.model); });
    auto features = load_feature_file(a.features);
    m.inputs = {a.features};
    json r;
    r["model"] = to_string(kind);

    QuestionBank bank;
    if (task_of(kind) == BankTask::rank) {
        if (a.qrels.empty()) {
            throw UsageError("ranking models need --qrels");
        }
        auto in = open_in(a.qrels, "pass the qrels used for training");
        auto qrels = parse_qrels(in);
        m.inputs.push_back(a.qrels);
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < features.rows(); ++i) {
            if (a.all_docs || !a.split.heldout(features.docnos()[i])) {
                rows.push_back(i);
            }
        }
        RankTrainOptions opts;
        if (!a.questions.empty()) {
            opts.questions = a.questions;
        }
        opts.logistic = a.logistic;
        opts.logistic.seed = a.seed;
        opts.nb_alpha = a.nb_alpha;
        opts.max_negative_ratio = a.max_negative_ratio;
        opts.seed = a.seed;
        opts.threads = g.threads;
        bank = train_question_bank_t1(features.select(rows), qrels, kind, opts);
        r["training_documents"] = rows.size();
    } else {
        if (a.truth.empty()) {
            throw UsageError("questionnaire models need --truth");
        }
        auto in = open_in(a.truth, "pass the training questionnaire answers");
        auto truth = read_answers(in);
        m.inputs.push_back(a.truth);
        auto users = aggregate_users(features);
        if (a.pca_k > 0) {
            auto pca = pca_fit(users, a.pca_k, !a.no_standardize);
            users = pca_transform(users, pca);
            std::string path = a.pca_out.empty() ? a.out + ".pca.json" : a.pca_out;
            auto f = open_out(path);
            f << pca_to_json(pca).dump() << '\n';
            close_out(f, path);
            m.outputs.push_back(path);
            r["pca_components"] = pca.k();
            double kept = 0.0;
            for (double v : pca.eigenvalues) {
                kept += v;
            }
            r["explained_variance"] = pca.total_variance > 0 ? kept / pca.total_variance : 0.0;
        }
        QuestionnaireTrainOptions opts;
        opts.ridge_lambda = a.ridge_lambda;
        opts.forest = a.forest;
        opts.forest.mode =
            kind == ModelKind::extra_trees ? ForestMode::extra_trees : ForestMode::random_forest;
        opts.seed = a.seed;
        opts.threads = g.threads;
        bank = train_question_bank_t3(users, truth, kind, opts);
        r["training_users"] = users.rows();
    }
    {
        auto f = open_out(a.out);
        save_bank(bank, f);
        close_out(f, a.out);
    }
    m.outputs.insert(m.outputs.begin(), a.out);
    m.write(manifest_for(a.out));
    r["questions"] = bank.keys.size();
    r["dim"] = bank.dim;
    r["out"] = a.out;
    return r;
}

QuestionBank load_bank_file(const std::string& path) {
    auto in = open_in(path, "run `riskrank train` first");
    return load_bank(in);
}

// ---------------------------------------------------------------- rank

struct RankArgs {
    std::string bank;
    std::string features;
    std::string out;
    std::size_t k = kMaxRunDepth;
    std::string tag = "riskrank";
    std::string pool = "test";
    SplitArgs split;
};

json run_rank(RankArgs& a, const CLI::App* app, const Global& g) {
    Manifest m{"rank", effective_config(app)};
    auto bank = load_bank_file(a.bank);
    if (bank.task() != BankTask::rank) {
        throw UsageError(a.bank + " holds a questionnaire bank; use `riskrank predict`");
    }
    auto features = load_feature_file(a.features);
    m.inputs = {a.bank, a.features};
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        if (a.pool == "all" || a.split.heldout(features.docnos()[i])) {
            rows.push_back(i);
        }
    }
    auto run = rank_documents(bank, features.select(rows), a.k, a.tag, g.threads);
    {
        auto f = open_out(a.out);
        write_run(run, f);
        close_out(f, a.out);
    }
    m.outputs = {a.out};
    m.write(manifest_for(a.out));
    json r;
    r["pool_documents"] = rows.size();
    r["questions"] = bank.keys.size();
    r["entries"] = run.size();
    r["out"] = a.out;
    return r;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    std::string bank;
    std::string features;
    std::string pca;
    std::string out;
    std::string aggregate = "vector_mean";
};

json run_predict(PredictArgs& a, const CLI::App* app) {
    Manifest m{"predict", effective_config(app)};
    auto aggregate = as_usage([&] { return parse_aggregation(a.aggregate); });
    auto bank = load_bank_file(a.bank);
    if (bank.task() != BankTask::questionnaire) {
        throw UsageError(a.bank + " holds a ranking bank; use `riskrank rank`");
    }
    auto chunks = load_feature_file(a.features);
    m.inputs = {a.bank, a.features};
    std::string pca_path = a.pca.empty() ? a.bank + ".pca.json" : a.pca;
    if (fs::exists(pca_path)) {
        auto in = open_in(pca_path, "");
        auto pca = pca_from_json(json::parse(in));
        chunks = pca_transform(chunks, pca);
        m.inputs.push_back(pca_path);
    } else if (!a.pca.empty()) {
        throw Error("missing input " + a.pca + "; run `riskrank train` with --pca-k");
    }
    auto predictions = predict_users(bank, chunks, aggregate);
    {
        auto f = open_out(a.out);
        write_answers(predictions, f);
        close_out(f, a.out);
    }
    m.outputs = {a.out};
    m.write(manifest_for(a.out));
    json r;
    r["users"] = predictions.size();
    r["chunks"] = chunks.rows();
    r["out"] = a.out;
    return r;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string run;
    std::string qrels_majority;
    std::string qrels_unanimity;
    std::string pool = "test";
    SplitArgs split;
    std::string name;
    std::string pred;
    std::string truth;
    std::string subscales;
    std::string team = "riskrank";
    std::string run_id;
    std::string out;
};

json run_eval(EvalArgs& a, const CLI::App* app, const Global& g, std::string& text) {
    Manifest m{"eval", effective_config(app)};
    std::ostringstream csv;
    json r;
    if (!a.run.empty()) {
        if (a.qrels_majority.empty() || a.qrels_unanimity.empty()) {
            throw UsageError("ranking evaluation needs --qrels-majority and --qrels-unanimity");
        }
        auto run_in = open_in(a.run, "run `riskrank rank` first");
        auto run = parse_run(run_in);
        auto load = [&](const std::string& path) {
            auto in = open_in(path, "pass a qrels file");
            auto all = parse_qrels(in);
            if (a.pool == "all") {
                return all;
            }
            std::vector<Qrel> kept;
            for (auto& q : all) {
                if (a.split.heldout(q.docno)) {
                    kept.push_back(std::move(q));
                }
            }
            return kept;
        };
        auto maj = load(a.qrels_majority);
        auto una = load(a.qrels_unanimity);
        m.inputs = {a.run, a.qrels_majority, a.qrels_unanimity};
        std::string name = a.name;
        if (name.empty()) {
            name = run.empty() ? "run" : run.front().run_tag;
        }
        std::vector<RunEvaluation> rows{evaluate_run(run, maj, una, name)};
        write_rank_csv(rows, csv);
        std::ostringstream js;
        write_rank_json(rows, js);
        r = json::parse(js.str());
    } else if (!a.pred.empty()) {
        if (a.truth.empty()) {
            throw UsageError("questionnaire evaluation needs --truth");
        }
        auto pred_in = open_in(a.pred, "run `riskrank predict` first");
        auto pred = read_answers(pred_in);
        auto truth_in = open_in(a.truth, "pass the questionnaire answers");
        auto truth = read_answers(truth_in);
        m.inputs = {a.pred, a.truth};
        SubscaleMap map = SubscaleMap::defaults();
        if (!a.subscales.empty()) {
            require_file(a.subscales, "pass a subscale map file");
            map = SubscaleMap::load(a.subscales);
            m.inputs.push_back(a.subscales);
        }
        std::string run_id = a.run_id.empty() ? fs::path(a.pred).stem().string() : a.run_id;
        std::vector<QuestionnaireReportRow> rows{
            {a.team, run_id, evaluate_questionnaire(pred, truth, map)}};
        write_questionnaire_csv(rows, csv);
        std::ostringstream js;
        write_questionnaire_json(rows, js);
        r = json::parse(js.str());
    } else {
        throw UsageError("eval needs --run (ranking) or --pred (questionnaire)");
    }
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        f << csv.str();
        close_out(f, a.out);
        m.outputs = {a.out};
        m.write(manifest_for(a.out));
    }
    if (!g.json) {
        text = csv.str();
    }
    return r;
}

void print_report(const json& r) {
    for (const auto& [k, v] : r.items()) {
        std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-questionnaire ranking and prediction over social media posts", "riskrank"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "INI file of key = value lines under [command] sections");
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--threads", g.threads, "Worker threads for data-parallel sections")
        ->check(CLI::PositiveNumber);
    app.add_flag("--json", g.json, "Print the report as JSON");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic datasets");
    synth->require_subcommand(1);
    SynthRankingArgs sr;
    auto* synth_rank = synth->add_subcommand("ranking", "TREC corpus with majority/unanimity qrels");
    synth_rank->add_option("--out", sr.out, "Output directory")->required();
    synth_rank->add_option("--seed", sr.cfg.seed, "Random seed");
    synth_rank->add_option("--n-questions", sr.cfg.n_questions);
    synth_rank->add_option("--keywords-per-topic", sr.cfg.keywords_per_topic);
    synth_rank->add_option("--n-users", sr.cfg.n_users);
    synth_rank->add_option("--min-docs-per-user", sr.cfg.min_docs_per_user);
    synth_rank->add_option("--max-docs-per-user", sr.cfg.max_docs_per_user);
    synth_rank->add_option("--min-words", sr.cfg.min_words);
    synth_rank->add_option("--max-words", sr.cfg.max_words);
    synth_rank->add_option("--relevance-rate", sr.cfg.relevance_rate);
    synth_rank->add_option("--borderline-rate", sr.cfg.borderline_rate);
    synth_rank->add_option("--majority-fraction", sr.cfg.majority_fraction);
    synth_rank->add_option("--degenerate-rate", sr.cfg.degenerate_rate);
    synth_rank->add_option("--judged-negatives", sr.cfg.judged_negatives);
    synth_rank->add_option("--vocab-size", sr.cfg.vocab_size);
    synth_rank->add_option("--zipf-exponent", sr.cfg.zipf_exponent);

    SynthHistoriesArgs sh;
    auto* synth_hist = synth->add_subcommand("histories", "User post histories with questionnaire answers");
    synth_hist->add_option("--out", sh.out, "Output directory")->required();
    synth_hist->add_option("--seed", sh.cfg.seed, "Seed of users, answers and posts");
    synth_hist->add_option("--vocab-seed", sh.cfg.vocab_seed, "Seed of the lexicon and noise words");
    synth_hist->add_option("--n-users", sh.cfg.n_users);
    synth_hist->add_option("--min-posts", sh.cfg.min_posts);
    synth_hist->add_option("--max-posts", sh.cfg.max_posts);
    synth_hist->add_option("--min-words", sh.cfg.min_words);
    synth_hist->add_option("--max-words", sh.cfg.max_words);
    synth_hist->add_option("--lexicon-per-tier", sh.cfg.lexicon_per_tier);
    synth_hist->add_option("--slope", sh.cfg.slope, "Strength of the planted signal; 0 gives a null control");
    synth_hist->add_option("--link-noise", sh.cfg.link_noise);
    synth_hist->add_option("--answer-noise", sh.cfg.answer_noise);
    synth_hist->add_option("--tier-width", sh.cfg.tier_width);
    synth_hist->add_option("--vocab-size", sh.cfg.vocab_size);
    synth_hist->add_option("--zipf-exponent", sh.cfg.zipf_exponent);
    synth_hist->add_option("--user-prefix", sh.cfg.user_prefix);

    // ingest
    IngestArgs ia;
    auto* ingest = app.add_subcommand("ingest", "Merge TREC files into a JSONL corpus and report statistics");
    ingest->add_option("files", ia.files, "TREC document files")->required();
    ingest->add_option("--out", ia.out, "Corpus file (JSON lines)")->required();
    ingest->add_option("--user-pattern", ia.user_pattern, "Docno delimiter and user field, e.g. _:2");

    // filter
    FilterArgs fa;
    auto* filter = app.add_subcommand("filter", "Drop degenerate documents by compression ratio");
    filter->add_option("--corpus", fa.corpus, "Corpus file")->required();
    filter->add_option("--out", fa.out, "Filtered corpus file")->required();
    filter->add_option("--ratio-min", fa.cfg.ratio_min);
    filter->add_option("--ratio-max", fa.cfg.ratio_max);
    filter->add_option("--min-tokens", fa.cfg.min_tokens);
    filter->add_option("--prefilter-threshold", fa.cfg.prefilter_threshold);
    filter->add_option("--prefilter-scores", fa.prefilter_scores, "Lines of \"docno score\"");
    filter->add_option("--removed", fa.removed, "Write removed docnos here");
    filter->add_flag("--use-context", fa.use_context, "Include PRE and POST context");

    // featurize
    FeaturizeArgs za;
    auto* featurize = app.add_subcommand("featurize", "Vectorize a corpus or user histories");
    auto* z_corpus = featurize->add_option("--corpus", za.corpus, "Corpus file");
    auto* z_hist = featurize->add_option("--histories", za.histories, "User histories (JSON lines)");
    z_corpus->excludes(z_hist);
    featurize->add_option("--out", za.out, "Feature file")->required();
    featurize->add_option("--kind", za.kind, "count, tfidf, word2vec or embedding");
    featurize->add_option("--min-df", za.min_df);
    featurize->add_option("--max-df", za.max_df)->check(CLI::Range(0.0, 1.0));
    featurize->add_flag("--use-context", za.use_context);
    featurize->add_flag("--stem", za.stem);
    featurize->add_option("--stopwords", za.stopwords, "Stopword list file");
    za.split.add(featurize);
    featurize->add_option("--seed", za.w2v.seed, "Word2Vec seed");
    featurize->add_option("--w2v-dim", za.w2v.dim);
    featurize->add_option("--w2v-window", za.w2v.window);
    featurize->add_option("--w2v-epochs", za.w2v.epochs);
    featurize->add_option("--w2v-negatives", za.w2v.negatives);
    featurize->add_option("--w2v-learning-rate", za.w2v.learning_rate);
    featurize->add_option("--w2v-mode", za.w2v_mode, "cbow or skipgram");
    featurize->add_option("--w2v-min-count", za.w2v.min_count);
    featurize->add_option("--embed-dim", za.embed_dim);
    featurize->add_option("--embed-seed", za.embed_seed);
    featurize->add_option("--chunk-tokens", za.chunk_tokens)->check(CLI::PositiveNumber);

    // train
    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Train a per-question model bank");
    train->add_option("--features", ta.features, "Feature file")->required();
    train->add_option("--out", ta.out, "Model bank file")->required();
    train->add_option("--model", ta.model,
                      "nb_count, logistic_count, logistic_w2v, logistic_embed, ridge, random_forest "
                      "or extra_trees");
    train->add_option("--qrels", ta.qrels, "Training qrels (ranking models)");
    train->add_option("--truth", ta.truth, "Training answers (questionnaire models)");
    ta.split.add(train);
    train->add_flag("--all-docs", ta.all_docs, "Train on every document instead of the training split");
    train->add_option("--questions", ta.questions, "Question ids (default 1..21)");
    train->add_option("--seed", ta.seed, "Training seed");
    train->add_option("--learning-rate", ta.logistic.learning_rate);
    train->add_option("--l2", ta.logistic.l2);
    train->add_option("--epochs", ta.logistic.epochs);
    train->add_option("--nb-alpha", ta.nb_alpha);
    train->add_option("--max-negative-ratio", ta.max_negative_ratio);
    train->add_option("--pca-k", ta.pca_k, "PCA components for questionnaire models; 0 disables");
    train->add_option("--pca-out", ta.pca_out, "PCA model file (default <out>.pca.json)");
    train->add_flag("--no-standardize", ta.no_standardize);
    train->add_option("--ridge-lambda", ta.ridge_lambda);
    train->add_option("--trees", ta.forest.n_trees);
    train->add_option("--max-depth", ta.forest.max_depth);
    train->add_option("--min-leaf", ta.forest.min_leaf);
    train->add_option("--max-features", ta.forest.max_features);

    // rank
    RankArgs ra;
    auto* rank = app.add_subcommand("rank", "Rank documents per question into a TREC run");
    rank->add_option("--bank", ra.bank, "Model bank file")->required();
    rank->add_option("--features", ra.features, "Feature file")->required();
    rank->add_option("--out", ra.out, "Run file")->required();
    rank->add_option("--k", ra.k, "Run depth per question")->check(CLI::Range(1, 1000));
    rank->add_option("--tag", ra.tag, "Run tag");
    rank->add_option("--pool", ra.pool, "Rank the held-out split (test) or every document (all)")
        ->check(CLI::IsMember({"test", "all"}));
    ra.split.add(rank);

    // predict
    PredictArgs pa;
    auto* predict = app.add_subcommand("predict", "Predict questionnaire answers per user");
    predict->add_option("--bank", pa.bank, "Model bank file")->required();
    predict->add_option("--features", pa.features, "Chunk embeddings")->required();
    predict->add_option("--pca", pa.pca, "PCA model file (default <bank>.pca.json when present)");
    predict->add_option("--out", pa.out, "Answers file (JSON lines)")->required();
    predict->add_option("--aggregate", pa.aggregate, "vector_mean or chunk_vote");

    // eval
    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Score a run or questionnaire predictions");
    eval->add_option("--run", ea.run, "TREC run file");
    eval->add_option("--qrels-majority", ea.qrels_majority);
    eval->add_option("--qrels-unanimity", ea.qrels_unanimity);
    eval->add_option("--pool", ea.pool, "Score on the held-out split (test) or all judgments")
        ->check(CLI::IsMember({"test", "all"}));
    ea.split.add(eval);
    eval->add_option("--name", ea.name, "Run name in the report (default: run tag)");
    eval->add_option("--pred", ea.pred, "Predicted answers");
    eval->add_option("--truth", ea.truth, "True answers");
    eval->add_option("--subscales", ea.subscales, "Subscale map file");
    eval->add_option("--team", ea.team);
    eval->add_option("--run-id", ea.run_id);
    eval->add_option("--out", ea.out, "CSV report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        json report;
        std::string text;
        if (synth_rank->parsed()) {
            report = run_synth_ranking(sr, synth_rank);
        } else if (synth_hist->parsed()) {
            report = run_synth_histories(sh, synth_hist);
        } else if (ingest->parsed()) {
            report = run_ingest(ia, ingest);
        } else if (filter->parsed()) {
            report = run_filter(fa, filter);
        } else if (featurize->parsed()) {
            if (za.corpus.empty() && za.histories.empty()) {
                throw UsageError("featurize needs --corpus or --histories");
            }
            report = run_featurize(za, featurize);
        } else if (train->parsed()) {
            report = run_train(ta, train, g);
        } else if (rank->parsed()) {
            report = run_rank(ra, rank, g);
        } else if (predict->parsed()) {
            report = run_predict(pa, predict);
        } else if (eval->parsed()) {
            report = run_eval(ea, eval, g, text);
        }
        if (g.json) {
            std::cout << report.dump(2) << '\n';
        } else if (!text.empty()) {
            std::cout << text;
        } else {
            print_report(report);
        }
    } catch (const UsageError& e) {
        std::cerr << "riskrank: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "riskrank: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
