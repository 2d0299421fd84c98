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

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "riskrank/bank.hpp"
#include "riskrank/corpus.hpp"
#include "riskrank/eval.hpp"
#include "riskrank/pca.hpp"
#include "riskrank/pipeline.hpp"
#include "riskrank/preprocess.hpp"
#include "riskrank/synth.hpp"
#include "riskrank/word2vec.hpp"

namespace py = pybind11;
using namespace riskrank;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

FeatureMatrix to_matrix(const Array& a) {
    if (a.ndim() != 2) {
        throw py::value_error("expected a 2-d array");
    }
    auto rows = static_cast<std::size_t>(a.shape(0));
    auto cols = static_cast<std::size_t>(a.shape(1));
    std::vector<std::string> ids;
    ids.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        ids.push_back(std::to_string(i));
    }
    return FeatureMatrix::dense(std::move(ids), cols,
                                std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const FeatureMatrix& m) {
    Array out({m.rows(), m.dim()});
    auto* p = out.mutable_data();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.dense_row(i);
        std::copy(row.begin(), row.end(), p + i * m.dim());
    }
    return out;
}

Array to_array(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    Array out({rows, cols});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

template <typename T, typename W>
std::string to_text(const std::vector<T>& items, W write) {
    std::ostringstream out;
    write(items, out);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "riskrank native core";

    // Most recently registered translators run first, so the subclass goes last.
    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", error);

    // corpus
    py::class_<Document>(m, "Document")
        .def(py::init<>())
        .def(py::init([](std::string docno, std::string text, std::optional<std::string> pre,
                         std::optional<std::string> post) {
                 return Document{std::move(docno), std::move(text), std::move(pre), std::move(post)};
             }),
             py::arg("docno"), py::arg("text"), py::arg("pre") = py::none(),
             py::arg("post") = py::none())
        .def_readwrite("docno", &Document::docno)
        .def_readwrite("text", &Document::text)
        .def_readwrite("pre", &Document::pre)
        .def_readwrite("post", &Document::post)
        .def("content", &Document::content, py::arg("use_context") = false)
        .def(py::self == py::self)
        .def("__repr__", [](const Document& d) { return "<Document " + d.docno + ">"; });

    py::class_<Qrel>(m, "Qrel")
        .def(py::init([](std::string q, std::string d, int r) { return Qrel{std::move(q), std::move(d), r}; }),
             py::arg("question_id"), py::arg("docno"), py::arg("relevance"))
        .def_readwrite("question_id", &Qrel::question_id)
        .def_readwrite("docno", &Qrel::docno)
        .def_readwrite("relevance", &Qrel::relevance)
        .def(py::self == py::self);

    py::class_<RunEntry>(m, "RunEntry")
        .def(py::init([](std::string q, std::string d, std::size_t rank, double score, std::string tag) {
                 return RunEntry{std::move(q), std::move(d), rank, score, std::move(tag)};
             }),
             py::arg("question_id"), py::arg("docno"), py::arg("rank"), py::arg("score"),
             py::arg("run_tag") = "riskrank")
        .def_readwrite("question_id", &RunEntry::question_id)
        .def_readwrite("docno", &RunEntry::docno)
        .def_readwrite("rank", &RunEntry::rank)
        .def_readwrite("score", &RunEntry::score)
        .def_readwrite("run_tag", &RunEntry::run_tag)
        .def(py::self == py::self);

    py::class_<CorpusStats>(m, "CorpusStats")
        .def_readonly("n_users", &CorpusStats::n_users)
        .def_readonly("n_sentences", &CorpusStats::n_sentences)
        .def_readonly("mean_words_per_sentence", &CorpusStats::mean_words_per_sentence)
        .def_readonly("median_words_per_sentence", &CorpusStats::median_words_per_sentence);

    m.def("parse_trec_documents", py::overload_cast<std::string_view>(&parse_trec_documents),
          py::arg("text"));
    m.def("format_trec_documents", [](const std::vector<Document>& docs) {
        return to_text(docs, [](const auto& d, std::ostream& o) { write_trec_documents(d, o); });
    });
    m.def("parse_qrels", py::overload_cast<std::string_view>(&parse_qrels), py::arg("text"));
    m.def("format_qrels", [](const std::vector<Qrel>& q) {
        return to_text(q, [](const auto& d, std::ostream& o) { write_qrels(d, o); });
    });
    m.def("parse_run", py::overload_cast<std::string_view>(&parse_run), py::arg("text"));
    m.def("format_run", [](const std::vector<RunEntry>& r) {
        return to_text(r, [](const auto& d, std::ostream& o) { write_run(d, o); });
    });
    m.def("user_of_docno",
          [](std::string_view docno, std::string_view pattern) {
              return user_of_docno(docno, UserPattern::parse(pattern));
          },
          py::arg("docno"), py::arg("pattern") = "_:2");
    m.def("corpus_stats",
          [](const std::vector<Document>& docs, std::string_view pattern) {
              return corpus_stats(docs, UserPattern::parse(pattern));
          },
          py::arg("docs"), py::arg("pattern") = "_:2");

    // preprocess
    m.def("clean_text", &clean_text, py::arg("text"));
    m.def("tokenize", &tokenize, py::arg("text"));
    m.def("porter_stem", &porter_stem, py::arg("word"));
    m.def("stem", &stem, py::arg("word"));
    m.def("compression_ratio", &compression_ratio, py::arg("text"),
          py::arg("level") = kDefaultCompressionLevel);
    m.def("filter_documents",
          [](const std::vector<Document>& docs, double ratio_min, double ratio_max,
             std::size_t min_tokens, bool use_context) {
              FilterConfig cfg;
              cfg.ratio_min = ratio_min;
              cfg.ratio_max = ratio_max;
              cfg.min_tokens = min_tokens;
              return filter_documents(docs, std::unordered_map<std::string, double>{}, cfg, use_context);
          },
          py::arg("docs"), py::arg("ratio_min") = 0.6, py::arg("ratio_max") = 1.1,
          py::arg("min_tokens") = 1, py::arg("use_context") = false);
    m.def("chunk_tokens",
          [](const std::string& user, const std::vector<std::string>& posts, std::size_t n) {
              UserHistory h{user, {}};
              for (std::size_t i = 0; i < posts.size(); ++i) {
                  h.posts.push_back({static_cast<std::int64_t>(i), posts[i]});
              }
              std::vector<std::vector<std::string>> out;
              for (auto& c : chunk_user_history(h, n)) {
                  out.push_back(std::move(c.tokens));
              }
              return out;
          },
          py::arg("user_id"), py::arg("posts"), py::arg("n") = kChunkTokens);

    // eval
    py::class_<RankMetrics>(m, "RankMetrics")
        .def_readonly("map", &RankMetrics::map)
        .def_readonly("r_prec", &RankMetrics::r_prec)
        .def_readonly("p_at_10", &RankMetrics::p_at_10)
        .def_readonly("ndcg", &RankMetrics::ndcg)
        .def_readonly("evaluated", &RankMetrics::evaluated)
        .def_readonly("skipped", &RankMetrics::skipped);
    py::class_<QuestionnaireMetrics>(m, "QuestionnaireMetrics")
        .def_readonly("mae", &QuestionnaireMetrics::mae)
        .def_readonly("mzoe", &QuestionnaireMetrics::mzoe)
        .def_readonly("mae_macro", &QuestionnaireMetrics::mae_macro)
        .def_readonly("ged", &QuestionnaireMetrics::ged)
        .def_readonly("rs", &QuestionnaireMetrics::rs)
        .def_readonly("ecs", &QuestionnaireMetrics::ecs)
        .def_readonly("scs", &QuestionnaireMetrics::scs)
        .def_readonly("wcs", &QuestionnaireMetrics::wcs);
    py::class_<QuestionnaireAnswers>(m, "QuestionnaireAnswers")
        .def(py::init([](std::string user, std::vector<int> answers) {
                 QuestionnaireAnswers a{std::move(user), std::move(answers)};
                 validate(a);
                 return a;
             }),
             py::arg("user_id"), py::arg("answers"))
        .def_readwrite("user_id", &QuestionnaireAnswers::user_id)
        .def_readwrite("answers", &QuestionnaireAnswers::answers)
        .def(py::self == py::self);

    m.def("evaluate_rank",
          [](const std::vector<RunEntry>& run, const std::vector<Qrel>& qrels) {
              return evaluate_rank(run, qrels);
          },
          py::arg("run"), py::arg("qrels"));
    m.def("evaluate_questionnaire",
          [](const std::vector<QuestionnaireAnswers>& pred,
             const std::vector<QuestionnaireAnswers>& truth, std::optional<std::string> subscales) {
              SubscaleMap map = subscales ? SubscaleMap::load(*subscales) : SubscaleMap::defaults();
              return evaluate_questionnaire(pred, truth, map);
          },
          py::arg("pred"), py::arg("truth"), py::arg("subscales") = py::none());

    // synth
    m.def("generate_ranking_corpus",
          [](std::uint64_t seed, std::size_t n_users, std::size_t judged_negatives,
             double degenerate_rate) {
              SynthConfig cfg;
              cfg.seed = seed;
              cfg.n_users = n_users;
              cfg.judged_negatives = judged_negatives;
              cfg.degenerate_rate = degenerate_rate;
              auto c = generate_ranking_corpus(cfg);
              py::dict out;
              out["documents"] = c.documents;
              out["qrels_majority"] = c.qrels_majority;
              out["qrels_unanimity"] = c.qrels_unanimity;
              out["topic_keywords"] = c.topic_keywords;
              out["degenerate_docnos"] = c.degenerate_docnos;
              return out;
          },
          py::arg("seed") = 42, py::arg("n_users") = 400, py::arg("judged_negatives") = 400,
          py::arg("degenerate_rate") = 0.01);
    m.def("generate_user_histories",
          [](std::uint64_t seed, std::size_t n_users, std::size_t max_posts, double slope,
             std::string user_prefix) {
              HistoryConfig cfg;
              cfg.seed = seed;
              cfg.n_users = n_users;
              cfg.max_posts = max_posts;
              cfg.slope = slope;
              cfg.user_prefix = std::move(user_prefix);
              auto c = generate_user_histories(cfg);
              py::list histories;
              for (const auto& h : c.histories) {
                  py::list posts;
                  for (const auto& p : h.posts) {
                      posts.append(py::make_tuple(p.timestamp, p.text));
                  }
                  histories.append(py::make_tuple(h.user_id, posts));
              }
              py::dict out;
              out["histories"] = histories;
              out["truths"] = c.truths;
              return out;
          },
          py::arg("seed") = 7, py::arg("n_users") = 74, py::arg("max_posts") = 1143,
          py::arg("slope") = 0.35, py::arg("user_prefix") = "subject");

    // features
    m.def("pca_fit",
          [](const Array& x, std::size_t k, bool standardize) {
              auto model = pca_fit(to_matrix(x), k, standardize);
              py::dict out;
              out["mean"] = model.mean;
              out["scale"] = model.scale;
              out["eigenvalues"] = model.eigenvalues;
              out["total_variance"] = model.total_variance;
              out["components"] = to_array(model.components, model.k(), model.input_dim());
              out["scores"] = to_array(pca_transform(to_matrix(x), model));
              return out;
          },
          py::arg("x"), py::arg("k") = kDefaultPcaComponents, py::arg("standardize") = true);
    m.def("word2vec",
          [](const TokenDocs& sentences, std::size_t dim, std::size_t window, std::size_t epochs,
             const std::string& mode, std::uint64_t seed) {
              Word2VecConfig cfg;
              cfg.dim = dim;
              cfg.window = window;
              cfg.epochs = epochs;
              cfg.mode = parse_word2vec_mode(mode);
              cfg.seed = seed;
              auto model = train_word2vec(sentences, cfg);
              py::dict vectors;
              for (std::size_t i = 0; i < model.terms.size(); ++i) {
                  auto v = model.vector(i);
                  vectors[py::str(model.terms[i])] = std::vector<double>(v.begin(), v.end());
              }
              return py::make_tuple(vectors, model.epoch_loss);
          },
          py::arg("sentences"), py::arg("dim") = 100, py::arg("window") = 5,
          py::arg("epochs") = 5, py::arg("mode") = "cbow", py::arg("seed") = 1);

    // pipelines
    m.def("run_rank_pipeline",
          [](const std::vector<Document>& docs, const std::vector<Qrel>& majority,
             const std::vector<Qrel>& unanimity, const std::string& model, std::size_t k,
             std::size_t threads) {
              RankPipelineOptions opts;
              opts.model = parse_model_kind(model);
              opts.k = k;
              opts.train.threads = threads;
              RankPipelineResult r;
              {
                  py::gil_scoped_release release;
                  r = run_rank_pipeline(docs, majority, unanimity, opts);
              }
              py::dict out;
              out["run"] = r.run;
              out["majority"] = r.evaluation.majority;
              out["unanimity"] = r.evaluation.unanimity;
              out["accuracy"] = r.accuracy;
              out["removed"] = r.removed;
              out["n_train"] = r.n_train;
              out["n_test"] = r.n_test;
              return out;
          },
          py::arg("documents"), py::arg("qrels_majority"), py::arg("qrels_unanimity"),
          py::arg("model") = "logistic_count", py::arg("k") = kMaxRunDepth, py::arg("threads") = 1);
    m.def("run_questionnaire_pipeline",
          [](const std::vector<std::pair<std::string, std::vector<std::string>>>& train_posts,
             const std::vector<QuestionnaireAnswers>& train_truth,
             const std::vector<std::pair<std::string, std::vector<std::string>>>& test_posts,
             const std::vector<QuestionnaireAnswers>& test_truth, const std::string& model,
             std::size_t embed_dim, std::size_t pca_k, const std::string& aggregate) {
              auto histories = [](const auto& users) {
                  std::vector<UserHistory> out;
                  for (const auto& [user, posts] : users) {
                      UserHistory h{user, {}};
                      for (std::size_t i = 0; i < posts.size(); ++i) {
                          h.posts.push_back({static_cast<std::int64_t>(i), posts[i]});
                      }
                      out.push_back(std::move(h));
                  }
                  return out;
              };
              QuestionnairePipelineOptions opts;
              opts.model = parse_model_kind(model);
              opts.embed_dim = embed_dim;
              opts.pca_k = pca_k;
              opts.aggregate = parse_aggregation(aggregate);
              auto train = histories(train_posts);
              auto test = histories(test_posts);
              QuestionnairePipelineResult r;
              {
                  py::gil_scoped_release release;
                  r = run_questionnaire_pipeline(train, train_truth, test, test_truth, opts);
              }
              py::dict out;
              out["predictions"] = r.predictions;
              out["metrics"] = r.metrics;
              out["all_zero"] = r.all_zero;
              out["all_six"] = r.all_six;
              out["best_constant"] = r.best_constant;
              out["best_constant_value"] = r.best_constant_value;
              return out;
          },
          py::arg("train_histories"), py::arg("train_truth"), py::arg("test_histories"),
          py::arg("test_truth"), py::arg("model") = "ridge", py::arg("embed_dim") = 768,
          py::arg("pca_k") = kDefaultPcaComponents, py::arg("aggregate") = "vector_mean");
}
