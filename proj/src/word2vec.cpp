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

#include "riskrank/word2vec.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace riskrank {

std::string_view to_string(Word2VecMode mode) {
    return mode == Word2VecMode::cbow ? "cbow" : "skipgram";
}

Word2VecMode parse_word2vec_mode(std::string_view name) {
    if (name == "cbow") {
        return Word2VecMode::cbow;
    }
    if (name == "skipgram" || name == "skip-gram") {
        return Word2VecMode::skipgram;
    }
    throw Error("unknown word2vec mode '" + std::string(name) + "'");
}

std::optional<std::size_t> Word2VecModel::index(const std::string& token) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), token);
    if (it == terms.end() || *it != token) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - terms.begin());
}

namespace {

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) {
    return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

}  // namespace

Word2VecModel train_word2vec(const TokenDocs& docs, const Word2VecConfig& config) {
    if (config.dim == 0 || config.window == 0) {
        throw Error("word2vec dim and window must be positive");
    }
    if (config.min_count < 1) {
        throw Error("word2vec min_count must be at least 1");
    }
    if (!(config.learning_rate > 0.0)) {
        throw Error("word2vec learning rate must be positive");
    }

    std::map<std::string, std::size_t> freq;
    for (const auto& doc : docs) {
        for (const auto& t : doc) {
            ++freq[t];
        }
    }
    Word2VecModel model;
    model.config = config;
    for (auto& [term, count] : freq) {
        if (count >= config.min_count) {
            model.terms.push_back(term);
            model.counts.push_back(count);
        }
    }
    std::vector<std::vector<std::uint32_t>> sequences;
    std::size_t total_tokens = 0;
    for (const auto& doc : docs) {
        std::vector<std::uint32_t> seq;
        for (const auto& t : doc) {
            if (auto idx = model.index(t)) {
                seq.push_back(static_cast<std::uint32_t>(*idx));
            }
        }
        total_tokens += seq.size();
        sequences.push_back(std::move(seq));
    }
    if (total_tokens < config.window || model.terms.empty()) {
        throw Error("word2vec corpus has " + std::to_string(total_tokens) +
                    " in-vocabulary tokens, fewer than the window " +
                    std::to_string(config.window));
    }

    const std::size_t v = model.terms.size();
    const std::size_t d = config.dim;
    Rng rng(config.seed);
    model.input.resize(v * d);
    for (double& x : model.input) {
        x = (rng.uniform() - 0.5) / static_cast<double>(d);
    }
    model.output.assign(v * d, 0.0);
    if (config.epochs == 0) {
        return model;
    }

    std::vector<double> noise_weights(v);
    for (std::size_t i = 0; i < v; ++i) {
        noise_weights[i] = std::pow(static_cast<double>(model.counts[i]), 0.75);
    }
    DiscreteSampler noise(noise_weights);

    const double start_lr = config.learning_rate;
    const double floor_lr = start_lr * 1e-4;
    const double planned = static_cast<double>(config.epochs * total_tokens) + 1.0;
    std::size_t processed = 0;

    std::vector<double> hidden(d);
    std::vector<double> grad(d);

    // One positive target plus negatives against hidden vector h; accumulates
    // the gradient for h in grad and returns the loss.
    auto train_target = [&](std::uint32_t target, double lr) {
        double loss = 0.0;
        for (std::size_t s = 0; s <= config.negatives; ++s) {
            std::uint32_t word = target;
            double label = 1.0;
            if (s > 0) {
                word = static_cast<std::uint32_t>(noise(rng));
                if (word == target) {
                    continue;
                }
                label = 0.0;
            }
            double* out = model.output.data() + static_cast<std::size_t>(word) * d;
            double f = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                f += hidden[j] * out[j];
            }
            loss += label > 0.0 ? neg_log_sigmoid(f) : neg_log_sigmoid(-f);
            double g = (label - sigmoid(f)) * lr;
            for (std::size_t j = 0; j < d; ++j) {
                grad[j] += g * out[j];
                out[j] += g * hidden[j];
            }
        }
        return loss;
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        std::size_t examples = 0;
        for (const auto& seq : sequences) {
            for (std::size_t pos = 0; pos < seq.size(); ++pos) {
                double lr = std::max(floor_lr, start_lr * (1.0 - static_cast<double>(processed) / planned));
                ++processed;
                std::size_t lo = pos >= config.window ? pos - config.window : 0;
                std::size_t hi = std::min(seq.size(), pos + config.window + 1);
                if (hi - lo <= 1) {
                    continue;
                }
                if (config.mode == Word2VecMode::cbow) {
                    std::fill(hidden.begin(), hidden.end(), 0.0);
                    std::fill(grad.begin(), grad.end(), 0.0);
                    double n_ctx = 0.0;
                    for (std::size_t c = lo; c < hi; ++c) {
                        if (c == pos) {
                            continue;
                        }
                        const double* in = model.input.data() + static_cast<std::size_t>(seq[c]) * d;
                        for (std::size_t j = 0; j < d; ++j) {
                            hidden[j] += in[j];
                        }
                        n_ctx += 1.0;
                    }
                    for (double& h : hidden) {
                        h /= n_ctx;
                    }
                    epoch_loss += train_target(seq[pos], lr);
                    ++examples;
                    for (std::size_t c = lo; c < hi; ++c) {
                        if (c == pos) {
                            continue;
                        }
                        double* in = model.input.data() + static_cast<std::size_t>(seq[c]) * d;
                        for (std::size_t j = 0; j < d; ++j) {
                            in[j] += grad[j];
                        }
                    }
                } else {
                    double* in = model.input.data() + static_cast<std::size_t>(seq[pos]) * d;
                    for (std::size_t c = lo; c < hi; ++c) {
                        if (c == pos) {
                            continue;
                        }
                        std::copy(in, in + d, hidden.begin());
                        std::fill(grad.begin(), grad.end(), 0.0);
                        epoch_loss += train_target(seq[c], lr);
                        ++examples;
                        for (std::size_t j = 0; j < d; ++j) {
                            in[j] += grad[j];
                        }
                    }
                }
            }
        }
        model.epoch_loss.push_back(examples > 0 ? epoch_loss / static_cast<double>(examples) : 0.0);
    }
    if (!all_finite(model.input) || !all_finite(model.output)) {
        throw Error("word2vec training diverged; lower the learning rate");
    }
    return model;
}

std::vector<double> doc_vector(std::span<const std::string> tokens, const Word2VecModel& model) {
    std::vector<double> out(model.dim(), 0.0);
    std::size_t n = 0;
    for (const std::string& t : tokens) {
        if (auto idx = model.index(t)) {
            auto v = model.vector(*idx);
            for (std::size_t j = 0; j < out.size(); ++j) {
                out[j] += v[j];
            }
            ++n;
        }
    }
    if (n > 0) {
        for (double& x : out) {
            x /= static_cast<double>(n);
        }
    }
    return out;
}

FeatureMatrix doc_vectors(const TokenDocs& docs, std::vector<std::string> docnos,
                          const Word2VecModel& model) {
    if (docs.size() != docnos.size()) {
        throw Error("doc_vectors: token documents and docnos differ in length");
    }
    std::vector<double> values;
    values.reserve(docs.size() * model.dim());
    for (const auto& doc : docs) {
        auto v = doc_vector(doc, model);
        values.insert(values.end(), v.begin(), v.end());
    }
    return FeatureMatrix::dense(std::move(docnos), model.dim(), std::move(values));
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error("cosine of vectors with different lengths");
    }
    double ab = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) {
        return 0.0;
    }
    return ab / std::sqrt(aa * bb);
}

}  // namespace riskrank
