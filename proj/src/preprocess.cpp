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

#include "riskrank/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>

#include <zlib.h>

#include "text_util.hpp"

namespace riskrank {

using detail::is_space;

namespace {

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Bytes of multi-byte UTF-8 sequences are treated as letters.
bool is_word_char(char c) {
    return is_ascii_alnum(c) || c == '\'' || static_cast<unsigned char>(c) >= 0x80;
}

bool starts_url(std::string_view s, std::size_t i) {
    auto has = [&](std::string_view prefix) {
        if (s.size() - i < prefix.size()) {
            return false;
        }
        for (std::size_t k = 0; k < prefix.size(); ++k) {
            char c = s[i + k];
            if (c >= 'A' && c <= 'Z') {
                c = static_cast<char>(c - 'A' + 'a');
            }
            if (c != prefix[k]) {
                return false;
            }
        }
        return true;
    };
    return has("http://") || has("https://");
}

}  // namespace

std::string clean_text(std::string_view text) {
    // URLs run from the scheme to the next whitespace.
    std::string no_urls;
    no_urls.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (starts_url(text, i)) {
            while (i < text.size() && !is_space(text[i])) {
                ++i;
            }
            continue;
        }
        no_urls += text[i++];
    }

    std::string out;
    out.reserve(no_urls.size());
    for (std::string_view token : detail::split_whitespace(no_urls)) {
        if (token.front() == '#') {
            continue;
        }
        std::string kept;
        for (char c : token) {
            if (is_word_char(c)) {
                kept += c;
            }
        }
        if (kept.empty()) {
            continue;
        }
        if (!out.empty()) {
            out += ' ';
        }
        out += kept;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_word_char(c)) {
            current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

Stoplist load_stoplist(std::istream& in) {
    Stoplist words;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::string_view word = detail::trim(line);
        if (!word.empty()) {
            words.emplace(word);
        }
    }
    return words;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open stopword file " + path.string());
    }
    return load_stoplist(in);
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const Stoplist& stoplist) {
    std::erase_if(tokens, [&](const std::string& t) { return stoplist.contains(t); });
    return tokens;
}

double compression_ratio(std::string_view text, int level) {
    if (text.empty()) {
        throw Error("compression ratio is undefined for empty text");
    }
    z_stream stream{};
    // windowBits 15 + 16 selects the gzip wrapper.
    if (deflateInit2(&stream, level, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error("deflateInit2 failed");
    }
    std::vector<unsigned char> out(deflateBound(&stream, static_cast<uLong>(text.size())) + 32);
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(text.data()));
    stream.avail_in = static_cast<uInt>(text.size());
    stream.next_out = out.data();
    stream.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&stream, Z_FINISH);
    std::size_t compressed = stream.total_out;
    deflateEnd(&stream);
    if (rc != Z_STREAM_END) {
        throw Error("deflate did not finish");
    }
    return static_cast<double>(compressed) / static_cast<double>(text.size());
}

void FilterConfig::validate() const {
    if (!(ratio_min > 0.0) || !(ratio_min < ratio_max)) {
        throw Error("filter config requires 0 < ratio_min < ratio_max");
    }
    if (!(prefilter_threshold >= 0.0 && prefilter_threshold <= 1.0)) {
        throw Error("prefilter_threshold must lie in [0, 1]");
    }
}

std::vector<Document> filter_documents(std::span<const Document> docs,
                                       std::span<const double> ratios,
                                       const std::unordered_map<std::string, double>& prefilter_scores,
                                       const FilterConfig& cfg, bool use_context) {
    cfg.validate();
    if (ratios.size() != docs.size()) {
        throw Error("filter_documents: ratios and documents differ in length");
    }
    std::vector<Document> kept;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const Document& doc = docs[i];
        double ratio = ratios[i];
        if (!(ratio >= cfg.ratio_min && ratio <= cfg.ratio_max)) {
            continue;
        }
        if (tokenize(clean_text(doc.content(use_context))).size() < cfg.min_tokens) {
            continue;
        }
        auto it = prefilter_scores.find(doc.docno);
        double score = it == prefilter_scores.end() ? 0.0 : it->second;
        if (score < cfg.prefilter_threshold) {
            continue;
        }
        kept.push_back(doc);
    }
    return kept;
}

std::vector<Document> filter_documents(std::span<const Document> docs,
                                       const std::unordered_map<std::string, double>& prefilter_scores,
                                       const FilterConfig& cfg, bool use_context) {
    std::vector<double> ratios;
    ratios.reserve(docs.size());
    for (const Document& doc : docs) {
        std::string content = doc.content(use_context);
        // NaN never passes the bounds check.
        ratios.push_back(content.empty() ? std::nan("") : compression_ratio(content));
    }
    return filter_documents(docs, ratios, prefilter_scores, cfg, use_context);
}

std::vector<std::string> TextPipeline::operator()(std::string_view text) const {
    std::vector<std::string> tokens = clean ? tokenize(clean_text(text)) : tokenize(text);
    if (stopwords != nullptr) {
        tokens = remove_stopwords(std::move(tokens), *stopwords);
    }
    if (stem) {
        for (std::string& t : tokens) {
            t = riskrank::stem(t);
        }
    }
    return tokens;
}

std::string Chunk::id() const {
    return user_id + "#" + std::to_string(index);
}

std::vector<Chunk> chunk_user_history(const UserHistory& history, std::size_t n,
                                      const TextPipeline& pipeline) {
    if (n == 0) {
        throw Error("chunk size must be at least 1");
    }
    std::vector<std::size_t> order(history.posts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return history.posts[a].timestamp < history.posts[b].timestamp;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (history.posts[order[i]].timestamp == history.posts[order[i - 1]].timestamp) {
            throw Error("user " + history.user_id + " has two posts with timestamp " +
                        std::to_string(history.posts[order[i]].timestamp));
        }
    }

    std::vector<Chunk> chunks;
    Chunk current{history.user_id, 0, {}};
    current.tokens.reserve(n);
    for (std::size_t idx : order) {
        for (std::string& token : pipeline(history.posts[idx].text)) {
            current.tokens.push_back(std::move(token));
            if (current.tokens.size() == n) {
                std::size_t next_index = current.index + 1;
                chunks.push_back(std::move(current));
                current = Chunk{history.user_id, next_index, {}};
                current.tokens.reserve(n);
            }
        }
    }
    if (!current.tokens.empty()) {
        chunks.push_back(std::move(current));
    }
    if (chunks.empty()) {
        throw Error("user " + history.user_id + " has no tokens to chunk");
    }
    return chunks;
}

}  // namespace riskrank
