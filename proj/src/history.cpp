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

#include "riskrank/history.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "riskrank/common.hpp"
#include "text_util.hpp"

namespace riskrank {

const std::vector<std::string>& default_item_ids() {
    static const std::vector<std::string> ids = {"1",  "2",  "3",  "4",  "5",  "6",  "7",  "8",
                                                 "9",  "10", "11", "12", "19", "20", "21", "22",
                                                 "23", "24", "25", "26", "27", "28"};
    return ids;
}

void validate(const QuestionnaireAnswers& answers) {
    if (answers.user_id.empty()) {
        throw Error("questionnaire answers with empty user id");
    }
    if (answers.answers.size() != kQuestionnaireItems) {
        throw Error("user " + answers.user_id + " has " + std::to_string(answers.answers.size()) +
                    " answers, expected " + std::to_string(kQuestionnaireItems));
    }
    for (int a : answers.answers) {
        if (a < 0 || a > kMaxAnswer) {
            throw Error("user " + answers.user_id + " has answer " + std::to_string(a) +
                        " outside 0.." + std::to_string(kMaxAnswer));
        }
    }
}

void write_histories(std::span<const UserHistory> histories, std::ostream& out) {
    for (const UserHistory& h : histories) {
        nlohmann::ordered_json record;
        record["user_id"] = h.user_id;
        auto posts = nlohmann::ordered_json::array();
        for (const Post& p : h.posts) {
            nlohmann::ordered_json post;
            post["timestamp"] = p.timestamp;
            post["text"] = p.text;
            posts.push_back(std::move(post));
        }
        record["posts"] = std::move(posts);
        out << record.dump() << '\n';
    }
    if (!out) {
        throw Error("failed to write histories");
    }
}

std::vector<UserHistory> read_histories(std::istream& in) {
    std::vector<UserHistory> histories;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        UserHistory h;
        try {
            auto record = nlohmann::json::parse(line);
            h.user_id = record.at("user_id").get<std::string>();
            for (const auto& post : record.at("posts")) {
                h.posts.push_back(
                    {post.at("timestamp").get<std::int64_t>(), post.at("text").get<std::string>()});
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("histories line " + std::to_string(line_no) + ": " + e.what(),
                             line_no);
        }
        if (h.user_id.empty() || !seen.insert(h.user_id).second) {
            throw ParseError("histories line " + std::to_string(line_no) +
                                 ": empty or duplicate user id '" + h.user_id + "'",
                             line_no);
        }
        histories.push_back(std::move(h));
    }
    return histories;
}

void write_answers(std::span<const QuestionnaireAnswers> answers, std::ostream& out) {
    for (const QuestionnaireAnswers& a : answers) {
        validate(a);
        out << a.user_id;
        for (int v : a.answers) {
            out << ' ' << v;
        }
        out << '\n';
    }
    if (!out) {
        throw Error("failed to write answers");
    }
}

std::vector<QuestionnaireAnswers> read_answers(std::istream& in) {
    std::vector<QuestionnaireAnswers> all;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        auto fail = [line_no](const std::string& why) {
            throw ParseError("answers line " + std::to_string(line_no) + ": " + why, line_no);
        };
        if (fields.size() != kQuestionnaireItems + 1) {
            fail("expected user id plus " + std::to_string(kQuestionnaireItems) + " answers, found " +
                 std::to_string(fields.size()) + " fields");
        }
        QuestionnaireAnswers a;
        a.user_id = fields[0];
        for (std::size_t i = 1; i < fields.size(); ++i) {
            int v = 0;
            auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
            if (ec != std::errc() || ptr != fields[i].data() + fields[i].size()) {
                fail("answer '" + std::string(fields[i]) + "' is not an integer");
            }
            a.answers.push_back(v);
        }
        try {
            validate(a);
        } catch (const Error& e) {
            fail(e.what());
        }
        if (!seen.insert(a.user_id).second) {
            fail("duplicate user " + a.user_id);
        }
        all.push_back(std::move(a));
    }
    return all;
}

}  // namespace riskrank
