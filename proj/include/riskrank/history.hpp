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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace riskrank {

struct Post {
    std::int64_t timestamp = 0;
    std::string text;

    bool operator==(const Post&) const = default;
};

/// A subject's posting history. Posts need not be stored in time order;
/// consumers sort by timestamp.
struct UserHistory {
    std::string user_id;
    std::vector<Post> posts;

    bool operator==(const UserHistory&) const = default;
};

inline constexpr std::size_t kQuestionnaireItems = 22;
inline constexpr int kMaxAnswer = 6;

/// The scored EDE-Q items, in answer-vector order.
const std::vector<std::string>& default_item_ids();

struct QuestionnaireAnswers {
    std::string user_id;
    std::vector<int> answers;  // kQuestionnaireItems values in 0..kMaxAnswer

    bool operator==(const QuestionnaireAnswers&) const = default;
};

void validate(const QuestionnaireAnswers& answers);

/// Histories are stored one JSON object per line:
/// {"user_id": "...", "posts": [{"timestamp": 1, "text": "..."}, ...]}.
void write_histories(std::span<const UserHistory> histories, std::ostream& out);
std::vector<UserHistory> read_histories(std::istream& in);

/// Truth/prediction file: "<user_id> <a1> ... <a22>" per line.
void write_answers(std::span<const QuestionnaireAnswers> answers, std::ostream& out);
std::vector<QuestionnaireAnswers> read_answers(std::istream& in);

}  // namespace riskrank
