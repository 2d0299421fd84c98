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

// Porter, "An algorithm for suffix stripping" (1980), rule for rule. No
// short-word exemption and none of the later reference-code departures.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "riskrank/preprocess.hpp"

namespace riskrank {
namespace {

bool is_vowel_letter(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// consonant[i] for every position; 'y' is a consonant unless it follows one.
std::vector<bool> consonant_flags(std::string_view w) {
    std::vector<bool> flags(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (is_vowel_letter(w[i])) {
            flags[i] = false;
        } else if (w[i] == 'y') {
            flags[i] = (i == 0) ? true : !flags[i - 1];
        } else {
            flags[i] = true;
        }
    }
    return flags;
}

bool is_consonant(std::string_view w, std::size_t i) {
    return consonant_flags(w.substr(0, i + 1))[i];
}

// m in [C](VC){m}[V].
int measure(std::string_view stem) {
    auto flags = consonant_flags(stem);
    int m = 0;
    for (std::size_t i = 1; i < flags.size(); ++i) {
        if (!flags[i - 1] && flags[i]) {
            ++m;
        }
    }
    return m;
}

bool contains_vowel(std::string_view stem) {
    for (bool c : consonant_flags(stem)) {
        if (!c) {
            return true;
        }
    }
    return false;
}

bool ends_double_consonant(std::string_view w) {
    return w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && is_consonant(w, w.size() - 1);
}

// *o: ends consonant-vowel-consonant, final consonant not w, x or y.
bool ends_cvc(std::string_view w) {
    if (w.size() < 3) {
        return false;
    }
    auto flags = consonant_flags(w);
    std::size_t n = w.size();
    char last = w[n - 1];
    return flags[n - 3] && !flags[n - 2] && flags[n - 1] && last != 'w' && last != 'x' &&
           last != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

using Condition = std::function<bool(std::string_view)>;

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
    Condition condition;  // empty: unconditional
};

// The first rule whose suffix matches decides; if its condition fails the word
// is returned unchanged.
std::string apply_rules(const std::string& word, const std::vector<Rule>& rules) {
    for (const Rule& rule : rules) {
        if (ends_with(word, rule.suffix)) {
            std::string_view stem = std::string_view(word).substr(0, word.size() - rule.suffix.size());
            if (!rule.condition || rule.condition(stem)) {
                return std::string(stem) + std::string(rule.replacement);
            }
            return word;
        }
    }
    return word;
}

bool positive_measure(std::string_view stem) {
    return measure(stem) > 0;
}

bool measure_above_one(std::string_view stem) {
    return measure(stem) > 1;
}

std::string step1a(const std::string& w) {
    static const std::vector<Rule> rules = {
        {"sses", "ss", {}}, {"ies", "i", {}}, {"ss", "ss", {}}, {"s", "", {}}};
    return apply_rules(w, rules);
}

std::string step1b(const std::string& w) {
    if (ends_with(w, "eed")) {
        std::string_view stem = std::string_view(w).substr(0, w.size() - 3);
        return measure(stem) > 0 ? std::string(stem) + "ee" : w;
    }
    std::string stem;
    bool removed = false;
    for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
        if (ends_with(w, suffix)) {
            std::string_view candidate = std::string_view(w).substr(0, w.size() - suffix.size());
            if (contains_vowel(candidate)) {
                stem = std::string(candidate);
                removed = true;
                break;
            }
        }
    }
    if (!removed) {
        return w;
    }
    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) {
        return stem + "e";
    }
    if (ends_double_consonant(stem)) {
        char last = stem.back();
        if (last != 'l' && last != 's' && last != 'z') {
            stem.pop_back();
        }
        return stem;
    }
    if (measure(stem) == 1 && ends_cvc(stem)) {
        return stem + "e";
    }
    return stem;
}

std::string step1c(const std::string& w) {
    static const std::vector<Rule> rules = {{"y", "i", contains_vowel}};
    return apply_rules(w, rules);
}

std::string step2(const std::string& w) {
    static const std::vector<Rule> rules = {
        {"ational", "ate", positive_measure}, {"tional", "tion", positive_measure},
        {"enci", "ence", positive_measure},   {"anci", "ance", positive_measure},
        {"izer", "ize", positive_measure},    {"abli", "able", positive_measure},
        {"alli", "al", positive_measure},     {"entli", "ent", positive_measure},
        {"eli", "e", positive_measure},       {"ousli", "ous", positive_measure},
        {"ization", "ize", positive_measure}, {"ation", "ate", positive_measure},
        {"ator", "ate", positive_measure},    {"alism", "al", positive_measure},
        {"iveness", "ive", positive_measure}, {"fulness", "ful", positive_measure},
        {"ousness", "ous", positive_measure}, {"aliti", "al", positive_measure},
        {"iviti", "ive", positive_measure},   {"biliti", "ble", positive_measure},
    };
    return apply_rules(w, rules);
}

std::string step3(const std::string& w) {
    static const std::vector<Rule> rules = {
        {"icate", "ic", positive_measure}, {"ative", "", positive_measure},
        {"alize", "al", positive_measure}, {"iciti", "ic", positive_measure},
        {"ical", "ic", positive_measure},  {"ful", "", positive_measure},
        {"ness", "", positive_measure},
    };
    return apply_rules(w, rules);
}

std::string step4(const std::string& w) {
    static const std::vector<Rule> rules = {
        {"al", "", measure_above_one},    {"ance", "", measure_above_one},
        {"ence", "", measure_above_one},  {"er", "", measure_above_one},
        {"ic", "", measure_above_one},    {"able", "", measure_above_one},
        {"ible", "", measure_above_one},  {"ant", "", measure_above_one},
        {"ement", "", measure_above_one}, {"ment", "", measure_above_one},
        {"ent", "", measure_above_one},
        {"ion", "",
         [](std::string_view stem) {
             return measure(stem) > 1 && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
         }},
        {"ou", "", measure_above_one},    {"ism", "", measure_above_one},
        {"ate", "", measure_above_one},   {"iti", "", measure_above_one},
        {"ous", "", measure_above_one},   {"ive", "", measure_above_one},
        {"ize", "", measure_above_one},
    };
    return apply_rules(w, rules);
}

std::string step5a(const std::string& w) {
    if (ends_with(w, "e")) {
        std::string_view stem = std::string_view(w).substr(0, w.size() - 1);
        int m = measure(stem);
        if (m > 1 || (m == 1 && !ends_cvc(stem))) {
            return std::string(stem);
        }
    }
    return w;
}

std::string step5b(const std::string& w) {
    if (ends_with(w, "ll") && measure(std::string_view(w).substr(0, w.size() - 1)) > 1) {
        return w.substr(0, w.size() - 1);
    }
    return w;
}

}  // namespace

std::string porter_stem(std::string_view word) {
    std::string w(word);
    w = step1a(w);
    w = step1b(w);
    w = step1c(w);
    w = step2(w);
    w = step3(w);
    w = step4(w);
    w = step5a(w);
    w = step5b(w);
    return w;
}

std::string stem(std::string_view word) {
    std::string current(word);
    // Fixed points are reached within a few passes; the bound only guards
    // against a cycle.
    for (std::size_t pass = 0; pass <= word.size() + 1; ++pass) {
        std::string next = porter_stem(current);
        if (next == current) {
            break;
        }
        current = std::move(next);
    }
    return current;
}

}  // namespace riskrank
