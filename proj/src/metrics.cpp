#include "mba/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "mba/errors.hpp"

namespace mba {

namespace {

bool is_ascii_punct(unsigned char c) {
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
           (c >= 123 && c <= 126);
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && !is_space(static_cast<unsigned char>(s[j]))) {
            ++j;
        }
        if (j > i) {
            out.emplace_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

// Summing in sorted order makes the result independent of record order.
double ordered_sum(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    return total;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_ascii_punct(c)) {
            continue;
        }
        cleaned.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    }
    std::string out;
    for (const auto& token : split_ws(cleaned)) {
        if (token == "a" || token == "an" || token == "the") {
            continue;
        }
        if (!out.empty()) {
            out += ' ';
        }
        out += token;
    }
    return out;
}

int exact_match(std::string_view pred, std::string_view gold) {
    return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

double token_f1(std::string_view pred, std::string_view gold) {
    const auto p = split_ws(normalize_answer(pred));
    const auto g = split_ws(normalize_answer(gold));
    if (p.empty() && g.empty()) {
        return 1.0;
    }
    if (p.empty() || g.empty()) {
        return 0.0;
    }
    std::map<std::string_view, int> gold_counts;
    for (const auto& t : g) {
        ++gold_counts[t];
    }
    int overlap = 0;
    for (const auto& t : p) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

int acc_contains(std::string_view pred, std::string_view gold) {
    return normalize_answer(pred).find(normalize_answer(gold)) != std::string::npos ? 1 : 0;
}

EvalReport aggregate(const std::vector<ScoredEpisode>& episodes, std::size_t arm_count) {
    if (episodes.empty()) {
        throw EmptyInputError("cannot aggregate an empty set of episodes");
    }
    EvalReport report;
    report.n = episodes.size();
    report.per_arm_selection_freq.assign(arm_count, 0.0);
    std::vector<std::size_t> counts(arm_count, 0);
    std::vector<double> f1s;
    std::vector<double> rewards;
    f1s.reserve(episodes.size());
    rewards.reserve(episodes.size());
    for (const auto& [record, gold] : episodes) {
        const auto& answer = record->outcome.answer;
        report.em += exact_match(answer, gold);
        f1s.push_back(token_f1(answer, gold));
        report.acc += acc_contains(answer, gold);
        report.step += record->outcome.steps;
        rewards.push_back(record->reward);
        if (record->chosen_arm.index >= arm_count) {
            throw ConfigError("episode chose arm " + std::to_string(record->chosen_arm.index) +
                              " outside the arm set");
        }
        ++counts[record->chosen_arm.index];
    }
    report.f1 = ordered_sum(f1s);
    report.mean_reward = ordered_sum(rewards);
    const auto n = static_cast<double>(report.n);
    report.em /= n;
    report.f1 /= n;
    report.acc /= n;
    report.step /= n;
    report.mean_reward /= n;
    for (std::size_t a = 0; a < arm_count; ++a) {
        report.per_arm_selection_freq[a] = static_cast<double>(counts[a]) / n;
    }
    return report;
}

}  // namespace mba
