#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mba/core.hpp"

namespace mba {

/// Lowercase, strip ASCII punctuation, drop the articles a/an/the, and
/// collapse whitespace.
std::string normalize_answer(std::string_view text);

int exact_match(std::string_view pred, std::string_view gold);
/// Token F1 with multiset overlap. Both empty -> 1, exactly one empty -> 0.
double token_f1(std::string_view pred, std::string_view gold);
/// 1 iff the normalized gold is a substring of the normalized prediction.
int acc_contains(std::string_view pred, std::string_view gold);

struct EvalReport {
    double em = 0.0;
    double f1 = 0.0;
    double acc = 0.0;
    double step = 0.0;
    double mean_reward = 0.0;
    std::size_t n = 0;
    std::vector<double> per_arm_selection_freq;
};

struct ScoredEpisode {
    const EpisodeRecord* record = nullptr;
    std::string_view gold;
};

/// Throws EmptyInputError on empty input.
EvalReport aggregate(const std::vector<ScoredEpisode>& episodes, std::size_t arm_count);

}  // namespace mba
