#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mba/core.hpp"

namespace mba {

/// Cost C(a) equal to the retrieval steps the outcome consumed.
struct StepCost {
    friend bool operator==(const StepCost&, const StepCost&) = default;
};

/// Cost C(a) fixed per arm, indexed by arm.
struct PerArmCost {
    std::vector<double> costs;
    friend bool operator==(const PerArmCost&, const PerArmCost&) = default;
};

/// r = 1{correct} - lambda * C(a)
struct FormulaScheme {
    double lambda = 0.1;
    std::variant<StepCost, PerArmCost> cost;
    friend bool operator==(const FormulaScheme&, const FormulaScheme&) = default;
};

struct ConstantReward {
    double value = 0.0;
    friend bool operator==(const ConstantReward&, const ConstantReward&) = default;
};

/// 1 - steps / divisor
struct StepDecayReward {
    double divisor = 10.0;
    friend bool operator==(const StepDecayReward&, const StepDecayReward&) = default;
};

using RewardRule = std::variant<ConstantReward, StepDecayReward>;

/// Per-arm rule on success; failure_penalty when the arm answers wrong.
struct TabularScheme {
    std::vector<RewardRule> per_arm;
    double failure_penalty = -1.0;
    friend bool operator==(const TabularScheme&, const TabularScheme&) = default;
};

using RewardScheme = std::variant<FormulaScheme, TabularScheme>;

/// Throws ConfigError on non-finite constants, negative lambda or a
/// non-positive divisor.
void validate(const RewardScheme& scheme);

/// How a wrong answer is scored by a tabular scheme.
enum class FailureMode {
    /// failure_penalty whenever the chosen arm is wrong (the only
    /// observable condition under partial feedback).
    chosen_arm,
    /// failure_penalty only when no arm answers correctly; a wrong arm
    /// earns 0 when some other arm would have succeeded. Needs the full
    /// outcome table, so only replay data can use it.
    all_arms,
};

double evaluate_rule(const RewardRule& rule, int steps);

/// Reward for one (arm, outcome) pair. Throws ConfigError if the scheme
/// does not cover the arm.
double compute_reward(const RewardScheme& scheme, const ArmId& arm, const ArmOutcome& outcome);

/// As compute_reward, with the failure condition chosen by `mode`.
/// `any_arm_correct` is only consulted for FailureMode::all_arms.
double compute_reward(const RewardScheme& scheme, const ArmId& arm, const ArmOutcome& outcome,
                      FailureMode mode, bool any_arm_correct);

/// "single-hop", "multi-hop" or "formula-default".
RewardScheme preset(std::string_view name);

std::string describe(const RewardScheme& scheme);

}  // namespace mba
