#include "mba/reward.hpp"

#include <cmath>
#include <sstream>

#include "mba/errors.hpp"

namespace mba {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) {
        throw ConfigError(what + " must be finite");
    }
}

}  // namespace

void validate(const RewardScheme& scheme) {
    std::visit(overloaded{
                   [](const FormulaScheme& f) {
                       require_finite(f.lambda, "reward.lambda");
                       if (f.lambda < 0.0) {
                           throw ConfigError("reward.lambda must be non-negative");
                       }
                       if (const auto* per_arm = std::get_if<PerArmCost>(&f.cost)) {
                           for (double c : per_arm->costs) {
                               require_finite(c, "reward.cost");
                           }
                       }
                   },
                   [](const TabularScheme& t) {
                       require_finite(t.failure_penalty, "reward.failure_penalty");
                       if (t.per_arm.empty()) {
                           throw ConfigError("reward.per_arm must list at least one arm");
                       }
                       for (const auto& rule : t.per_arm) {
                           std::visit(overloaded{
                                          [](const ConstantReward& c) {
                                              require_finite(c.value, "reward.per_arm value");
                                          },
                                          [](const StepDecayReward& d) {
                                              require_finite(d.divisor, "reward.per_arm divisor");
                                              if (d.divisor <= 0.0) {
                                                  throw ConfigError(
                                                      "reward.per_arm divisor must be positive");
                                              }
                                          },
                                      },
                                      rule);
                       }
                   },
               },
               scheme);
}

double evaluate_rule(const RewardRule& rule, int steps) {
    return std::visit(overloaded{
                          [](const ConstantReward& c) { return c.value; },
                          // (d - s) / d rather than 1 - s / d: one rounding, so
                          // integral steps land on the nearest double to the
                          // decimal value (0.3, not 0.30000000000000004).
                          [steps](const StepDecayReward& d) {
                              return (d.divisor - static_cast<double>(steps)) / d.divisor;
                          },
                      },
                      rule);
}

double compute_reward(const RewardScheme& scheme, const ArmId& arm, const ArmOutcome& outcome) {
    return compute_reward(scheme, arm, outcome, FailureMode::chosen_arm, false);
}

double compute_reward(const RewardScheme& scheme, const ArmId& arm, const ArmOutcome& outcome,
                      FailureMode mode, bool any_arm_correct) {
    const auto out_of_range = [&](std::size_t covered) {
        return ConfigError("reward scheme covers " + std::to_string(covered) +
                           " arms but arm '" + arm.name + "' has index " +
                           std::to_string(arm.index));
    };
    return std::visit(
        overloaded{
            [&](const FormulaScheme& f) {
                const double quality = outcome.correct_em ? 1.0 : 0.0;
                const double cost = std::visit(
                    overloaded{
                        [&](const StepCost&) { return static_cast<double>(outcome.steps); },
                        [&](const PerArmCost& c) {
                            if (arm.index >= c.costs.size()) {
                                throw out_of_range(c.costs.size());
                            }
                            return c.costs[arm.index];
                        },
                    },
                    f.cost);
                return quality - f.lambda * cost;
            },
            [&](const TabularScheme& t) {
                if (arm.index >= t.per_arm.size()) {
                    throw out_of_range(t.per_arm.size());
                }
                if (outcome.correct_em) {
                    return evaluate_rule(t.per_arm[arm.index], outcome.steps);
                }
                if (mode == FailureMode::all_arms && any_arm_correct) {
                    return 0.0;
                }
                return t.failure_penalty;
            },
        },
        scheme);
}

RewardScheme preset(std::string_view name) {
    if (name == "single-hop") {
        return TabularScheme{{ConstantReward{1.0}, ConstantReward{0.9}, StepDecayReward{10.0}},
                             -1.0};
    }
    if (name == "multi-hop") {
        return TabularScheme{{ConstantReward{4.3}, ConstantReward{2.3}, ConstantReward{1.15}},
                             -1.0};
    }
    if (name == "formula-default") {
        return FormulaScheme{0.1, StepCost{}};
    }
    throw ConfigError("unknown reward preset '" + std::string(name) +
                      "' (expected single-hop, multi-hop or formula-default)");
}

std::string describe(const RewardScheme& scheme) {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const FormulaScheme& f) {
                       out << "formula(lambda=" << f.lambda << ", cost="
                           << (std::holds_alternative<StepCost>(f.cost) ? "steps" : "per-arm")
                           << ")";
                   },
                   [&](const TabularScheme& t) {
                       out << "tabular(";
                       for (std::size_t i = 0; i < t.per_arm.size(); ++i) {
                           if (i > 0) {
                               out << ", ";
                           }
                           std::visit(overloaded{
                                          [&](const ConstantReward& c) { out << c.value; },
                                          [&](const StepDecayReward& d) {
                                              out << "1-steps/" << d.divisor;
                                          },
                                      },
                                      t.per_arm[i]);
                       }
                       out << "; failure=" << t.failure_penalty << ")";
                   },
               },
               scheme);
    return out.str();
}

}  // namespace mba
