#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mba/core.hpp"
#include "mba/env.hpp"
#include "mba/featurize.hpp"
#include "mba/reward.hpp"
#include "mba/rng.hpp"

namespace mba {

/// Per-arm linear reward predictor: score[a] = <weights[a], x> + biases[a].
class PolicyModel {
public:
    PolicyModel(std::size_t arm_count, std::size_t dim);
    PolicyModel(std::size_t arm_count, std::size_t dim, std::vector<double> weights,
                std::vector<double> biases);

    std::size_t arm_count() const noexcept { return arm_count_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> weights(std::size_t arm) const;
    std::span<double> weights(std::size_t arm);
    double bias(std::size_t arm) const { return biases_.at(arm); }
    double& bias(std::size_t arm) { return biases_.at(arm); }

    /// Row-major arm_count x dim.
    const std::vector<double>& all_weights() const noexcept { return weights_; }
    const std::vector<double>& all_biases() const noexcept { return biases_; }

    friend bool operator==(const PolicyModel&, const PolicyModel&) = default;

private:
    std::size_t arm_count_;
    std::size_t dim_;
    std::vector<double> weights_;
    std::vector<double> biases_;
};

struct ConstantEpsilon {
    friend bool operator==(const ConstantEpsilon&, const ConstantEpsilon&) = default;
};

/// Linear interpolation from start to end over `horizon` episodes, then end.
struct LinearDecayEpsilon {
    double start = 1.0;
    double end = 0.05;
    std::size_t horizon = 1000;
    friend bool operator==(const LinearDecayEpsilon&, const LinearDecayEpsilon&) = default;
};

using EpsilonSchedule = std::variant<ConstantEpsilon, LinearDecayEpsilon>;

struct ZeroInit {
    friend bool operator==(const ZeroInit&, const ZeroInit&) = default;
};

/// Weights uniform in (-scale, scale); biases start at zero.
struct UniformInit {
    double scale = 0.01;
    friend bool operator==(const UniformInit&, const UniformInit&) = default;
};

using WeightInit = std::variant<ZeroInit, UniformInit>;

struct TrainConfig {
    double alpha = 5e-2;
    double epsilon = 0.1;
    EpsilonSchedule epsilon_schedule = ConstantEpsilon{};
    std::size_t episodes = 5000;
    std::uint64_t seed = 0;
    WeightInit weight_init = ZeroInit{};
    FailureMode failure_mode = FailureMode::chosen_arm;

    void validate() const;
};

double epsilon_at(const TrainConfig& config, std::size_t episode);

PolicyModel init_model(std::size_t arm_count, std::size_t dim, const WeightInit& init, Rng& rng);

/// Throws DimensionError when x.dim() != model.dim().
ActionScores predict_scores(const PolicyModel& model, const FeatureVector& x);

struct Selection {
    std::size_t arm = 0;
    bool explored = false;
};

/// Epsilon-greedy. Always consumes one uniform draw; on exploration, a
/// second draw picks uniformly among all arms (the argmax included).
Selection select_arm(std::span<const double> scores, double epsilon, Rng& rng);

/// One SGD step on (reward - score[arm])^2. Only row `arm` and its bias
/// move. Throws NumericError, leaving the model untouched, if the step
/// would produce a non-finite parameter.
void apply_update(PolicyModel& model, const FeatureVector& x, std::size_t arm, double reward,
                  double alpha);

PolicyModel update(PolicyModel model, const FeatureVector& x, std::size_t arm, double reward,
                   double alpha);

struct TrainResult {
    PolicyModel model;
    std::vector<EpisodeRecord> history;
};

/// Sequential epsilon-greedy training. Reproducible given the environment's
/// seed and config.seed.
TrainResult train(Environment& env, const Featurizer& featurizer, const RewardScheme& scheme,
                  const TrainConfig& config);

/// Greedy choice (epsilon = 0).
std::size_t greedy_arm(const PolicyModel& model, const FeatureVector& x);

}  // namespace mba
