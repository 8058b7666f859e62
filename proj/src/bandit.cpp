#include "mba/bandit.hpp"

#include <algorithm>
#include <cmath>

#include "mba/errors.hpp"
#include "mba/kernels.hpp"

namespace mba {

PolicyModel::PolicyModel(std::size_t arm_count, std::size_t dim)
    : PolicyModel(arm_count, dim, std::vector<double>(arm_count * dim, 0.0),
                  std::vector<double>(arm_count, 0.0)) {}

PolicyModel::PolicyModel(std::size_t arm_count, std::size_t dim, std::vector<double> weights,
                         std::vector<double> biases)
    : arm_count_(arm_count), dim_(dim), weights_(std::move(weights)), biases_(std::move(biases)) {
    if (arm_count_ < 2) {
        throw ConfigError("policy model needs at least two arms");
    }
    if (dim_ == 0) {
        throw DimensionError("policy model dim must be positive");
    }
    if (weights_.size() != arm_count_ * dim_ || biases_.size() != arm_count_) {
        throw DimensionError("policy parameters do not match " + std::to_string(arm_count_) +
                             " arms x " + std::to_string(dim_) + " dims");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(weights_.begin(), weights_.end(), finite) ||
        !std::all_of(biases_.begin(), biases_.end(), finite)) {
        throw NumericError("policy parameters must be finite");
    }
}

std::span<const double> PolicyModel::weights(std::size_t arm) const {
    if (arm >= arm_count_) {
        throw ConfigError("arm index " + std::to_string(arm) + " out of range");
    }
    return std::span<const double>(weights_).subspan(arm * dim_, dim_);
}

std::span<double> PolicyModel::weights(std::size_t arm) {
    if (arm >= arm_count_) {
        throw ConfigError("arm index " + std::to_string(arm) + " out of range");
    }
    return std::span<double>(weights_).subspan(arm * dim_, dim_);
}

void TrainConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("train.alpha must be positive");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw ConfigError("train.epsilon must lie in [0, 1]");
    }
    if (const auto* decay = std::get_if<LinearDecayEpsilon>(&epsilon_schedule)) {
        if (!(decay->start >= 0.0 && decay->start <= 1.0 && decay->end >= 0.0 &&
              decay->end <= 1.0)) {
            throw ConfigError("train.epsilon_schedule start/end must lie in [0, 1]");
        }
    }
    if (const auto* uniform = std::get_if<UniformInit>(&weight_init)) {
        if (!(uniform->scale >= 0.0) || !std::isfinite(uniform->scale)) {
            throw ConfigError("train.weight_init scale must be non-negative");
        }
    }
}

double epsilon_at(const TrainConfig& config, std::size_t episode) {
    if (const auto* decay = std::get_if<LinearDecayEpsilon>(&config.epsilon_schedule)) {
        if (decay->horizon == 0 || episode >= decay->horizon) {
            return decay->end;
        }
        const double t = static_cast<double>(episode) / static_cast<double>(decay->horizon);
        return decay->start + (decay->end - decay->start) * t;
    }
    return config.epsilon;
}

PolicyModel init_model(std::size_t arm_count, std::size_t dim, const WeightInit& init, Rng& rng) {
    PolicyModel model(arm_count, dim);
    if (const auto* uniform = std::get_if<UniformInit>(&init)) {
        for (std::size_t a = 0; a < arm_count; ++a) {
            for (double& w : model.weights(a)) {
                w = (2.0 * rng.uniform01() - 1.0) * uniform->scale;
            }
        }
    }
    return model;
}

ActionScores predict_scores(const PolicyModel& model, const FeatureVector& x) {
    if (x.dim() != model.dim()) {
        throw DimensionError("feature dim " + std::to_string(x.dim()) + " does not match model dim " +
                             std::to_string(model.dim()));
    }
    ActionScores scores(model.arm_count());
    for (std::size_t a = 0; a < model.arm_count(); ++a) {
        scores[a] = kernels::dot(model.weights(a), x.values()) + model.bias(a);
    }
    return scores;
}

Selection select_arm(std::span<const double> scores, double epsilon, Rng& rng) {
    if (scores.empty()) {
        throw ConfigError("select_arm needs at least one score");
    }
    if (rng.uniform01() < epsilon) {
        return {rng.uniform_index(scores.size()), true};
    }
    return {argmax_lowest(scores), false};
}

void apply_update(PolicyModel& model, const FeatureVector& x, std::size_t arm, double reward,
                  double alpha) {
    if (!std::isfinite(reward)) {
        throw NumericError("reward is not finite");
    }
    const ActionScores scores = predict_scores(model, x);
    if (arm >= scores.size()) {
        throw ConfigError("arm index " + std::to_string(arm) + " out of range");
    }
    const double residual = reward - scores[arm];
    // d/dtheta (r - z)^2 = -2 (r - z) dz/dtheta, so descent adds 2*alpha*e*x.
    const double step = alpha * 2.0 * residual;
    if (!std::isfinite(step)) {
        throw NumericError("update step is not finite");
    }
    std::vector<double> row(model.weights(arm).begin(), model.weights(arm).end());
    kernels::axpy(step, x.values(), row);
    const double bias = model.bias(arm) + step;
    if (!std::isfinite(bias) ||
        !std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
        throw NumericError("update produced a non-finite parameter for arm " + std::to_string(arm));
    }
    std::copy(row.begin(), row.end(), model.weights(arm).begin());
    model.bias(arm) = bias;
}

PolicyModel update(PolicyModel model, const FeatureVector& x, std::size_t arm, double reward,
                   double alpha) {
    apply_update(model, x, arm, reward, alpha);
    return model;
}

TrainResult train(Environment& env, const Featurizer& featurizer, const RewardScheme& scheme,
                  const TrainConfig& config) {
    config.validate();
    validate(scheme);
    const ArmSet& arms = env.arms();
    Rng rng(config.seed);
    TrainResult result{init_model(arms.size(), featurizer.dim(), config.weight_init, rng), {}};
    result.history.reserve(config.episodes);

    for (std::size_t t = 0; t < config.episodes; ++t) {
        const Query& query = env.sample_query();
        const FeatureVector x = featurizer(query);
        ActionScores scores = predict_scores(result.model, x);
        const Selection choice = select_arm(scores, epsilon_at(config, t), rng);
        const ArmId arm = arms.at(choice.arm);
        ArmOutcome outcome = env.execute(query, arm);

        bool any_correct = false;
        if (config.failure_mode == FailureMode::all_arms) {
            const auto known = env.any_arm_correct(query);
            if (!known) {
                throw ConfigError("all-arms failure mode needs an environment with full outcomes");
            }
            any_correct = *known;
        }
        const double reward = compute_reward(scheme, arm, outcome, config.failure_mode, any_correct);
        apply_update(result.model, x, choice.arm, reward, config.alpha);

        result.history.push_back(EpisodeRecord{query.id, arm, reward, std::move(outcome),
                                               std::move(scores), choice.explored});
    }
    return result;
}

std::size_t greedy_arm(const PolicyModel& model, const FeatureVector& x) {
    return argmax_lowest(predict_scores(model, x));
}

}  // namespace mba
