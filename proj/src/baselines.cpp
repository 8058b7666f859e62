#include "mba/baselines.hpp"

#include <cmath>
#include <numeric>

#include "mba/errors.hpp"
#include "mba/kernels.hpp"

namespace mba {

ArmId derive_single_label(const ReplayDataset& dataset, const std::string& query_id) {
    const std::size_t pos = dataset.require_position(query_id);
    const std::size_t arms = dataset.arms().size();
    std::optional<std::size_t> cheapest;
    std::size_t priciest = 0;
    for (std::size_t a = 0; a < arms; ++a) {
        const ArmOutcome& o = dataset.outcome(pos, a);
        if (o.correct_em && (!cheapest || o.steps < dataset.outcome(pos, *cheapest).steps)) {
            cheapest = a;
        }
        if (o.steps >= dataset.outcome(pos, priciest).steps) {
            priciest = a;
        }
    }
    return dataset.arms().at(cheapest.value_or(priciest));
}

std::vector<ArmId> derive_multi_labels(const ReplayDataset& dataset, const std::string& query_id) {
    const std::size_t pos = dataset.require_position(query_id);
    std::vector<ArmId> labels;
    for (std::size_t a = 0; a < dataset.arms().size(); ++a) {
        if (dataset.outcome(pos, a).correct_em) {
            labels.push_back(dataset.arms().at(a));
        }
    }
    return labels;
}

void ClassifierConfig::validate() const {
    if (epochs == 0) {
        throw ConfigError("classifier.epochs must be positive");
    }
    if (batch_size == 0) {
        throw ConfigError("classifier.batch_size must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("classifier.learning_rate must be positive");
    }
}

std::vector<double> ClassifierModel::logits(const FeatureVector& x) const {
    if (x.dim() != dim) {
        throw DimensionError("feature dim " + std::to_string(x.dim()) +
                             " does not match classifier dim " + std::to_string(dim));
    }
    std::vector<double> out(arm_count);
    const std::span<const double> w(weights);
    for (std::size_t a = 0; a < arm_count; ++a) {
        out[a] = kernels::dot(w.subspan(a * dim, dim), x.values()) + biases[a];
    }
    return out;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void softmax_in_place(std::vector<double>& z) {
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : z) {
        v /= total;
    }
}

}  // namespace

std::vector<double> ClassifierModel::probabilities(const FeatureVector& x) const {
    auto z = logits(x);
    if (mode == ClassifierMode::single_label) {
        softmax_in_place(z);
    } else {
        for (double& v : z) {
            v = sigmoid(v);
        }
    }
    return z;
}

std::vector<ClassifierExample> classifier_examples(const ReplayDataset& dataset,
                                                   const Featurizer& featurizer,
                                                   ClassifierMode mode) {
    std::vector<ClassifierExample> examples;
    const std::size_t arms = dataset.arms().size();
    for (const Query& query : dataset.queries()) {
        std::vector<double> target(arms, 0.0);
        if (mode == ClassifierMode::single_label) {
            target[derive_single_label(dataset, query.id).index] = 1.0;
        } else {
            const auto labels = derive_multi_labels(dataset, query.id);
            if (labels.empty()) {
                continue;  // no arm answers it: no consistent target
            }
            for (const auto& arm : labels) {
                target[arm.index] = 1.0;
            }
        }
        examples.push_back({featurizer(query), std::move(target)});
    }
    return examples;
}

ClassifierModel fit_classifier(const std::vector<ClassifierExample>& examples,
                               std::size_t arm_count, ClassifierMode mode,
                               const ClassifierConfig& config) {
    config.validate();
    if (examples.empty()) {
        throw EmptyInputError("classifier training set is empty after label derivation");
    }
    const std::size_t dim = examples.front().x.dim();
    ClassifierModel model{mode, arm_count, dim, std::vector<double>(arm_count * dim, 0.0),
                          std::vector<double>(arm_count, 0.0)};
    for (const auto& ex : examples) {
        if (ex.x.dim() != dim || ex.target.size() != arm_count) {
            throw DimensionError("classifier examples have inconsistent shapes");
        }
    }

    Rng rng(config.seed);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad_w(arm_count * dim);
    std::vector<double> grad_b(arm_count);
    const std::span<double> w(model.weights);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.uniform_index(i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            for (std::size_t k = start; k < end; ++k) {
                const auto& ex = examples[order[k]];
                // Cross-entropy with softmax or sigmoid: dL/dz = p - y.
                const auto p = model.probabilities(ex.x);
                for (std::size_t a = 0; a < arm_count; ++a) {
                    const double g = p[a] - ex.target[a];
                    kernels::axpy(g, ex.x.values(), std::span(grad_w).subspan(a * dim, dim));
                    grad_b[a] += g;
                }
            }
            const double scale = -config.learning_rate / static_cast<double>(end - start);
            kernels::axpy(scale, grad_w, w);
            kernels::axpy(scale, grad_b, model.biases);
        }
    }
    for (double v : model.weights) {
        if (!std::isfinite(v)) {
            throw NumericError("classifier training diverged");
        }
    }
    return model;
}

ClassifierModel train_classifier(const ReplayDataset& dataset, const Featurizer& featurizer,
                                 ClassifierMode mode, const ClassifierConfig& config) {
    return fit_classifier(classifier_examples(dataset, featurizer, mode), dataset.arms().size(),
                          mode, config);
}

std::size_t predict_arm(const ClassifierModel& model, const FeatureVector& x) {
    return argmax_lowest(model.probabilities(x));
}

std::size_t Policy::choose(const ReplayDataset& dataset, std::size_t pos,
                           const FeatureVector& x) const {
    return argmax_lowest(scores(dataset, pos, x));
}

namespace {

class FixedPolicy final : public Policy {
public:
    explicit FixedPolicy(ArmId arm) : arm_(std::move(arm)) {}
    std::string name() const override { return "fixed:" + arm_.name; }
    ActionScores scores(const ReplayDataset& dataset, std::size_t, const FeatureVector&) const override {
        if (arm_.index >= dataset.arms().size()) {
            throw ConfigError("fixed policy arm '" + arm_.name + "' not in dataset");
        }
        ActionScores s(dataset.arms().size(), 0.0);
        s[arm_.index] = 1.0;
        return s;
    }

private:
    ArmId arm_;
};

class OraclePolicy final : public Policy {
public:
    OraclePolicy(RewardScheme scheme, FailureMode mode) : scheme_(std::move(scheme)), mode_(mode) {}
    std::string name() const override { return "oracle"; }
    ActionScores scores(const ReplayDataset& dataset, std::size_t pos, const FeatureVector&) const override {
        return arm_rewards(dataset, pos, scheme_, mode_);
    }

private:
    RewardScheme scheme_;
    FailureMode mode_;
};

class BanditPolicy final : public Policy {
public:
    explicit BanditPolicy(PolicyModel model) : model_(std::move(model)) {}
    std::string name() const override { return "bandit"; }
    ActionScores scores(const ReplayDataset&, std::size_t, const FeatureVector& x) const override {
        return predict_scores(model_, x);
    }

private:
    PolicyModel model_;
};

class ClassifierPolicy final : public Policy {
public:
    ClassifierPolicy(ClassifierModel model, std::string name)
        : model_(std::move(model)), name_(std::move(name)) {}
    std::string name() const override { return name_; }
    ActionScores scores(const ReplayDataset&, std::size_t, const FeatureVector& x) const override {
        return model_.probabilities(x);
    }

private:
    ClassifierModel model_;
    std::string name_;
};

}  // namespace

std::unique_ptr<Policy> fixed_policy(const ArmId& arm) { return std::make_unique<FixedPolicy>(arm); }

std::unique_ptr<Policy> oracle_policy(RewardScheme scheme, FailureMode mode) {
    return std::make_unique<OraclePolicy>(std::move(scheme), mode);
}

std::unique_ptr<Policy> bandit_policy(PolicyModel model) {
    return std::make_unique<BanditPolicy>(std::move(model));
}

std::unique_ptr<Policy> classifier_policy(ClassifierModel model, std::string name) {
    return std::make_unique<ClassifierPolicy>(std::move(model), std::move(name));
}

PolicyEvaluation evaluate_policy(const Policy& policy, const ReplayDataset& dataset,
                                 const Featurizer& featurizer, const RewardScheme& scheme,
                                 FailureMode mode) {
    PolicyEvaluation result;
    result.policy = policy.name();
    result.episodes.reserve(dataset.size());
    for (std::size_t pos = 0; pos < dataset.size(); ++pos) {
        const Query& query = dataset.query(pos);
        const FeatureVector x = featurizer(query);
        ActionScores s = policy.scores(dataset, pos, x);
        const std::size_t arm = argmax_lowest(s);
        const ArmOutcome& outcome = dataset.outcome(pos, arm);
        const double reward = compute_reward(scheme, dataset.arms().at(arm), outcome, mode,
                                             dataset.any_arm_correct(pos));
        result.episodes.push_back(
            EpisodeRecord{query.id, dataset.arms().at(arm), reward, outcome, std::move(s), false});
    }
    std::vector<ScoredEpisode> scored;
    scored.reserve(result.episodes.size());
    for (std::size_t pos = 0; pos < dataset.size(); ++pos) {
        scored.push_back({&result.episodes[pos], dataset.gold(pos)});
    }
    result.report = aggregate(scored, dataset.arms().size());
    result.regret = regret(result.episodes, dataset, scheme, mode).total;
    return result;
}

}  // namespace mba
