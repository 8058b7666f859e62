#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mba/bandit.hpp"
#include "mba/core.hpp"
#include "mba/env.hpp"
#include "mba/featurize.hpp"
#include "mba/metrics.hpp"
#include "mba/reward.hpp"

namespace mba {

// -- label derivation ------------------------------------------------------

/// Cheapest correct arm (fewest stored steps, lowest index on ties). With no
/// correct arm, the most expensive arm (most steps, highest index on ties).
ArmId derive_single_label(const ReplayDataset& dataset, const std::string& query_id);

/// Every arm whose stored outcome is correct, in index order.
std::vector<ArmId> derive_multi_labels(const ReplayDataset& dataset, const std::string& query_id);

// -- classifiers -----------------------------------------------------------

enum class ClassifierMode { single_label, multi_label };

struct ClassifierConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Softmax regression (single-label) or one logistic unit per arm
/// (multi-label) over the same linear parameterization.
struct ClassifierModel {
    ClassifierMode mode = ClassifierMode::single_label;
    std::size_t arm_count = 0;
    std::size_t dim = 0;
    std::vector<double> weights;  // row-major arm_count x dim
    std::vector<double> biases;

    std::vector<double> logits(const FeatureVector& x) const;
    /// Softmax probabilities or per-arm sigmoids, depending on mode.
    std::vector<double> probabilities(const FeatureVector& x) const;

    friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

/// Labelled training example, exposed so tests and tools can inspect what
/// the classifier was fit on.
struct ClassifierExample {
    FeatureVector x;
    std::vector<double> target;  // one-hot or multi-hot over arms
};

std::vector<ClassifierExample> classifier_examples(const ReplayDataset& dataset,
                                                   const Featurizer& featurizer,
                                                   ClassifierMode mode);

/// Mini-batch SGD, deterministic in config.seed. Throws EmptyInputError
/// when label derivation leaves no training queries.
ClassifierModel train_classifier(const ReplayDataset& dataset, const Featurizer& featurizer,
                                 ClassifierMode mode, const ClassifierConfig& config);

/// Fits directly on prepared examples.
ClassifierModel fit_classifier(const std::vector<ClassifierExample>& examples,
                               std::size_t arm_count, ClassifierMode mode,
                               const ClassifierConfig& config);

std::size_t predict_arm(const ClassifierModel& model, const FeatureVector& x);

// -- policies --------------------------------------------------------------

/// A policy scores every arm for a dataset query; its choice is the argmax
/// (lowest index on ties).
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual ActionScores scores(const ReplayDataset& dataset, std::size_t pos,
                                const FeatureVector& x) const = 0;

    std::size_t choose(const ReplayDataset& dataset, std::size_t pos,
                       const FeatureVector& x) const;
};

/// Always the same arm; scores are one-hot.
std::unique_ptr<Policy> fixed_policy(const ArmId& arm);
/// Scores are the stored rewards, so the choice is oracle_best_arm.
std::unique_ptr<Policy> oracle_policy(RewardScheme scheme,
                                      FailureMode mode = FailureMode::chosen_arm);
/// Greedy rollout of a trained bandit.
std::unique_ptr<Policy> bandit_policy(PolicyModel model);
std::unique_ptr<Policy> classifier_policy(ClassifierModel model, std::string name);

struct PolicyEvaluation {
    std::string policy;
    EvalReport report;
    double regret = 0.0;
    std::vector<EpisodeRecord> episodes;
};

/// Runs the policy once over every dataset query, in dataset order.
PolicyEvaluation evaluate_policy(const Policy& policy, const ReplayDataset& dataset,
                                 const Featurizer& featurizer, const RewardScheme& scheme,
                                 FailureMode mode = FailureMode::chosen_arm);

}  // namespace mba
