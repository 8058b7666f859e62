#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mba/core.hpp"
#include "mba/reward.hpp"
#include "mba/rng.hpp"

namespace mba {

struct ConstantSteps {
    int steps = 0;
    friend bool operator==(const ConstantSteps&, const ConstantSteps&) = default;
};

/// Uniform integer in [lo, hi].
struct UniformSteps {
    int lo = 1;
    int hi = 1;
    friend bool operator==(const UniformSteps&, const UniformSteps&) = default;
};

using StepLaw = std::variant<ConstantSteps, UniformSteps>;

struct ArmLaw {
    double p_correct = 0.0;
    StepLaw steps;
    friend bool operator==(const ArmLaw&, const ArmLaw&) = default;
};

/// One query complexity class: its mixture weight and what each arm does.
struct ClassSpec {
    std::string name;
    double weight = 0.0;
    std::vector<ArmLaw> per_arm;
    friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

struct SyntheticEnvSpec {
    ArmSet arms = default_arm_set();
    std::vector<ClassSpec> classes;
    std::size_t vocab_size = 300;
    int step_cap = 8;
    /// Fraction of the vocabulary shared by all classes, and the chance that
    /// any single query word is drawn from that shared pool.
    double vocab_overlap = 0.2;
    std::size_t query_length = 8;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    friend bool operator==(const SyntheticEnvSpec&, const SyntheticEnvSpec&) = default;
};

/// Queries with a complete per-arm outcome table and one gold answer each.
class ReplayDataset {
public:
    explicit ReplayDataset(ArmSet arms);

    /// `outcomes` is indexed by arm. Throws DuplicateError on a repeated id
    /// and FormatError when the outcome row is incomplete or violates step
    /// accounting.
    void add(Query query, std::string gold, std::vector<ArmOutcome> outcomes);

    const ArmSet& arms() const noexcept { return arms_; }
    std::size_t size() const noexcept { return queries_.size(); }
    bool empty() const noexcept { return queries_.empty(); }

    const Query& query(std::size_t pos) const { return queries_.at(pos); }
    const std::vector<Query>& queries() const noexcept { return queries_; }
    const std::string& gold(std::size_t pos) const { return gold_.at(pos); }
    const ArmOutcome& outcome(std::size_t pos, std::size_t arm) const;

    std::optional<std::size_t> position(const std::string& query_id) const;
    /// Throws LookupError for unknown ids.
    std::size_t require_position(const std::string& query_id) const;

    bool any_arm_correct(std::size_t pos) const;

private:
    ArmSet arms_;
    std::vector<Query> queries_;
    std::vector<std::string> gold_;
    std::vector<ArmOutcome> outcomes_;  // row-major: query x arm
    std::unordered_map<std::string, std::size_t> index_;
};

/// Deterministic in (spec, seed, n).
ReplayDataset generate(const SyntheticEnvSpec& spec, std::uint64_t seed, std::size_t n);

/// Stored outcome for (query_id, arm); LookupError if absent.
ArmOutcome execute(const ReplayDataset& dataset, const std::string& query_id, const ArmId& arm);

/// Reward of every arm's stored outcome for one query.
std::vector<double> arm_rewards(const ReplayDataset& dataset, std::size_t pos,
                                const RewardScheme& scheme,
                                FailureMode mode = FailureMode::chosen_arm);

/// Reward-maximizing arm by enumeration; ties go to the lowest index.
ArmId oracle_best_arm(const ReplayDataset& dataset, const std::string& query_id,
                      const RewardScheme& scheme, FailureMode mode = FailureMode::chosen_arm);

struct Regret {
    double total = 0.0;
    std::vector<double> per_episode;
};

Regret regret(const std::vector<EpisodeRecord>& history, const ReplayDataset& dataset,
              const RewardScheme& scheme, FailureMode mode = FailureMode::chosen_arm);

/// What the learner interacts with: it draws queries and runs arms.
class Environment {
public:
    virtual ~Environment() = default;

    virtual const ArmSet& arms() const = 0;
    virtual const Query& sample_query() = 0;
    virtual ArmOutcome execute(const Query& query, const ArmId& arm) const = 0;
    /// Whether any arm answers the query; nullopt when the environment
    /// cannot know (live systems only observe the arm they run).
    virtual std::optional<bool> any_arm_correct(const Query& query) const = 0;
};

/// Replays a ReplayDataset, drawing queries uniformly with replacement.
class ReplayEnvironment final : public Environment {
public:
    ReplayEnvironment(const ReplayDataset& dataset, std::uint64_t seed);

    const ArmSet& arms() const override { return dataset_->arms(); }
    const Query& sample_query() override;
    ArmOutcome execute(const Query& query, const ArmId& arm) const override;
    std::optional<bool> any_arm_correct(const Query& query) const override;

private:
    const ReplayDataset* dataset_;
    Rng rng_;
};

}  // namespace mba
