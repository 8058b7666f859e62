#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mba/bandit.hpp"
#include "mba/baselines.hpp"
#include "mba/env.hpp"
#include "mba/featurize.hpp"
#include "mba/reward.hpp"

namespace mba::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFormat = 3;
inline constexpr int kExitNumeric = 4;

// Sub-seeds are fixed offsets from the global seed so one subsystem's
// randomness can change without disturbing the others.
inline constexpr std::uint64_t kEnvSeedOffset = 1;
inline constexpr std::uint64_t kHoldoutSeedOffset = 2;
inline constexpr std::uint64_t kPolicySeedOffset = 3;
inline constexpr std::uint64_t kSamplerSeedOffset = 4;
inline constexpr std::uint64_t kClassifierSeedOffset = 5;

struct SyntheticSource {
    SyntheticEnvSpec spec;
    std::size_t n = 2000;
    /// Size of the held-out evaluation set; 0 evaluates on the training set.
    std::size_t holdout_n = 0;
};

struct ReplaySource {
    std::filesystem::path train;
    std::optional<std::filesystem::path> eval;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::variant<SyntheticSource, ReplaySource> environment;
    FeaturizerOptions featurizer;
    std::optional<std::filesystem::path> embeddings;
    RewardScheme reward;
    TrainConfig train;
    ClassifierConfig classifier;
    std::vector<std::string> policies;
    std::filesystem::path out_dir = "out";

    std::uint64_t env_seed() const { return seed + kEnvSeedOffset; }
    std::uint64_t holdout_seed() const { return seed + kHoldoutSeedOffset; }
    std::uint64_t sampler_seed() const { return seed + kSamplerSeedOffset; }
};

/// Parses a run config. Relative paths resolve against `base_dir`.
/// `seed_override` replaces the config's seed; without either the load
/// fails, since runs are never seeded from the clock.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           std::optional<std::uint64_t> seed_override);
RunConfig load_run_config(const std::filesystem::path& path,
                          std::optional<std::uint64_t> seed_override);

struct Datasets {
    ReplayDataset train;
    ReplayDataset eval;
};

Datasets build_datasets(const RunConfig& config);
Featurizer build_featurizer(const RunConfig& config);

/// Fraction of the final `window` episodes whose greedy choice (argmax of
/// the recorded scores) equals the oracle arm.
double final_window_optimal_rate(const std::vector<EpisodeRecord>& history,
                                 const ReplayDataset& dataset, const RewardScheme& scheme,
                                 std::size_t window = 500);

/// Builds and evaluates every configured policy on `eval`, training the
/// learned ones on `train`.
std::vector<PolicyEvaluation> compare_policies(const RunConfig& config, const Datasets& data);

std::string format_report(const PolicyEvaluation& evaluation, const ArmSet& arms);
std::string format_comparison(const std::vector<PolicyEvaluation>& rows, const ArmSet& arms);

/// Entry point shared by the `mba` binary and the tests. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mba::cli
