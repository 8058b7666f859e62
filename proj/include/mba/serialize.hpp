#pragma once

// Line-oriented text formats shared with external tooling:
//   dataset      JSON Lines of {"kind":"query",...} and {"kind":"outcome",...}
//   episode log  JSON Lines, one EpisodeRecord per line
//   checkpoint   one JSON document (dim, arms, weights, biases, featurizer,
//                reward_scheme)

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mba/bandit.hpp"
#include "mba/baselines.hpp"
#include "mba/core.hpp"
#include "mba/env.hpp"
#include "mba/featurize.hpp"
#include "mba/reward.hpp"

namespace mba::io {

using nlohmann::json;

json to_json(const EpisodeRecord& record);
EpisodeRecord episode_from_json(const json& j);

std::string format_episode_log(const std::vector<EpisodeRecord>& history);
std::vector<EpisodeRecord> parse_episode_log(std::string_view content);

std::string format_dataset(const ReplayDataset& dataset);
/// Arm order is the order arms first appear among outcome rows.
ReplayDataset parse_dataset(std::string_view content);
ReplayDataset load_dataset(const std::filesystem::path& path);

json to_json(const RewardScheme& scheme);
/// Accepts a preset name string or an inline {"type": "formula"|"tabular"} object.
RewardScheme reward_scheme_from_json(const json& j);

json to_json(const FeaturizerOptions& options);
FeaturizerOptions featurizer_from_json(const json& j);

SyntheticEnvSpec synthetic_spec_from_json(const json& j);
json to_json(const SyntheticEnvSpec& spec);

TrainConfig train_config_from_json(const json& j, TrainConfig defaults = {});
ClassifierConfig classifier_config_from_json(const json& j, ClassifierConfig defaults = {});

struct Checkpoint {
    std::vector<std::string> arms;
    PolicyModel model;
    FeaturizerOptions featurizer;
    RewardScheme reward_scheme;
};

std::string format_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(std::string_view content);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace mba::io
