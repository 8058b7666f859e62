#include "mba/env.hpp"

#include <algorithm>
#include <cmath>

#include "mba/errors.hpp"

namespace mba {

namespace {

std::string field(std::size_t cls, const char* rest) {
    return "classes[" + std::to_string(cls) + "]." + rest;
}

void validate_law(const SyntheticEnvSpec& spec, std::size_t cls, std::size_t arm_index,
                  const ArmLaw& law) {
    const ArmId arm = spec.arms.at(arm_index);
    const std::string where =
        field(cls, "per_arm[") + std::to_string(arm_index) + "] (" + arm.name + ")";
    if (!(law.p_correct >= 0.0 && law.p_correct <= 1.0)) {
        throw ConfigError(where + ".p_correct must lie in [0, 1]");
    }
    int lo = 0;
    int hi = 0;
    if (const auto* c = std::get_if<ConstantSteps>(&law.steps)) {
        lo = hi = c->steps;
    } else {
        const auto& u = std::get<UniformSteps>(law.steps);
        lo = u.lo;
        hi = u.hi;
    }
    if (lo < 0 || lo > hi) {
        throw ConfigError(where + ".steps must satisfy 0 <= lo <= hi");
    }
    if (hi > spec.step_cap) {
        throw ConfigError(where + ".steps exceeds step_cap " + std::to_string(spec.step_cap));
    }
    if (arm.name == kArmZero && hi != 0) {
        throw ConfigError(where + ".steps must be 0 for arm zero");
    }
    if (arm.name == kArmOne && (lo != 1 || hi != 1)) {
        throw ConfigError(where + ".steps must be 1 for arm one");
    }
    if (arm.name == kArmMultiple && lo < 1) {
        throw ConfigError(where + ".steps must be >= 1 for arm multiple");
    }
}

int sample_steps(const StepLaw& law, Rng& rng) {
    if (const auto* c = std::get_if<ConstantSteps>(&law)) {
        return c->steps;
    }
    const auto& u = std::get<UniformSteps>(law);
    return rng.uniform_int(u.lo, u.hi);
}

}  // namespace

void SyntheticEnvSpec::validate() const {
    if (classes.empty()) {
        throw ConfigError("classes must list at least one class");
    }
    if (step_cap < 1) {
        throw ConfigError("step_cap must be >= 1");
    }
    if (!(vocab_overlap >= 0.0 && vocab_overlap < 1.0)) {
        throw ConfigError("vocab_overlap must lie in [0, 1)");
    }
    if (query_length < 1) {
        throw ConfigError("query_length must be >= 1");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& cls = classes[c];
        if (cls.name.empty()) {
            throw ConfigError(field(c, "name") + " must be non-empty");
        }
        if (!(cls.weight > 0.0) || !std::isfinite(cls.weight)) {
            throw ConfigError(field(c, "weight") + " must be positive");
        }
        total += cls.weight;
        if (cls.per_arm.size() != arms.size()) {
            throw ConfigError(field(c, "per_arm") + " has " + std::to_string(cls.per_arm.size()) +
                              " entries, expected " + std::to_string(arms.size()));
        }
        for (std::size_t a = 0; a < cls.per_arm.size(); ++a) {
            validate_law(*this, c, a, cls.per_arm[a]);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("classes[].weight (mixture weights) sum to " + std::to_string(total) +
                          ", expected 1");
    }
    const auto shared = static_cast<std::size_t>(std::floor(vocab_overlap * vocab_size));
    if (vocab_size < shared + classes.size()) {
        throw ConfigError("vocab_size too small: every class needs at least one private word");
    }
}

ReplayDataset::ReplayDataset(ArmSet arms) : arms_(std::move(arms)) {}

void ReplayDataset::add(Query query, std::string gold, std::vector<ArmOutcome> outcomes) {
    if (query.id.empty()) {
        throw FormatError("query id must be non-empty");
    }
    if (index_.contains(query.id)) {
        throw DuplicateError("duplicate query id '" + query.id + "'");
    }
    if (outcomes.size() != arms_.size()) {
        throw FormatError("query '" + query.id + "' has " + std::to_string(outcomes.size()) +
                          " outcomes, expected one per arm (" + std::to_string(arms_.size()) + ")");
    }
    for (std::size_t a = 0; a < outcomes.size(); ++a) {
        validate_outcome(arms_.at(a), outcomes[a]);
    }
    index_.emplace(query.id, queries_.size());
    queries_.push_back(std::move(query));
    gold_.push_back(std::move(gold));
    for (auto& o : outcomes) {
        outcomes_.push_back(std::move(o));
    }
}

const ArmOutcome& ReplayDataset::outcome(std::size_t pos, std::size_t arm) const {
    if (pos >= queries_.size() || arm >= arms_.size()) {
        throw LookupError("outcome (" + std::to_string(pos) + ", " + std::to_string(arm) +
                          ") out of range");
    }
    return outcomes_[pos * arms_.size() + arm];
}

std::optional<std::size_t> ReplayDataset::position(const std::string& query_id) const {
    auto it = index_.find(query_id);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t ReplayDataset::require_position(const std::string& query_id) const {
    if (auto pos = position(query_id)) {
        return *pos;
    }
    throw LookupError("unknown query id '" + query_id + "'");
}

bool ReplayDataset::any_arm_correct(std::size_t pos) const {
    for (std::size_t a = 0; a < arms_.size(); ++a) {
        if (outcome(pos, a).correct_em) {
            return true;
        }
    }
    return false;
}

ReplayDataset generate(const SyntheticEnvSpec& spec, std::uint64_t seed, std::size_t n) {
    spec.validate();
    ReplayDataset dataset(spec.arms);
    Rng rng(derive_seed(seed, 0x6E76ULL));

    const auto shared = static_cast<std::size_t>(std::floor(spec.vocab_overlap * spec.vocab_size));
    const std::size_t per_class = (spec.vocab_size - shared) / spec.classes.size();
    const std::size_t multiple = spec.arms.find(kArmMultiple).value_or(ArmId{spec.arms.size(), ""}).index;

    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform01();
        std::size_t cls = spec.classes.size() - 1;
        for (std::size_t c = 0; c < spec.classes.size(); ++c) {
            if (u < spec.classes[c].weight) {
                cls = c;
                break;
            }
            u -= spec.classes[c].weight;
        }
        const ClassSpec& class_spec = spec.classes[cls];

        Query query;
        query.id = "q" + std::to_string(i);
        query.class_label = class_spec.name;
        Rng text_rng(derive_seed(seed, i, cls));
        for (std::size_t w = 0; w < spec.query_length; ++w) {
            std::size_t word = 0;
            if (shared > 0 && text_rng.bernoulli(spec.vocab_overlap)) {
                word = text_rng.uniform_index(shared);
            } else {
                word = shared + cls * per_class + text_rng.uniform_index(per_class);
            }
            if (w > 0) {
                query.text += ' ';
            }
            query.text += 'w';
            query.text += std::to_string(word);
        }

        std::string gold = "answer " + query.id;
        std::vector<ArmOutcome> outcomes;
        outcomes.reserve(spec.arms.size());
        for (std::size_t a = 0; a < spec.arms.size(); ++a) {
            const ArmLaw& law = class_spec.per_arm[a];
            ArmOutcome outcome;
            outcome.correct_em = rng.bernoulli(law.p_correct);
            outcome.steps = sample_steps(law.steps, rng);
            if (a == multiple) {
                outcome.steps = std::min(outcome.steps, spec.step_cap);
            }
            outcome.answer = outcome.correct_em ? gold : "answer x " + query.id;
            outcomes.push_back(std::move(outcome));
        }
        dataset.add(std::move(query), std::move(gold), std::move(outcomes));
    }
    return dataset;
}

ArmOutcome execute(const ReplayDataset& dataset, const std::string& query_id, const ArmId& arm) {
    const std::size_t pos = dataset.require_position(query_id);
    if (arm.index >= dataset.arms().size()) {
        throw LookupError("arm index " + std::to_string(arm.index) + " not in dataset");
    }
    return dataset.outcome(pos, arm.index);
}

std::vector<double> arm_rewards(const ReplayDataset& dataset, std::size_t pos,
                                const RewardScheme& scheme, FailureMode mode) {
    const bool any_correct = dataset.any_arm_correct(pos);
    std::vector<double> rewards(dataset.arms().size());
    for (std::size_t a = 0; a < rewards.size(); ++a) {
        rewards[a] = compute_reward(scheme, dataset.arms().at(a), dataset.outcome(pos, a), mode,
                                    any_correct);
    }
    return rewards;
}

ArmId oracle_best_arm(const ReplayDataset& dataset, const std::string& query_id,
                      const RewardScheme& scheme, FailureMode mode) {
    const auto rewards = arm_rewards(dataset, dataset.require_position(query_id), scheme, mode);
    return dataset.arms().at(argmax_lowest(rewards));
}

Regret regret(const std::vector<EpisodeRecord>& history, const ReplayDataset& dataset,
              const RewardScheme& scheme, FailureMode mode) {
    Regret result;
    result.per_episode.reserve(history.size());
    for (const auto& record : history) {
        const std::size_t pos = dataset.require_position(record.query_id);
        if (record.chosen_arm.index >= dataset.arms().size()) {
            throw LookupError("episode for '" + record.query_id + "' chose an unknown arm");
        }
        const auto rewards = arm_rewards(dataset, pos, scheme, mode);
        const double best = rewards[argmax_lowest(rewards)];
        const double gap = best - rewards[record.chosen_arm.index];
        result.per_episode.push_back(gap);
        result.total += gap;
    }
    return result;
}

ReplayEnvironment::ReplayEnvironment(const ReplayDataset& dataset, std::uint64_t seed)
    : dataset_(&dataset), rng_(seed) {
    if (dataset.empty()) {
        throw EmptyInputError("replay environment needs at least one query");
    }
}

const Query& ReplayEnvironment::sample_query() {
    return dataset_->query(rng_.uniform_index(dataset_->size()));
}

ArmOutcome ReplayEnvironment::execute(const Query& query, const ArmId& arm) const {
    return mba::execute(*dataset_, query.id, arm);
}

std::optional<bool> ReplayEnvironment::any_arm_correct(const Query& query) const {
    return dataset_->any_arm_correct(dataset_->require_position(query.id));
}

}  // namespace mba
