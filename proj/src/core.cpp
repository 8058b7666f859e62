#include "mba/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mba/errors.hpp"

namespace mba {

ArmSet::ArmSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) {
        throw ConfigError("arm set must contain at least one arm");
    }
    std::set<std::string_view> seen;
    for (const auto& name : names_) {
        if (name.empty()) {
            throw ConfigError("arm names must be non-empty");
        }
        if (!seen.insert(name).second) {
            throw ConfigError("duplicate arm name '" + name + "'");
        }
    }
}

ArmId ArmSet::at(std::size_t index) const {
    if (index >= names_.size()) {
        throw ConfigError("arm index " + std::to_string(index) + " out of range for " +
                          std::to_string(names_.size()) + " arms");
    }
    return ArmId{index, names_[index]};
}

std::optional<ArmId> ArmSet::find(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        return std::nullopt;
    }
    const auto index = static_cast<std::size_t>(it - names_.begin());
    return ArmId{index, names_[index]};
}

ArmId ArmSet::by_name(std::string_view name) const {
    if (auto arm = find(name)) {
        return *arm;
    }
    throw ConfigError("unknown arm '" + std::string(name) + "'");
}

ArmSet default_arm_set() {
    return ArmSet({std::string(kArmZero), std::string(kArmOne), std::string(kArmMultiple)});
}

FeatureVector::FeatureVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw DimensionError("feature vector must have positive dimension");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NumericError("feature value " + std::to_string(i) + " is not finite");
        }
    }
}

FeatureVector FeatureVector::zeros(std::size_t dim) {
    return FeatureVector(std::vector<double>(dim, 0.0));
}

void validate_outcome(const ArmId& arm, const ArmOutcome& outcome) {
    const auto fail = [&](const char* rule) {
        throw FormatError("outcome for arm '" + arm.name + "' has steps=" +
                          std::to_string(outcome.steps) + " (" + rule + ")");
    };
    if (outcome.steps < 0) {
        fail("steps must be non-negative");
    }
    if (arm.name == kArmZero && outcome.steps != 0) {
        fail("arm zero never retrieves");
    }
    if (arm.name == kArmOne && outcome.steps != 1) {
        fail("arm one retrieves exactly once");
    }
    if (arm.name == kArmMultiple && outcome.steps < 1) {
        fail("arm multiple retrieves at least once");
    }
}

std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace mba
