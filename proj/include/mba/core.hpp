#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mba {

/// One routing strategy. `index` is dense within its ArmSet.
struct ArmId {
    std::size_t index = 0;
    std::string name;

    friend bool operator==(const ArmId&, const ArmId&) = default;
};

/// Ordered, non-empty list of uniquely named arms.
class ArmSet {
public:
    explicit ArmSet(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    ArmId at(std::size_t index) const;
    std::optional<ArmId> find(std::string_view name) const;
    /// Like find(), but throws ConfigError naming the arm.
    ArmId by_name(std::string_view name) const;
    const std::vector<std::string>& names() const noexcept { return names_; }

    friend bool operator==(const ArmSet&, const ArmSet&) = default;

private:
    std::vector<std::string> names_;
};

/// zero@0, one@1, multiple@2.
ArmSet default_arm_set();

inline constexpr std::string_view kArmZero = "zero";
inline constexpr std::string_view kArmOne = "one";
inline constexpr std::string_view kArmMultiple = "multiple";

/// Dense, finite, non-empty real vector.
class FeatureVector {
public:
    FeatureVector() = default;
    explicit FeatureVector(std::vector<double> values);
    static FeatureVector zeros(std::size_t dim);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::vector<double> values_;
};

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> class_label;
    std::optional<FeatureVector> features;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Predicted reward per arm.
using ActionScores = std::vector<double>;

struct ArmOutcome {
    std::string answer;
    bool correct_em = false;
    int steps = 0;

    friend bool operator==(const ArmOutcome&, const ArmOutcome&) = default;
};

/// Checks step accounting for the three standard arm names
/// (zero => 0, one => 1, multiple => >= 1) and steps >= 0 for any arm.
/// Throws FormatError.
void validate_outcome(const ArmId& arm, const ArmOutcome& outcome);

struct EpisodeRecord {
    std::string query_id;
    ArmId chosen_arm;
    double reward = 0.0;
    ArmOutcome outcome;
    ActionScores scores_at_selection;
    bool explored = false;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// Index of the maximum element; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

}  // namespace mba
