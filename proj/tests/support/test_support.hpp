#pragma once

// Fixtures shared by the unit and acceptance suites.

#include <filesystem>
#include <string>
#include <vector>

#include "mba/core.hpp"
#include "mba/env.hpp"

namespace mba::testing {

struct OutcomeRow {
    bool zero = false;
    bool one = false;
    bool multiple = false;
    int multiple_steps = 3;
};

/// Default-arm dataset where each row gives per-arm correctness.
inline ReplayDataset make_dataset(const std::vector<OutcomeRow>& rows) {
    ReplayDataset dataset(default_arm_set());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string id = "q" + std::to_string(i);
        const std::string gold = "gold " + id;
        const auto answer = [&](bool ok) { return ok ? gold : std::string("wrong"); };
        dataset.add(Query{id, "query " + id, std::nullopt, std::nullopt}, gold,
                    {ArmOutcome{answer(rows[i].zero), rows[i].zero, 0},
                     ArmOutcome{answer(rows[i].one), rows[i].one, 1},
                     ArmOutcome{answer(rows[i].multiple), rows[i].multiple, rows[i].multiple_steps}});
    }
    return dataset;
}

/// Three classes whose best arm under the single-hop scheme is zero, one and
/// multiple respectively, each by an expected-reward margin of at least 0.3.
inline SyntheticEnvSpec three_class_spec() {
    SyntheticEnvSpec spec;
    spec.classes = {
        ClassSpec{"simple", 0.4,
                  {ArmLaw{0.95, ConstantSteps{0}}, ArmLaw{0.30, ConstantSteps{1}},
                   ArmLaw{0.30, UniformSteps{2, 4}}}},
        ClassSpec{"moderate", 0.3,
                  {ArmLaw{0.02, ConstantSteps{0}}, ArmLaw{0.95, ConstantSteps{1}},
                   ArmLaw{0.50, UniformSteps{2, 4}}}},
        ClassSpec{"complex", 0.3,
                  {ArmLaw{0.02, ConstantSteps{0}}, ArmLaw{0.03, ConstantSteps{1}},
                   ArmLaw{0.95, UniformSteps{2, 4}}}},
    };
    return spec;
}

/// "multiple" answers 85% of queries, the cheaper arms 40%: cheap-solvable
/// (40%), multiple-only (45%) and unsolvable (15%) classes.
inline SyntheticEnvSpec multiple_skew_spec() {
    SyntheticEnvSpec spec;
    spec.classes = {
        ClassSpec{"easy", 0.40,
                  {ArmLaw{1.0, ConstantSteps{0}}, ArmLaw{1.0, ConstantSteps{1}},
                   ArmLaw{1.0, UniformSteps{2, 6}}}},
        ClassSpec{"hard", 0.45,
                  {ArmLaw{0.0, ConstantSteps{0}}, ArmLaw{0.0, ConstantSteps{1}},
                   ArmLaw{1.0, UniformSteps{2, 6}}}},
        ClassSpec{"unanswerable", 0.15,
                  {ArmLaw{0.0, ConstantSteps{0}}, ArmLaw{0.0, ConstantSteps{1}},
                   ArmLaw{0.0, UniformSteps{2, 6}}}},
    };
    return spec;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mba_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace mba::testing
