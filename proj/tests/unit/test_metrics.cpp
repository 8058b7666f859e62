#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mba/errors.hpp"
#include "mba/metrics.hpp"
#include "mba/rng.hpp"

using namespace mba;

TEST_CASE("normalize_answer") {
    CHECK(normalize_answer("The Eiffel Tower!") == "eiffel tower");
    CHECK(normalize_answer("") == "");
    CHECK(normalize_answer("  A  cat,  an   owl ") == "cat owl");
    CHECK(normalize_answer("theatre") == "theatre");
    CHECK(normalize_answer("J.R.R. Tolkien") == "jrr tolkien");
}

TEST_CASE("normalize_answer is idempotent") {
    const std::string alphabet = "aAnNtThHeE .,!?'-x";
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const auto len = rng.uniform_index(16);
        for (std::size_t k = 0; k < len; ++k) {
            s += alphabet[rng.uniform_index(alphabet.size())];
        }
        const auto once = normalize_answer(s);
        REQUIRE(normalize_answer(once) == once);
    }
}

TEST_CASE("exact match") {
    CHECK(exact_match("Paris.", "paris") == 1);
    CHECK(exact_match("Paris", "London") == 0);
    for (const char* s : {"", "x", "The end.", "  spaced  out "}) {
        CHECK(exact_match(s, s) == 1);
    }
}

TEST_CASE("token F1") {
    CHECK(token_f1("cat sat on mat", "cat mat") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(token_f1("new york city", "new york city") == 1.0);
    CHECK(token_f1("alpha beta", "gamma delta") == 0.0);
    CHECK(token_f1("", "") == 1.0);
    CHECK(token_f1("", "x") == 0.0);
    CHECK(token_f1("x", "") == 0.0);
    // multiset overlap: "dog" counted once per gold occurrence
    CHECK(token_f1("dog dog cat", "dog cat cat") == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("acc_contains is directional") {
    CHECK(acc_contains("the answer is paris", "Paris") == 1);
    CHECK(acc_contains("paris", "the answer is paris") == 0);
}

TEST_CASE("metric bounds and em implies acc") {
    const std::vector<std::string> words{"a", "the", "cat", "Cat.", "mat", "on", "x", "y,"};
    Rng rng(12);
    const auto random_text = [&] {
        std::string s;
        const auto len = rng.uniform_index(6);
        for (std::size_t k = 0; k < len; ++k) {
            s += words[rng.uniform_index(words.size())] + " ";
        }
        return s;
    };
    for (int i = 0; i < 5000; ++i) {
        const auto p = random_text();
        const auto g = i % 5 == 0 ? p : random_text();
        const double f = token_f1(p, g);
        REQUIRE(f >= 0.0);
        REQUIRE(f <= 1.0);
        if (exact_match(p, g) == 1) {
            REQUIRE(acc_contains(p, g) == 1);
        }
    }
}

TEST_CASE("fixture agrees with the reference scorer") {
    std::ifstream pairs_file(std::string(MBA_FIXTURE_DIR) + "/metrics_pairs.tsv");
    std::ifstream expected_file(std::string(MBA_FIXTURE_DIR) + "/metrics_expected.json");
    REQUIRE(pairs_file);
    REQUIRE(expected_file);
    const auto expected = nlohmann::json::parse(expected_file);
    std::string line;
    std::size_t i = 0;
    while (std::getline(pairs_file, line)) {
        if (line.starts_with("#")) {
            continue;
        }
        const auto tab = line.find('\t');
        const auto pred = line.substr(0, tab);
        const auto gold = line.substr(tab + 1);
        const auto& row = expected["pairs"][i++];
        CAPTURE(pred);
        CAPTURE(gold);
        CHECK(row["pred"] == pred);
        CHECK(exact_match(pred, gold) == row["em"].get<int>());
        CHECK(acc_contains(pred, gold) == row["acc"].get<int>());
        CHECK(std::abs(token_f1(pred, gold) - row["f1"].get<double>()) <= 1e-9);
    }
    CHECK(i == 20);
}

TEST_CASE("aggregate") {
    const ArmSet arms = default_arm_set();
    std::vector<EpisodeRecord> records{
        {"a", arms.at(1), 0.9, {"paris", true, 1}, {}, false},
        {"b", arms.at(1), -1.0, {"rome", false, 1}, {}, false},
    };
    const auto report = aggregate({{&records[0], "Paris"}, {&records[1], "London"}}, 3);
    CHECK(report.n == 2);
    CHECK(report.em == 0.5);
    CHECK(report.acc == 0.5);
    CHECK(report.f1 == 0.5);
    CHECK(report.step == 1.0);
    CHECK(report.mean_reward == doctest::Approx(-0.05));
    CHECK(report.per_arm_selection_freq == std::vector<double>{0.0, 1.0, 0.0});
    CHECK_THROWS_AS(aggregate({}, 3), EmptyInputError);
}

TEST_CASE("aggregate is permutation invariant") {
    const ArmSet arms = default_arm_set();
    Rng rng(44);
    std::vector<EpisodeRecord> records;
    std::vector<std::string> golds;
    const std::vector<std::string> answers{"cat sat", "the mat", "a dog sat on mat", "bird", ""};
    for (int i = 0; i < 200; ++i) {
        const auto arm = rng.uniform_index(3);
        records.push_back({"q" + std::to_string(i), arms.at(arm), rng.uniform01(),
                           {answers[rng.uniform_index(answers.size())], false,
                            static_cast<int>(arm == 2 ? 2 + rng.uniform_index(4) : arm)},
                           {},
                           false});
        golds.push_back(answers[rng.uniform_index(answers.size())]);
    }
    std::vector<ScoredEpisode> scored;
    for (std::size_t i = 0; i < records.size(); ++i) {
        scored.push_back({&records[i], golds[i]});
    }
    const auto base = aggregate(scored, 3);
    double freq_total = 0.0;
    for (double f : base.per_arm_selection_freq) {
        freq_total += f;
    }
    CHECK(std::abs(freq_total - 1.0) <= 1e-9);
    for (int trial = 0; trial < 10; ++trial) {
        for (std::size_t i = scored.size(); i > 1; --i) {
            std::swap(scored[i - 1], scored[rng.uniform_index(i)]);
        }
        const auto shuffled = aggregate(scored, 3);
        CHECK(shuffled.em == base.em);
        CHECK(shuffled.f1 == base.f1);
        CHECK(shuffled.acc == base.acc);
        CHECK(shuffled.step == base.step);
        CHECK(shuffled.mean_reward == base.mean_reward);
        CHECK(shuffled.per_arm_selection_freq == base.per_arm_selection_freq);
    }
}
