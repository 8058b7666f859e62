#include <doctest.h>

#include "mba/errors.hpp"
#include "mba/serialize.hpp"
#include "test_support.hpp"

using namespace mba;
using nlohmann::json;

namespace {

void check_same_dataset(const ReplayDataset& a, const ReplayDataset& b) {
    REQUIRE(a.size() == b.size());
    CHECK(a.arms() == b.arms());
    for (std::size_t pos = 0; pos < a.size(); ++pos) {
        CHECK(a.query(pos) == b.query(pos));
        CHECK(a.gold(pos) == b.gold(pos));
        for (std::size_t arm = 0; arm < a.arms().size(); ++arm) {
            CHECK(a.outcome(pos, arm) == b.outcome(pos, arm));
        }
    }
}

const char* kTinyDataset =
    R"({"kind":"query","id":"a","text":"who wrote hamlet","class":null,"gold":"shakespeare"}
{"kind":"outcome","id":"a","arm":"zero","answer":"marlowe","correct":false,"steps":0}
{"kind":"outcome","id":"a","arm":"one","answer":"shakespeare","correct":true,"steps":1}
{"kind":"outcome","id":"a","arm":"multiple","answer":"shakespeare","correct":true,"steps":3}
)";

}  // namespace

TEST_CASE("episode records round-trip through the log format") {
    Rng rng(11);
    std::vector<EpisodeRecord> history;
    for (int i = 0; i < 300; ++i) {
        EpisodeRecord r;
        r.query_id = "q" + std::to_string(rng.uniform_index(1000));
        const auto arm = rng.uniform_index(3);
        r.chosen_arm = default_arm_set().at(arm);
        r.reward = (rng.uniform01() - 0.5) * 1e3;
        r.outcome = ArmOutcome{"ans \"" + std::to_string(i) + "\"\n", rng.bernoulli(0.5),
                               static_cast<int>(arm == 0 ? 0 : arm == 1 ? 1 : 1 + rng.uniform_index(7))};
        r.scores_at_selection = {rng.uniform01() * 1e-300, -rng.uniform01(), 1.0 / 3.0};
        r.explored = rng.bernoulli(0.1);
        history.push_back(r);
    }
    const auto log = io::format_episode_log(history);
    CHECK(std::count(log.begin(), log.end(), '\n') == 300);
    CHECK(io::parse_episode_log(log) == history);
    CHECK(io::parse_episode_log("").empty());
    CHECK_THROWS_AS(io::parse_episode_log("{\"query_id\": 3}\n"), FormatError);
}

TEST_CASE("datasets round-trip byte-for-byte") {
    const auto d = generate(testing::three_class_spec(), 21, 200);
    const auto text = io::format_dataset(d);
    const auto back = io::parse_dataset(text);
    check_same_dataset(d, back);
    CHECK(io::format_dataset(back) == text);

    const auto tiny = io::parse_dataset(kTinyDataset);
    REQUIRE(tiny.size() == 1);
    CHECK(tiny.query(0).text == "who wrote hamlet");
    CHECK_FALSE(tiny.query(0).class_label.has_value());
    CHECK(tiny.outcome(0, 2).steps == 3);
    CHECK(tiny.any_arm_correct(0));
}

TEST_CASE("precomputed features survive the dataset format") {
    ReplayDataset d(default_arm_set());
    d.add(Query{"f", "t", std::string("c"), FeatureVector({0.1, -2.5e-7, 3.0})}, "g",
          {ArmOutcome{"g", true, 0}, ArmOutcome{"x", false, 1}, ArmOutcome{"g", true, 2}});
    check_same_dataset(d, io::parse_dataset(io::format_dataset(d)));
}

TEST_CASE("malformed datasets carry line numbers") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        try {
            io::parse_dataset(text);
            FAIL("expected a format error");
        } catch (const FormatError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
        }
    };
    const std::string base = kTinyDataset;
    const std::string second_query =
        R"({"kind":"query","id":"b","text":"t","class":null,"gold":"g"}
{"kind":"outcome","id":"b","arm":"zero","answer":"g","correct":true,"steps":0}
)";
    expect_error(base + second_query, "no outcome for arm 'one'");
    expect_error(base + base, "line 5");
    expect_error(base + "{\"kind\":\"banana\",\"id\":\"b\"}\n", "line 5");
    expect_error(base + "not json\n", "line 5");
    expect_error(base + "{\"kind\":\"outcome\",\"id\":\"zzz\",\"arm\":\"one\",\"answer\":\"\","
                        "\"correct\":true,\"steps\":1}\n",
                 "line 5");
    CHECK_THROWS_AS(io::parse_dataset(""), EmptyInputError);
}

TEST_CASE("reward schemes accept presets and explicit forms") {
    CHECK(io::reward_scheme_from_json("single-hop") == preset("single-hop"));
    CHECK(io::reward_scheme_from_json("multi-hop") == preset("multi-hop"));
    CHECK(io::reward_scheme_from_json("formula-default") == preset("formula-default"));
    CHECK_THROWS_AS(io::reward_scheme_from_json("nope"), ConfigError);

    const auto formula = io::reward_scheme_from_json(
        json::parse(R"({"type":"formula","lambda":0.25,"cost":[0,1,5]})"));
    CHECK(compute_reward(formula, default_arm_set().at(2), ArmOutcome{"", true, 9}) == 1.0 - 0.25 * 5);

    const auto tabular = io::reward_scheme_from_json(json::parse(
        R"({"type":"tabular","per_arm":[2,1.5,{"one_minus_steps_over":4}],"failure_penalty":-3})"));
    CHECK(compute_reward(tabular, default_arm_set().at(2), ArmOutcome{"", true, 3}) == 0.25);
    CHECK(compute_reward(tabular, default_arm_set().at(0), ArmOutcome{"", false, 0}) == -3.0);

    for (const char* name : {"single-hop", "multi-hop", "formula-default"}) {
        CHECK(io::reward_scheme_from_json(io::to_json(preset(name))) == preset(name));
    }
    CHECK(io::reward_scheme_from_json(io::to_json(formula)) == formula);
    CHECK(io::reward_scheme_from_json(io::to_json(tabular)) == tabular);
    CHECK_THROWS_AS(io::reward_scheme_from_json(json::parse(R"({"type":"tabular","per_arm":1})")),
                    ConfigError);
}

TEST_CASE("synthetic environment specs round-trip and name bad fields") {
    const auto spec = testing::three_class_spec();
    CHECK(io::synthetic_spec_from_json(io::to_json(spec)) == spec);

    auto j = io::to_json(spec);
    j["classes"][1]["weight"] = 5.0;
    try {
        io::synthetic_spec_from_json(j);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("weight") != std::string::npos);
    }
    j = io::to_json(spec);
    j["classes"][0]["per_arm"][2]["steps"] = "many";
    CHECK_THROWS_AS(io::synthetic_spec_from_json(j), ConfigError);
}

TEST_CASE("train and classifier configs") {
    const auto config = io::train_config_from_json(json::parse(
        R"({"alpha":0.01,"epsilon":0.2,"episodes":10,
            "epsilon_schedule":{"linear_decay":{"start":0.5,"end":0.05,"horizon":100}},
            "weight_init":{"uniform":0.1},"failure_mode":"all-arms"})"));
    CHECK(config.alpha == 0.01);
    CHECK(config.episodes == 10);
    CHECK(std::get<LinearDecayEpsilon>(config.epsilon_schedule).horizon == 100);
    CHECK(std::get<UniformInit>(config.weight_init).scale == 0.1);
    CHECK(config.failure_mode == FailureMode::all_arms);

    const auto defaults = io::train_config_from_json(json::object());
    CHECK(defaults.alpha == 5e-2);
    CHECK(defaults.epsilon == 0.1);
    CHECK(defaults.episodes == 5000);
    CHECK(std::holds_alternative<ZeroInit>(defaults.weight_init));
    CHECK_THROWS_AS(io::train_config_from_json(json::parse(R"({"epsilon":1.5})")), ConfigError);
    CHECK_THROWS_AS(io::train_config_from_json(json::parse(R"({"failure_mode":"sometimes"})")),
                    ConfigError);

    const auto cls = io::classifier_config_from_json(json::parse(R"({"epochs":3,"batch_size":8})"));
    CHECK(cls.epochs == 3);
    CHECK(cls.batch_size == 8);
    CHECK(cls.learning_rate == 0.1);
}

TEST_CASE("checkpoints round-trip exactly") {
    Rng rng(4);
    auto model = init_model(3, 16, UniformInit{0.5}, rng);
    io::Checkpoint c{default_arm_set().names(), model,
                     FeaturizerOptions{HashFeaturizerConfig{16, 1, false}, false}, preset("multi-hop")};
    const auto text = io::format_checkpoint(c);
    const auto back = io::parse_checkpoint(text);
    CHECK(back.arms == c.arms);
    CHECK(back.model == c.model);
    CHECK(back.featurizer.hashing == c.featurizer.hashing);
    CHECK(back.featurizer.fallback_to_hash == false);
    CHECK(back.reward_scheme == c.reward_scheme);
    CHECK(io::format_checkpoint(back) == text);

    auto j = json::parse(text);
    j["weights"].erase(0);
    CHECK_THROWS_AS(io::parse_checkpoint(j.dump()), FormatError);
    CHECK_THROWS_AS(io::parse_checkpoint("{}"), FormatError);
}

TEST_CASE("file helpers create directories") {
    const auto dir = testing::scratch_dir("serialize_files");
    const auto path = dir / "nested" / "deeper" / "x.txt";
    io::write_file(path, "hello\n");
    CHECK(io::read_file(path) == "hello\n");
    CHECK_THROWS_AS(io::read_file(dir / "absent.txt"), Error);
}
