#include <doctest.h>

#include <sstream>

#include "mba/cli.hpp"
#include "mba/errors.hpp"
#include "mba/serialize.hpp"
#include "test_support.hpp"

using namespace mba;
using nlohmann::json;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "mba");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json small_config(std::size_t n = 300, std::size_t episodes = 600) {
    json j;
    j["seed"] = 42;
    j["environment"]["synthetic"] = io::to_json(testing::three_class_spec());
    j["environment"]["synthetic"]["n"] = n;
    j["environment"]["synthetic"]["holdout_n"] = 100;
    j["featurizer"] = {{"dim", 64}, {"ngram_max", 1}};
    j["reward"] = "single-hop";
    j["train"] = {{"episodes", episodes}, {"epsilon", 0.1}, {"alpha", 0.05}};
    j["classifier"] = {{"epochs", 5}};
    return j;
}

std::filesystem::path write_config(const std::string& name, const json& j) {
    const auto dir = testing::scratch_dir(name);
    io::write_file(dir / "config.json", j.dump(2));
    return dir;
}

}  // namespace

TEST_CASE("simulate writes one query record and one outcome row per arm") {
    const auto dir = write_config("cli_simulate", small_config(500));
    const auto cfg = (dir / "config.json").string();
    const auto first = invoke({"--config", cfg, "--out", (dir / "a").string(), "simulate"});
    REQUIRE_MESSAGE(first.code == 0, first.err);
    const auto text = io::read_file(dir / "a" / "dataset.jsonl");
    std::size_t queries = 0;
    std::size_t outcomes = 0;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        const auto j = json::parse(line);
        queries += j.at("kind") == "query" ? 1 : 0;
        outcomes += j.at("kind") == "outcome" ? 1 : 0;
    }
    CHECK(queries == 500);
    CHECK(outcomes == 1500);
    CHECK(io::load_dataset(dir / "a" / "holdout.jsonl").size() == 100);

    REQUIRE(invoke({"--config", cfg, "--out", (dir / "b").string(), "simulate"}).code == 0);
    CHECK(io::read_file(dir / "b" / "dataset.jsonl") == text);
    REQUIRE(invoke({"--config", cfg, "--seed", "43", "--out", (dir / "c").string(), "simulate"}).code == 0);
    CHECK(io::read_file(dir / "c" / "dataset.jsonl") != text);
}

TEST_CASE("configuration errors exit with code 2 and name the field") {
    auto j = small_config();
    j["environment"]["synthetic"]["classes"][0]["weight"] = 0.9;
    const auto dir = write_config("cli_bad_weights", j);
    const auto r = invoke({"--config", (dir / "config.json").string(), "simulate"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("weight") != std::string::npos);

    auto unseeded = small_config();
    unseeded.erase("seed");
    const auto dir2 = write_config("cli_no_seed", unseeded);
    const auto cfg2 = (dir2 / "config.json").string();
    CHECK(invoke({"--config", cfg2, "simulate"}).code == cli::kExitConfig);
    CHECK(invoke({"--config", cfg2, "--seed", "1", "--out", (dir2 / "o").string(), "simulate"}).code == 0);

    CHECK(invoke({"simulate"}).code == cli::kExitConfig);
    CHECK(invoke({"bogus"}).code == cli::kExitConfig);
    CHECK(invoke({"--config", (dir2 / "absent.json").string(), "train"}).code != 0);
}

TEST_CASE("malformed data exits with code 3") {
    const auto dir = testing::scratch_dir("cli_bad_data");
    io::write_file(dir / "bad.jsonl", "{\"kind\":\"query\",\"id\":\"a\"}\n");
    io::write_file(dir / "config.json",
                   json{{"seed", 1}, {"environment", {{"replay", "bad.jsonl"}}}}.dump());
    CHECK(invoke({"--config", (dir / "config.json").string(), "--out", (dir / "o").string(), "train"})
              .code == cli::kExitFormat);
    CHECK(invoke({"--out", (dir / "o").string(), "evaluate", "--dataset", (dir / "bad.jsonl").string(),
                  "--policy", "oracle"})
              .code == cli::kExitFormat);
}

TEST_CASE("train with zero episodes writes the initial model and an empty log") {
    const auto dir = write_config("cli_train_zero", small_config(300, 0));
    const auto r = invoke({"--config", (dir / "config.json").string(), "--out", dir.string(), "train"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(io::read_file(dir / "episodes.jsonl").empty());
    const auto checkpoint = io::load_checkpoint(dir / "checkpoint.json");
    CHECK(checkpoint.model.dim() == 64);
    for (double w : checkpoint.model.all_weights()) {
        CHECK(w == 0.0);
    }
    CHECK(r.out.find("episodes\t0") != std::string::npos);
}

TEST_CASE("train is reproducible and evaluate reads its checkpoint") {
    const auto dir = write_config("cli_train", small_config());
    const auto cfg = (dir / "config.json").string();
    const auto a = invoke({"--config", cfg, "--out", (dir / "a").string(), "train"});
    const auto b = invoke({"--config", cfg, "--out", (dir / "b").string(), "train"});
    REQUIRE_MESSAGE(a.code == 0, a.err);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(io::read_file(dir / "a" / "checkpoint.json") == io::read_file(dir / "b" / "checkpoint.json"));
    CHECK(io::read_file(dir / "a" / "episodes.jsonl") == io::read_file(dir / "b" / "episodes.jsonl"));
    CHECK(io::parse_episode_log(io::read_file(dir / "a" / "episodes.jsonl")).size() == 600);

    const auto e = invoke({"--config", cfg, "--out", (dir / "a").string(), "evaluate"});
    REQUIRE_MESSAGE(e.code == 0, e.err);
    CHECK(e.out.find("policy\tbandit") != std::string::npos);
    CHECK(io::read_file(dir / "a" / "eval_report.tsv") == e.out);
}

TEST_CASE("evaluate fixed and oracle policies on a dataset file") {
    const auto dir = write_config("cli_evaluate", small_config());
    const auto cfg = (dir / "config.json").string();
    REQUIRE(invoke({"--config", cfg, "--out", dir.string(), "simulate"}).code == 0);
    const auto data = (dir / "dataset.jsonl").string();

    const auto one = invoke({"--out", dir.string(), "evaluate", "--dataset", data, "--policy", "fixed:one"});
    REQUIRE_MESSAGE(one.code == 0, one.err);
    CHECK(one.out.find("Step\t1.0000") != std::string::npos);
    CHECK(one.out.find("select:one\t1.0000") != std::string::npos);

    const auto oracle = invoke({"--out", dir.string(), "evaluate", "--dataset", data, "--policy", "oracle"});
    REQUIRE(oracle.code == 0);
    CHECK(oracle.out.find("regret\t0.0000") != std::string::npos);

    CHECK(invoke({"--out", dir.string(), "evaluate", "--dataset", data, "--policy", "fixed:web"}).code ==
          cli::kExitConfig);
}

TEST_CASE("compare is deterministic and the oracle row has the top reward") {
    const auto dir = write_config("cli_compare", small_config());
    const auto cfg = (dir / "config.json").string();
    const auto a = invoke({"--config", cfg, "--out", (dir / "a").string(), "compare"});
    const auto b = invoke({"--config", cfg, "--out", (dir / "b").string(), "compare"});
    REQUIRE_MESSAGE(a.code == 0, a.err);
    CHECK(a.out == b.out);
    CHECK(io::read_file(dir / "a" / "compare.tsv") == io::read_file(dir / "b" / "compare.tsv"));

    std::istringstream lines(a.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("policy\tEM\tF1\tAcc\tStep\treward\tregret\tselect:zero", 0) == 0);
    std::map<std::string, double> reward;
    while (std::getline(lines, line)) {
        std::istringstream cols(line);
        std::vector<std::string> fields;
        for (std::string f; std::getline(cols, f, '\t');) {
            fields.push_back(f);
        }
        REQUIRE(fields.size() == 10);
        reward[fields[0]] = std::stod(fields[5]);
    }
    CHECK(reward.size() == 7);
    for (const auto& [name, value] : reward) {
        CHECK_MESSAGE(reward.at("oracle") >= value, name);
    }
}
