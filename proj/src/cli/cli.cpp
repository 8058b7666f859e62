#include "mba/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "mba/errors.hpp"
#include "mba/serialize.hpp"

namespace mba::cli {

using io::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
    auto logger = std::make_shared<spdlog::logger>("mba", sink);
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::info);
    if (const char* level = std::getenv("MBA_LOG_LEVEL"); level != nullptr) {
        const std::string_view name(level);
        if (name == "error") {
            logger->set_level(spdlog::level::err);
        } else if (name == "debug") {
            logger->set_level(spdlog::level::debug);
        } else if (name != "info") {
            logger->warn("ignoring MBA_LOG_LEVEL='{}' (expected error, info or debug)", name);
        }
    }
    return logger;
}

std::string fixed(double v, int precision = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

std::unique_ptr<Policy> make_simple_policy(const std::string& name, const ArmSet& arms,
                                           const RewardScheme& scheme, FailureMode mode) {
    if (name == "oracle") {
        return oracle_policy(scheme, mode);
    }
    if (name.starts_with("fixed:")) {
        return fixed_policy(arms.by_name(name.substr(6)));
    }
    return nullptr;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           std::optional<std::uint64_t> seed_override) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig config;
    if (seed_override) {
        config.seed = *seed_override;
    } else if (j.contains("seed") && j.at("seed").is_number_unsigned()) {
        config.seed = j.at("seed").get<std::uint64_t>();
    } else {
        throw ConfigError("seed is required (config 'seed' or --seed)");
    }

    if (!j.contains("environment") || !j.at("environment").is_object()) {
        throw ConfigError("environment section is required");
    }
    const auto& env = j.at("environment");
    if (env.contains("synthetic")) {
        SyntheticSource source;
        const auto& s = env.at("synthetic");
        source.spec = io::synthetic_spec_from_json(s);
        source.n = s.value("n", source.n);
        source.holdout_n = s.value("holdout_n", source.holdout_n);
        if (source.n == 0) {
            throw ConfigError("environment.synthetic.n must be positive");
        }
        config.environment = std::move(source);
    } else if (env.contains("replay")) {
        const auto& r = env.at("replay");
        ReplaySource source;
        if (r.is_string()) {
            source.train = resolve(base_dir, r.get<std::string>());
        } else if (r.is_object() && r.contains("train")) {
            source.train = resolve(base_dir, r.at("train").get<std::string>());
            if (r.contains("eval")) {
                source.eval = resolve(base_dir, r.at("eval").get<std::string>());
            }
        } else {
            throw ConfigError("environment.replay must be a path or {\"train\": path}");
        }
        for (const auto& p : {std::optional(source.train), source.eval}) {
            if (p && !std::filesystem::exists(*p)) {
                throw ConfigError("environment.replay file not found: " + p->string());
            }
        }
        config.environment = std::move(source);
    } else {
        throw ConfigError("environment must contain 'synthetic' or 'replay'");
    }

    const json featurizer = j.value("featurizer", json(nullptr));
    config.featurizer = io::featurizer_from_json(featurizer);
    if (featurizer.is_object() && featurizer.contains("embeddings")) {
        config.embeddings = resolve(base_dir, featurizer.at("embeddings").get<std::string>());
        if (!std::filesystem::exists(*config.embeddings)) {
            throw ConfigError("featurizer.embeddings file not found: " + config.embeddings->string());
        }
    }

    config.reward = io::reward_scheme_from_json(j.value("reward", json("single-hop")));

    TrainConfig train_defaults;
    train_defaults.seed = config.seed + kPolicySeedOffset;
    config.train = io::train_config_from_json(j.value("train", json(nullptr)), train_defaults);

    ClassifierConfig classifier_defaults;
    classifier_defaults.seed = config.seed + kClassifierSeedOffset;
    config.classifier =
        io::classifier_config_from_json(j.value("classifier", json(nullptr)), classifier_defaults);

    config.policies = j.value("policies", std::vector<std::string>{"bandit", "single-label",
                                                                   "multi-label", "fixed:zero",
                                                                   "fixed:one", "fixed:multiple",
                                                                   "oracle"});
    if (j.contains("output") && j.at("output").contains("dir")) {
        config.out_dir = resolve(base_dir, j.at("output").at("dir").get<std::string>());
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          std::optional<std::uint64_t> seed_override) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const FormatError&) {
        throw ConfigError("cannot read config " + path.string());
    }
    return parse_run_config(text, path.parent_path(), seed_override);
}

Datasets build_datasets(const RunConfig& config) {
    if (const auto* synthetic = std::get_if<SyntheticSource>(&config.environment)) {
        ReplayDataset train = generate(synthetic->spec, config.env_seed(), synthetic->n);
        if (synthetic->holdout_n > 0) {
            return {std::move(train),
                    generate(synthetic->spec, config.holdout_seed(), synthetic->holdout_n)};
        }
        ReplayDataset eval = train;
        return {std::move(train), std::move(eval)};
    }
    const auto& replay = std::get<ReplaySource>(config.environment);
    ReplayDataset train = io::load_dataset(replay.train);
    ReplayDataset eval = replay.eval ? io::load_dataset(*replay.eval) : train;
    if (!(eval.arms() == train.arms())) {
        throw FormatError("train and eval datasets list different arms");
    }
    return {std::move(train), std::move(eval)};
}

Featurizer build_featurizer(const RunConfig& config) {
    std::shared_ptr<const EmbeddingTable> table;
    if (config.embeddings) {
        table = std::make_shared<const EmbeddingTable>(load_embeddings(*config.embeddings));
    }
    return Featurizer(config.featurizer, std::move(table));
}

double final_window_optimal_rate(const std::vector<EpisodeRecord>& history,
                                 const ReplayDataset& dataset, const RewardScheme& scheme,
                                 std::size_t window) {
    if (history.empty()) {
        return 0.0;
    }
    const std::size_t start = history.size() > window ? history.size() - window : 0;
    std::size_t hits = 0;
    for (std::size_t t = start; t < history.size(); ++t) {
        const auto& r = history[t];
        if (argmax_lowest(r.scores_at_selection) ==
            oracle_best_arm(dataset, r.query_id, scheme).index) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(history.size() - start);
}

std::vector<PolicyEvaluation> compare_policies(const RunConfig& config, const Datasets& data) {
    const Featurizer featurizer = build_featurizer(config);
    const ArmSet& arms = data.train.arms();
    const FailureMode mode = config.train.failure_mode;
    std::vector<PolicyEvaluation> rows;
    for (const auto& name : config.policies) {
        std::unique_ptr<Policy> policy = make_simple_policy(name, arms, config.reward, mode);
        if (!policy) {
            if (name == "bandit") {
                ReplayEnvironment env(data.train, config.sampler_seed());
                policy = bandit_policy(train(env, featurizer, config.reward, config.train).model);
            } else if (name == "single-label" || name == "multi-label") {
                const auto cmode = name == "single-label" ? ClassifierMode::single_label
                                                          : ClassifierMode::multi_label;
                policy = classifier_policy(
                    train_classifier(data.train, featurizer, cmode, config.classifier), name);
            } else {
                throw ConfigError("unknown policy '" + name +
                                  "' (expected bandit, single-label, multi-label, oracle or "
                                  "fixed:<arm>)");
            }
        }
        rows.push_back(evaluate_policy(*policy, data.eval, featurizer, config.reward, mode));
    }
    return rows;
}

std::string format_report(const PolicyEvaluation& e, const ArmSet& arms) {
    std::ostringstream out;
    out << "policy\t" << e.policy << "\n"
        << "n\t" << e.report.n << "\n"
        << "EM\t" << fixed(e.report.em) << "\n"
        << "F1\t" << fixed(e.report.f1) << "\n"
        << "Acc\t" << fixed(e.report.acc) << "\n"
        << "Step\t" << fixed(e.report.step) << "\n"
        << "reward\t" << fixed(e.report.mean_reward) << "\n"
        << "regret\t" << fixed(e.regret) << "\n";
    for (std::size_t a = 0; a < arms.size(); ++a) {
        out << "select:" << arms.at(a).name << "\t" << fixed(e.report.per_arm_selection_freq[a])
            << "\n";
    }
    return out.str();
}

std::string format_comparison(const std::vector<PolicyEvaluation>& rows, const ArmSet& arms) {
    std::ostringstream out;
    out << "policy\tEM\tF1\tAcc\tStep\treward\tregret";
    for (const auto& name : arms.names()) {
        out << "\tselect:" << name;
    }
    out << "\n";
    for (const auto& e : rows) {
        // EM/F1/Acc as percentages, matching the usual QA tables.
        out << e.policy << "\t" << fixed(100.0 * e.report.em, 2) << "\t"
            << fixed(100.0 * e.report.f1, 2) << "\t" << fixed(100.0 * e.report.acc, 2) << "\t"
            << fixed(e.report.step, 3) << "\t" << fixed(e.report.mean_reward) << "\t"
            << fixed(e.regret, 4);
        for (double f : e.report.per_arm_selection_freq) {
            out << "\t" << fixed(f, 4);
        }
        out << "\n";
    }
    return out.str();
}

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string checkpoint;
    std::string dataset;
    std::string policy = "bandit";
};

RunConfig require_config(const GlobalOptions& opts) {
    if (opts.config.empty()) {
        throw ConfigError("--config is required for this command");
    }
    RunConfig config = load_run_config(opts.config, opts.seed);
    if (!opts.out.empty()) {
        config.out_dir = opts.out;
    }
    return config;
}

int cmd_simulate(const GlobalOptions& opts, std::ostream& out, spdlog::logger& log) {
    const RunConfig config = require_config(opts);
    if (!std::holds_alternative<SyntheticSource>(config.environment)) {
        throw ConfigError("simulate needs environment.synthetic");
    }
    const Datasets data = build_datasets(config);
    const auto path = config.out_dir / "dataset.jsonl";
    io::write_file(path, io::format_dataset(data.train));
    out << "wrote " << data.train.size() << " queries to " << path.string() << "\n";
    if (std::get<SyntheticSource>(config.environment).holdout_n > 0) {
        const auto holdout = config.out_dir / "holdout.jsonl";
        io::write_file(holdout, io::format_dataset(data.eval));
        out << "wrote " << data.eval.size() << " queries to " << holdout.string() << "\n";
    }
    log.debug("env seed {}, holdout seed {}", config.env_seed(), config.holdout_seed());
    return kExitOk;
}

int cmd_train(const GlobalOptions& opts, std::ostream& out, spdlog::logger& log) {
    const RunConfig config = require_config(opts);
    const Datasets data = build_datasets(config);
    const Featurizer featurizer = build_featurizer(config);
    ReplayEnvironment env(data.train, config.sampler_seed());
    log.info("training {} episodes on {} queries ({})", config.train.episodes, data.train.size(),
             describe(config.reward));
    const TrainResult result = train(env, featurizer, config.reward, config.train);

    io::write_file(config.out_dir / "checkpoint.json",
                   io::format_checkpoint(io::Checkpoint{data.train.arms().names(), result.model,
                                                        config.featurizer, config.reward}));
    io::write_file(config.out_dir / "episodes.jsonl", io::format_episode_log(result.history));

    double total = 0.0;
    for (const auto& r : result.history) {
        total += r.reward;
    }
    const double mean = result.history.empty() ? 0.0 : total / static_cast<double>(result.history.size());
    out << "episodes\t" << result.history.size() << "\n"
        << "mean_reward\t" << fixed(mean) << "\n"
        << "final500_optimal_arm_rate\t"
        << fixed(final_window_optimal_rate(result.history, data.train, config.reward)) << "\n";
    return kExitOk;
}

int cmd_evaluate(const GlobalOptions& opts, std::ostream& out, spdlog::logger& log) {
    std::optional<RunConfig> config;
    if (!opts.config.empty()) {
        config = require_config(opts);
    } else if (opts.dataset.empty() || (opts.checkpoint.empty() && opts.policy == "bandit")) {
        throw ConfigError("evaluate needs --config, or --dataset with --checkpoint");
    }
    const std::filesystem::path out_dir =
        !opts.out.empty() ? std::filesystem::path(opts.out) : config ? config->out_dir : "out";

    std::optional<ReplayDataset> dataset;
    if (!opts.dataset.empty()) {
        dataset = io::load_dataset(opts.dataset);
    } else {
        dataset = build_datasets(*config).eval;
    }

    std::optional<io::Checkpoint> checkpoint;
    if (opts.policy == "bandit") {
        const auto path = !opts.checkpoint.empty() ? std::filesystem::path(opts.checkpoint)
                                                   : out_dir / "checkpoint.json";
        checkpoint = io::load_checkpoint(path);
        if (checkpoint->arms != dataset->arms().names()) {
            throw FormatError("checkpoint arms do not match the dataset arms");
        }
    }
    const RewardScheme scheme = config ? config->reward : checkpoint ? checkpoint->reward_scheme
                                                                     : preset("single-hop");
    const FailureMode mode = config ? config->train.failure_mode : FailureMode::chosen_arm;
    Featurizer featurizer = config            ? build_featurizer(*config)
                            : checkpoint      ? Featurizer(checkpoint->featurizer)
                                              : Featurizer(FeaturizerOptions{});

    std::unique_ptr<Policy> policy = make_simple_policy(opts.policy, dataset->arms(), scheme, mode);
    if (!policy) {
        if (opts.policy != "bandit") {
            throw ConfigError("evaluate supports --policy bandit, oracle or fixed:<arm>");
        }
        policy = bandit_policy(checkpoint->model);
    }
    log.info("evaluating {} on {} queries", policy->name(), dataset->size());
    const PolicyEvaluation evaluation = evaluate_policy(*policy, *dataset, featurizer, scheme, mode);
    const std::string report = format_report(evaluation, dataset->arms());
    io::write_file(out_dir / "eval_report.tsv", report);
    out << report;
    return kExitOk;
}

int cmd_compare(const GlobalOptions& opts, std::ostream& out, spdlog::logger& log) {
    const RunConfig config = require_config(opts);
    const Datasets data = build_datasets(config);
    log.info("comparing {} policies on {} held-out queries", config.policies.size(), data.eval.size());
    const auto rows = compare_policies(config, data);
    const std::string table = format_comparison(rows, data.eval.arms());
    io::write_file(config.out_dir / "compare.tsv", table);
    out << table;
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto logger = make_logger(err);
    CLI::App app{"Cost-aware bandit routing for retrieval-augmented QA", "mba"};
    app.require_subcommand(1);
    GlobalOptions opts;
    app.add_option("--config", opts.config, "Run config (JSON)");
    app.add_option("--seed", opts.seed, "Global seed; overrides the config");
    app.add_option("--out", opts.out, "Output directory; overrides the config");

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic replay dataset");
    auto* train_cmd = app.add_subcommand("train", "Train the bandit router");
    auto* evaluate = app.add_subcommand("evaluate", "Greedy evaluation of one policy");
    evaluate->add_option("--checkpoint", opts.checkpoint, "Checkpoint (default <out>/checkpoint.json)");
    evaluate->add_option("--dataset", opts.dataset, "Dataset JSONL (default: config eval set)");
    evaluate->add_option("--policy", opts.policy, "bandit | oracle | fixed:<arm>");
    auto* compare = app.add_subcommand("compare", "Train and compare every configured policy");
    for (auto* sub : {simulate, train_cmd, evaluate, compare}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*simulate) {
            return cmd_simulate(opts, out, *logger);
        }
        if (*train_cmd) {
            return cmd_train(opts, out, *logger);
        }
        if (*evaluate) {
            return cmd_evaluate(opts, out, *logger);
        }
        return cmd_compare(opts, out, *logger);
    } catch (const ConfigError& e) {
        logger->error("config error: {}", e.what());
        return kExitConfig;
    } catch (const NumericError& e) {
        logger->error("numeric error: {}", e.what());
        return kExitNumeric;
    } catch (const FormatError& e) {
        logger->error("data error: {}", e.what());
        return kExitFormat;
    } catch (const std::exception& e) {
        logger->error("{}", e.what());
        return 1;
    }
}

}  // namespace mba::cli
