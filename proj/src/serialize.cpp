#include "mba/serialize.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "mba/errors.hpp"

namespace mba::io {

namespace {

template <class T>
T get_field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(where + "." + key + " is required");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    return get_field<T>(j, key, where);
}

std::vector<std::string> split_lines(std::string_view content) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= content.size()) {
        const auto end = content.find('\n', start);
        const auto stop = end == std::string_view::npos ? content.size() : end;
        lines.emplace_back(content.substr(start, stop - start));
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return lines;
}

json parse_line(const std::string& line, std::size_t line_no, const char* what) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + " line " + std::to_string(line_no) +
                          ": invalid JSON (" + e.what() + ")");
    }
}

// Field access for persisted data: failures are format errors, not config.
template <class T>
T data_field(const json& j, const char* key, std::size_t line_no, const char* what) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string(what) + " line " + std::to_string(line_no) + ": field '" +
                          key + "' missing or mistyped");
    }
}

}  // namespace

json to_json(const EpisodeRecord& r) {
    return json{{"query_id", r.query_id},
                {"chosen_arm", {{"index", r.chosen_arm.index}, {"name", r.chosen_arm.name}}},
                {"reward", r.reward},
                {"outcome",
                 {{"answer", r.outcome.answer},
                  {"correct_em", r.outcome.correct_em},
                  {"steps", r.outcome.steps}}},
                {"scores_at_selection", r.scores_at_selection},
                {"explored", r.explored}};
}

EpisodeRecord episode_from_json(const json& j) {
    try {
        EpisodeRecord r;
        r.query_id = j.at("query_id").get<std::string>();
        r.chosen_arm.index = j.at("chosen_arm").at("index").get<std::size_t>();
        r.chosen_arm.name = j.at("chosen_arm").at("name").get<std::string>();
        r.reward = j.at("reward").get<double>();
        r.outcome.answer = j.at("outcome").at("answer").get<std::string>();
        r.outcome.correct_em = j.at("outcome").at("correct_em").get<bool>();
        r.outcome.steps = j.at("outcome").at("steps").get<int>();
        r.scores_at_selection = j.at("scores_at_selection").get<std::vector<double>>();
        r.explored = j.at("explored").get<bool>();
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed episode record: ") + e.what());
    }
}

std::string format_episode_log(const std::vector<EpisodeRecord>& history) {
    std::string out;
    for (const auto& r : history) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::vector<EpisodeRecord> parse_episode_log(std::string_view content) {
    std::vector<EpisodeRecord> history;
    const auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        history.push_back(episode_from_json(parse_line(lines[i], i + 1, "episode log")));
    }
    return history;
}

std::string format_dataset(const ReplayDataset& dataset) {
    std::string out;
    for (std::size_t pos = 0; pos < dataset.size(); ++pos) {
        const Query& q = dataset.query(pos);
        json record{{"kind", "query"}, {"id", q.id}, {"text", q.text}};
        record["class"] = q.class_label ? json(*q.class_label) : json(nullptr);
        record["gold"] = dataset.gold(pos);
        if (q.features) {
            record["features"] = std::vector<double>(q.features->values().begin(),
                                                     q.features->values().end());
        }
        out += record.dump();
        out += '\n';
        for (std::size_t a = 0; a < dataset.arms().size(); ++a) {
            const ArmOutcome& o = dataset.outcome(pos, a);
            out += json{{"kind", "outcome"},
                        {"id", q.id},
                        {"arm", dataset.arms().at(a).name},
                        {"answer", o.answer},
                        {"correct", o.correct_em},
                        {"steps", o.steps}}
                       .dump();
            out += '\n';
        }
    }
    return out;
}

ReplayDataset parse_dataset(std::string_view content) {
    constexpr const char* what = "dataset";
    struct PendingQuery {
        Query query;
        std::string gold;
        std::size_t line_no;
    };
    std::vector<PendingQuery> queries;
    std::map<std::string, std::size_t> query_index;
    std::vector<std::string> arm_names;
    std::map<std::pair<std::string, std::string>, std::pair<ArmOutcome, std::size_t>> outcomes;

    const auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) {
            continue;
        }
        const json j = parse_line(lines[i], line_no, what);
        const auto kind = data_field<std::string>(j, "kind", line_no, what);
        const auto id = data_field<std::string>(j, "id", line_no, what);
        if (id.empty()) {
            throw FormatError("dataset line " + std::to_string(line_no) + ": empty id");
        }
        if (kind == "query") {
            Query q;
            q.id = id;
            q.text = data_field<std::string>(j, "text", line_no, what);
            if (j.contains("class") && !j.at("class").is_null()) {
                q.class_label = data_field<std::string>(j, "class", line_no, what);
            }
            if (j.contains("features") && !j.at("features").is_null()) {
                q.features = FeatureVector(data_field<std::vector<double>>(j, "features", line_no, what));
            }
            auto gold = data_field<std::string>(j, "gold", line_no, what);
            if (!query_index.emplace(id, queries.size()).second) {
                throw DuplicateError("dataset line " + std::to_string(line_no) +
                                     ": duplicate query id '" + id + "'");
            }
            queries.push_back({std::move(q), std::move(gold), line_no});
        } else if (kind == "outcome") {
            const auto arm = data_field<std::string>(j, "arm", line_no, what);
            ArmOutcome o;
            o.answer = data_field<std::string>(j, "answer", line_no, what);
            o.correct_em = data_field<bool>(j, "correct", line_no, what);
            o.steps = data_field<int>(j, "steps", line_no, what);
            if (std::find(arm_names.begin(), arm_names.end(), arm) == arm_names.end()) {
                arm_names.push_back(arm);
            }
            if (!outcomes.emplace(std::pair{id, arm}, std::pair{std::move(o), line_no}).second) {
                throw DuplicateError("dataset line " + std::to_string(line_no) +
                                     ": duplicate outcome for ('" + id + "', '" + arm + "')");
            }
        } else {
            throw FormatError("dataset line " + std::to_string(line_no) + ": unknown kind '" +
                              kind + "'");
        }
    }
    if (queries.empty() && arm_names.empty()) {
        throw EmptyInputError("dataset is empty");
    }
    if (arm_names.empty()) {
        throw FormatError("dataset has no outcome records");
    }
    for (const auto& [key, value] : outcomes) {
        if (!query_index.contains(key.first)) {
            throw FormatError("dataset line " + std::to_string(value.second) +
                              ": outcome for unknown query '" + key.first + "'");
        }
    }

    ReplayDataset dataset{ArmSet(arm_names)};
    for (auto& pending : queries) {
        std::vector<ArmOutcome> row;
        for (const auto& arm : arm_names) {
            auto it = outcomes.find({pending.query.id, arm});
            if (it == outcomes.end()) {
                throw FormatError("dataset: query '" + pending.query.id + "' (line " +
                                  std::to_string(pending.line_no) + ") has no outcome for arm '" +
                                  arm + "'");
            }
            row.push_back(std::move(it->second.first));
        }
        dataset.add(std::move(pending.query), std::move(pending.gold), std::move(row));
    }
    return dataset;
}

ReplayDataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

json to_json(const RewardScheme& scheme) {
    if (const auto* f = std::get_if<FormulaScheme>(&scheme)) {
        json cost = "steps";
        if (const auto* per_arm = std::get_if<PerArmCost>(&f->cost)) {
            cost = per_arm->costs;
        }
        return json{{"type", "formula"}, {"lambda", f->lambda}, {"cost", cost}};
    }
    const auto& t = std::get<TabularScheme>(scheme);
    json rules = json::array();
    for (const auto& rule : t.per_arm) {
        if (const auto* c = std::get_if<ConstantReward>(&rule)) {
            rules.push_back(c->value);
        } else {
            rules.push_back(json{{"one_minus_steps_over", std::get<StepDecayReward>(rule).divisor}});
        }
    }
    return json{{"type", "tabular"}, {"per_arm", rules}, {"failure_penalty", t.failure_penalty}};
}

RewardScheme reward_scheme_from_json(const json& j) {
    RewardScheme scheme;
    if (j.is_string()) {
        scheme = preset(j.get<std::string>());
    } else if (j.is_object()) {
        const auto type = get_field<std::string>(j, "type", "reward");
        if (type == "formula") {
            FormulaScheme f;
            f.lambda = get_field<double>(j, "lambda", "reward");
            const json cost = j.value("cost", json("steps"));
            if (cost.is_string() && cost.get<std::string>() == "steps") {
                f.cost = StepCost{};
            } else if (cost.is_array()) {
                f.cost = PerArmCost{get_field<std::vector<double>>(j, "cost", "reward")};
            } else {
                throw ConfigError("reward.cost must be \"steps\" or a list of per-arm costs");
            }
            scheme = f;
        } else if (type == "tabular") {
            TabularScheme t;
            t.failure_penalty = get_or<double>(j, "failure_penalty", -1.0, "reward");
            if (!j.contains("per_arm") || !j.at("per_arm").is_array()) {
                throw ConfigError("reward.per_arm must be a list");
            }
            for (const auto& rule : j.at("per_arm")) {
                if (rule.is_number()) {
                    t.per_arm.emplace_back(ConstantReward{rule.get<double>()});
                } else if (rule.is_object() && rule.contains("one_minus_steps_over")) {
                    t.per_arm.emplace_back(StepDecayReward{
                        get_field<double>(rule, "one_minus_steps_over", "reward.per_arm")});
                } else {
                    throw ConfigError(
                        "reward.per_arm entries must be numbers or {\"one_minus_steps_over\": d}");
                }
            }
            scheme = t;
        } else {
            throw ConfigError("reward.type must be formula or tabular, got '" + type + "'");
        }
    } else {
        throw ConfigError("reward must be a preset name or an object");
    }
    validate(scheme);
    return scheme;
}

json to_json(const FeaturizerOptions& options) {
    return json{{"dim", options.hashing.dim},
                {"ngram_max", options.hashing.ngram_max},
                {"normalize", options.hashing.normalize},
                {"fallback_to_hash", options.fallback_to_hash}};
}

FeaturizerOptions featurizer_from_json(const json& j) {
    FeaturizerOptions options;
    if (j.is_null()) {
        return options;
    }
    options.hashing.dim = get_or<std::size_t>(j, "dim", options.hashing.dim, "featurizer");
    options.hashing.ngram_max =
        get_or<std::size_t>(j, "ngram_max", options.hashing.ngram_max, "featurizer");
    options.hashing.normalize = get_or<bool>(j, "normalize", options.hashing.normalize, "featurizer");
    options.fallback_to_hash =
        get_or<bool>(j, "fallback_to_hash", options.fallback_to_hash, "featurizer");
    options.hashing.validate();
    return options;
}

SyntheticEnvSpec synthetic_spec_from_json(const json& j) {
    const std::string where = "environment.synthetic";
    SyntheticEnvSpec spec;
    if (j.contains("arms")) {
        spec.arms = ArmSet(get_field<std::vector<std::string>>(j, "arms", where));
    }
    spec.vocab_size = get_or<std::size_t>(j, "vocab_size", spec.vocab_size, where);
    spec.step_cap = get_or<int>(j, "step_cap", spec.step_cap, where);
    spec.vocab_overlap = get_or<double>(j, "vocab_overlap", spec.vocab_overlap, where);
    spec.query_length = get_or<std::size_t>(j, "query_length", spec.query_length, where);
    if (!j.contains("classes") || !j.at("classes").is_array()) {
        throw ConfigError(where + ".classes must be a list");
    }
    const auto& classes = j.at("classes");
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const std::string cw = where + ".classes[" + std::to_string(c) + "]";
        const auto& cj = classes[c];
        ClassSpec cls;
        cls.name = get_field<std::string>(cj, "name", cw);
        cls.weight = get_field<double>(cj, "weight", cw);
        if (!cj.contains("per_arm") || !cj.at("per_arm").is_array()) {
            throw ConfigError(cw + ".per_arm must be a list");
        }
        for (std::size_t a = 0; a < cj.at("per_arm").size(); ++a) {
            const auto& aj = cj.at("per_arm")[a];
            const std::string aw = cw + ".per_arm[" + std::to_string(a) + "]";
            ArmLaw law;
            law.p_correct = get_field<double>(aj, "p_correct", aw);
            if (!aj.contains("steps")) {
                throw ConfigError(aw + ".steps is required");
            }
            const auto& steps = aj.at("steps");
            if (steps.is_number_integer()) {
                law.steps = ConstantSteps{steps.get<int>()};
            } else if (steps.is_array() && steps.size() == 2 && steps[0].is_number_integer() &&
                       steps[1].is_number_integer()) {
                law.steps = UniformSteps{steps[0].get<int>(), steps[1].get<int>()};
            } else {
                throw ConfigError(aw + ".steps must be an integer or [lo, hi]");
            }
            cls.per_arm.push_back(law);
        }
        spec.classes.push_back(std::move(cls));
    }
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return spec;
}

json to_json(const SyntheticEnvSpec& spec) {
    json classes = json::array();
    for (const auto& cls : spec.classes) {
        json per_arm = json::array();
        for (const auto& law : cls.per_arm) {
            json steps;
            if (const auto* c = std::get_if<ConstantSteps>(&law.steps)) {
                steps = c->steps;
            } else {
                const auto& u = std::get<UniformSteps>(law.steps);
                steps = json::array({u.lo, u.hi});
            }
            per_arm.push_back(json{{"p_correct", law.p_correct}, {"steps", steps}});
        }
        classes.push_back(json{{"name", cls.name}, {"weight", cls.weight}, {"per_arm", per_arm}});
    }
    return json{{"arms", spec.arms.names()},
                {"vocab_size", spec.vocab_size},
                {"step_cap", spec.step_cap},
                {"vocab_overlap", spec.vocab_overlap},
                {"query_length", spec.query_length},
                {"classes", classes}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig config) {
    const std::string where = "train";
    if (j.is_null()) {
        config.validate();
        return config;
    }
    config.alpha = get_or<double>(j, "alpha", config.alpha, where);
    config.epsilon = get_or<double>(j, "epsilon", config.epsilon, where);
    config.episodes = get_or<std::size_t>(j, "episodes", config.episodes, where);
    config.seed = get_or<std::uint64_t>(j, "seed", config.seed, where);
    if (j.contains("epsilon_schedule")) {
        const auto& s = j.at("epsilon_schedule");
        if (s.is_string() && s.get<std::string>() == "constant") {
            config.epsilon_schedule = ConstantEpsilon{};
        } else if (s.is_object() && s.contains("linear_decay")) {
            const auto& d = s.at("linear_decay");
            const std::string dw = where + ".epsilon_schedule.linear_decay";
            config.epsilon_schedule = LinearDecayEpsilon{get_field<double>(d, "start", dw),
                                                         get_field<double>(d, "end", dw),
                                                         get_field<std::size_t>(d, "horizon", dw)};
        } else {
            throw ConfigError(where + ".epsilon_schedule must be \"constant\" or {\"linear_decay\": ...}");
        }
    }
    if (j.contains("weight_init")) {
        const auto& w = j.at("weight_init");
        if (w.is_string() && w.get<std::string>() == "zeros") {
            config.weight_init = ZeroInit{};
        } else if (w.is_object() && w.contains("uniform")) {
            config.weight_init = UniformInit{get_field<double>(w, "uniform", where + ".weight_init")};
        } else {
            throw ConfigError(where + ".weight_init must be \"zeros\" or {\"uniform\": s}");
        }
    }
    if (j.contains("failure_mode")) {
        const auto mode = get_field<std::string>(j, "failure_mode", where);
        if (mode == "chosen-arm") {
            config.failure_mode = FailureMode::chosen_arm;
        } else if (mode == "all-arms") {
            config.failure_mode = FailureMode::all_arms;
        } else {
            throw ConfigError(where + ".failure_mode must be chosen-arm or all-arms");
        }
    }
    config.validate();
    return config;
}

ClassifierConfig classifier_config_from_json(const json& j, ClassifierConfig config) {
    const std::string where = "classifier";
    if (!j.is_null()) {
        config.epochs = get_or<std::size_t>(j, "epochs", config.epochs, where);
        config.batch_size = get_or<std::size_t>(j, "batch_size", config.batch_size, where);
        config.learning_rate = get_or<double>(j, "learning_rate", config.learning_rate, where);
        config.seed = get_or<std::uint64_t>(j, "seed", config.seed, where);
    }
    config.validate();
    return config;
}

std::string format_checkpoint(const Checkpoint& c) {
    json j{{"format", "mba-checkpoint/1"},
           {"dim", c.model.dim()},
           {"arms", c.arms},
           {"weights", c.model.all_weights()},
           {"biases", c.model.all_biases()},
           {"featurizer", to_json(c.featurizer)},
           {"reward_scheme", to_json(c.reward_scheme)}};
    return j.dump(1) + "\n";
}

Checkpoint parse_checkpoint(std::string_view content) {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::exception& e) {
        throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        auto arms = j.at("arms").get<std::vector<std::string>>();
        const auto dim = j.at("dim").get<std::size_t>();
        auto weights = j.at("weights").get<std::vector<double>>();
        auto biases = j.at("biases").get<std::vector<double>>();
        PolicyModel model(arms.size(), dim, std::move(weights), std::move(biases));
        return Checkpoint{std::move(arms), std::move(model), featurizer_from_json(j.at("featurizer")),
                          reward_scheme_from_json(j.at("reward_scheme"))};
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace mba::io
