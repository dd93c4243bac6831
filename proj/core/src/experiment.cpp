#include "aor/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aor/checkpoint.hpp"
#include "aor/csv_io.hpp"
#include "aor/errors.hpp"
#include "aor/fairness.hpp"
#include "aor/rng.hpp"
#include "aor/version.hpp"

namespace aor {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string format_lambda(double lambda) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", lambda);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---- typed JSON access with path-named config errors ----

double as_double(const json& v, const std::string& path) {
    if (!v.is_number())
        throw ConfigError("'" + path + "' must be a number");
    return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError("'" + path + "' must be a non-negative integer");
}

std::size_t as_size(const json& v, const std::string& path) {
    return static_cast<std::size_t>(as_uint(v, path));
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean())
        throw ConfigError("'" + path + "' must be true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string())
        throw ConfigError("'" + path + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> as_double_array(const json& v, const std::string& path) {
    if (!v.is_array())
        throw ConfigError("'" + path + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v)
        out.push_back(as_double(e, path));
    return out;
}

std::vector<std::uint64_t> as_uint_array(const json& v, const std::string& path) {
    if (!v.is_array())
        throw ConfigError("'" + path + "' must be an array of non-negative integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : v)
        out.push_back(as_uint(e, path));
    return out;
}

std::vector<std::size_t> as_size_array(const json& v, const std::string& path) {
    std::vector<std::size_t> out;
    for (std::uint64_t x : as_uint_array(v, path))
        out.push_back(static_cast<std::size_t>(x));
    return out;
}

std::array<double, 4> as_dist4(const json& v, const std::string& path) {
    const auto vec = as_double_array(v, path);
    if (vec.size() != 4)
        throw ConfigError("'" + path + "' must have exactly 4 entries");
    return {vec[0], vec[1], vec[2], vec[3]};
}

void apply_training_section(TrainingConfig& cfg, const json& section, const std::string& name) {
    for (const auto& [key, value] : section.items()) {
        const std::string path = name + "." + key;
        if (key == "lambda")
            cfg.lambda = as_double(value, path);
        else if (key == "learning_rate")
            cfg.learning_rate = as_double(value, path);
        else if (key == "batch_size")
            cfg.batch_size = as_size(value, path);
        else if (key == "epochs")
            cfg.epochs = as_size(value, path);
        else if (key == "momentum")
            cfg.momentum = as_double(value, path);
        else if (key == "seed")
            cfg.seed = as_uint(value, path);
        else if (key == "shuffle")
            cfg.shuffle = as_bool(value, path);
        else if (key == "allow_unfrozen")
            cfg.allow_unfrozen = as_bool(value, path);
        else
            throw ConfigError("unknown config key '" + path + "'");
    }
}

void apply_dataset_section(ExperimentConfig& cfg, const json& section) {
    // preset/csv first so explicit keys override the preset regardless of
    // their position in the file.
    if (auto it = section.find("preset"); it != section.end()) {
        const std::string preset = as_string(*it, "dataset.preset");
        if (preset != "daisee_skew")
            throw ConfigError("unknown dataset preset '" + preset + "'");
        cfg.dataset = daisee_skew_preset();
    }
    if (auto it = section.find("csv"); it != section.end())
        cfg.dataset_csv = as_string(*it, "dataset.csv");
    for (const auto& [key, value] : section.items()) {
        const std::string path = "dataset." + key;
        if (key == "preset" || key == "csv")
            continue;
        if (key == "n")
            cfg.dataset.n = as_size(value, path);
        else if (key == "group1_fraction")
            cfg.dataset.group1_fraction = as_double(value, path);
        else if (key == "label_dist_g0")
            cfg.dataset.label_dist_g0 = as_dist4(value, path);
        else if (key == "label_dist_g1")
            cfg.dataset.label_dist_g1 = as_dist4(value, path);
        else if (key == "d_core")
            cfg.dataset.d_core = as_size(value, path);
        else if (key == "d_spur")
            cfg.dataset.d_spur = as_size(value, path);
        else if (key == "d_noise")
            cfg.dataset.d_noise = as_size(value, path);
        else if (key == "class_separation")
            cfg.dataset.class_separation = as_double(value, path);
        else if (key == "group_separation")
            cfg.dataset.group_separation = as_double(value, path);
        else if (key == "noise_sd")
            cfg.dataset.noise_sd = as_double(value, path);
        else if (key == "seed")
            cfg.dataset.seed = as_uint(value, path);
        else
            throw ConfigError("unknown config key '" + path + "'");
    }
}

void apply_model_section(SplitModelConfig& cfg, const json& section) {
    for (const auto& [key, value] : section.items()) {
        const std::string path = "model." + key;
        if (key == "input_dim")
            cfg.input_dim = as_size(value, path);
        else if (key == "trunk_widths")
            cfg.trunk_widths = as_size_array(value, path);
        else if (key == "head_task_widths")
            cfg.head_task_widths = as_size_array(value, path);
        else if (key == "head_attr_widths")
            cfg.head_attr_widths = as_size_array(value, path);
        else if (key == "seed")
            cfg.seed = as_uint(value, path);
        else
            throw ConfigError("unknown config key '" + path + "'");
    }
}

ExperimentConfig config_from_json(const json& doc) {
    if (!doc.is_object())
        throw ConfigError("config root must be an object");
    ExperimentConfig cfg = default_experiment_config();
    for (const auto& [key, value] : doc.items()) {
        if (key == "output_dir")
            cfg.output_dir = as_string(value, "output_dir");
        else if (key == "lambda_values")
            cfg.lambda_values = as_double_array(value, "lambda_values");
        else if (key == "seeds")
            cfg.seeds = as_uint_array(value, "seeds");
        else if (key == "dataset")
            apply_dataset_section(cfg, value);
        else if (key == "external") {
            for (const auto& [k2, v2] : value.items()) {
                const std::string path = "external." + k2;
                if (k2 == "n")
                    cfg.external.n = as_size(v2, path);
                else if (k2 == "domain_shift_sd")
                    cfg.external.domain_shift_sd = as_double(v2, path);
                else
                    throw ConfigError("unknown config key '" + path + "'");
            }
        } else if (key == "model")
            apply_model_section(cfg.model, value);
        else if (key == "stage_a")
            apply_training_section(cfg.stage_a, value, "stage_a");
        else if (key == "stage_b")
            apply_training_section(cfg.stage_b, value, "stage_b");
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

// ---- TOML-style parsing into the same JSON document shape ----

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"')
            in_string = !in_string;
        else if (line[i] == '#' && !in_string)
            return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

json parse_scalar(const std::string& raw, std::size_t line_no) {
    const std::string s = trim(raw);
    if (s.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
        return s.substr(1, s.size() - 2);
    }
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    try {
        if (s.find_first_of(".eE") == std::string::npos && s.front() != '-') {
            std::size_t pos = 0;
            const std::uint64_t u = std::stoull(s, &pos);
            if (pos == s.size())
                return u;
        } else if (s.find_first_of(".eE") == std::string::npos) {
            std::size_t pos = 0;
            const std::int64_t i = std::stoll(s, &pos);
            if (pos == s.size())
                return i;
        }
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (pos == s.size())
            return d;
    } catch (const std::exception&) {
        // falls through to the error below
    }
    throw ConfigError("line " + std::to_string(line_no) + ": cannot parse value '" + s + "'");
}

json parse_value(const std::string& raw, std::size_t line_no) {
    const std::string s = trim(raw);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']')
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
        json arr = json::array();
        const std::string body = s.substr(1, s.size() - 2);
        std::string item;
        std::istringstream stream(body);
        while (std::getline(stream, item, ','))
            if (!trim(item).empty())
                arr.push_back(parse_scalar(item, line_no));
        return arr;
    }
    return parse_scalar(s, line_no);
}

json toml_to_json(const std::string& text) {
    static const char* kSections[] = {"dataset", "external", "model", "stage_a", "stage_b"};
    json doc = json::object();
    std::string section;
    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (std::find_if(std::begin(kSections), std::end(kSections), [&](const char* s) {
                    return section == s;
                }) == std::end(kSections))
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section '[" +
                                  section + "]'");
            if (!doc.contains(section))
                doc[section] = json::object();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        const json value = parse_value(line.substr(eq + 1), line_no);
        if (section.empty())
            doc[key] = value;
        else
            doc[section][key] = value;
    }
    return doc;
}

// ---- canonical serialization for hashing ----

json training_to_json(const TrainingConfig& cfg) {
    return json{{"lambda", cfg.lambda},
                {"learning_rate", cfg.learning_rate},
                {"batch_size", cfg.batch_size},
                {"epochs", cfg.epochs},
                {"momentum", cfg.momentum},
                {"seed", cfg.seed},
                {"shuffle", cfg.shuffle},
                {"allow_unfrozen", cfg.allow_unfrozen}};
}

json semantic_config_json(const ExperimentConfig& cfg) {
    json dataset{{"n", cfg.dataset.n},
                 {"group1_fraction", cfg.dataset.group1_fraction},
                 {"label_dist_g0", cfg.dataset.label_dist_g0},
                 {"label_dist_g1", cfg.dataset.label_dist_g1},
                 {"d_core", cfg.dataset.d_core},
                 {"d_spur", cfg.dataset.d_spur},
                 {"d_noise", cfg.dataset.d_noise},
                 {"class_separation", cfg.dataset.class_separation},
                 {"group_separation", cfg.dataset.group_separation},
                 {"noise_sd", cfg.dataset.noise_sd},
                 {"seed", cfg.dataset.seed}};
    if (cfg.dataset_csv)
        dataset["csv"] = *cfg.dataset_csv;
    return json{{"dataset", dataset},
                {"external",
                 json{{"n", cfg.external.n}, {"domain_shift_sd", cfg.external.domain_shift_sd}}},
                {"model", json{{"input_dim", cfg.model.input_dim},
                               {"trunk_widths", cfg.model.trunk_widths},
                               {"head_task_widths", cfg.model.head_task_widths},
                               {"head_attr_widths", cfg.model.head_attr_widths},
                               {"seed", cfg.model.seed}}},
                {"stage_a", training_to_json(cfg.stage_a)},
                {"stage_b", training_to_json(cfg.stage_b)},
                {"lambda_values", cfg.lambda_values},
                {"seeds", cfg.seeds}};
}

} // namespace

ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.dataset = daisee_skew_preset();
    cfg.stage_a.epochs = 40;
    cfg.stage_a.learning_rate = 0.01;
    cfg.stage_b.epochs = 60;
    cfg.stage_b.learning_rate = 0.01;
    // Momentum-free stage B: the decorrelation penalty's gradient is tangential
    // (zero radial component), so discrete steps inflate the weight norm by
    // lr^2*|G|^2 per step, diluting the normalized penalty over training.
    // Momentum amplifies that ratchet enough to undo mitigation by the final
    // epoch; plain SGD keeps the penalty binding at this scale.
    cfg.stage_b.momentum = 0.0;
    return cfg;
}

void validate(const ExperimentConfig& config) {
    if (config.lambda_values.empty())
        throw ConfigError("lambda_values must contain at least one value");
    for (double lambda : config.lambda_values)
        if (!(lambda >= 0.0))
            throw ConfigError("lambda values must be non-negative");
    for (std::size_t i = 0; i < config.lambda_values.size(); ++i)
        for (std::size_t k = i + 1; k < config.lambda_values.size(); ++k)
            if (config.lambda_values[i] == config.lambda_values[k])
                throw ConfigError("duplicate lambda value " + format_lambda(config.lambda_values[i]));
    if (config.seeds.empty())
        throw ConfigError("seeds must contain at least one value");
    for (std::size_t i = 0; i < config.seeds.size(); ++i)
        for (std::size_t k = i + 1; k < config.seeds.size(); ++k)
            if (config.seeds[i] == config.seeds[k])
                throw ConfigError("duplicate seed " + std::to_string(config.seeds[i]));
    if (config.output_dir.empty())
        throw ConfigError("output_dir must not be empty");
    try {
        validate(config.dataset);
        validate(config.model);
        validate(config.stage_a);
        validate(config.stage_b);
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    if (!config.dataset_csv && config.model.input_dim != config.dataset.feature_dim())
        throw ConfigError("model.input_dim (" + std::to_string(config.model.input_dim) +
                          ") must match the generated feature dimension (" +
                          std::to_string(config.dataset.feature_dim()) + ")");
    if (config.external.n == 0)
        throw ConfigError("external.n must be positive");
    if (config.external.domain_shift_sd < 0.0)
        throw ConfigError("external.domain_shift_sd must be non-negative");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        throw ConfigError("config is empty");
    if (text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        return config_from_json(doc);
    }
    return config_from_json(toml_to_json(text));
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

std::string config_hash(const ExperimentConfig& config) {
    const std::uint64_t h = fnv1a64(semantic_config_json(config).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest_json(const RunManifest& manifest, const std::string& path) {
    json j;
    j["config_hash"] = manifest.config_hash;
    j["library_version"] = manifest.library_version;
    j["wall_clock_seconds"] = manifest.wall_clock_seconds;
    j["output_dir"] = manifest.output_dir;
    j["stage_a"] = json::array();
    for (const StageARecord& r : manifest.stage_a) {
        json e{{"seed", r.seed},
               {"checkpoint", r.checkpoint_path},
               {"history", r.history_path},
               {"ok", r.ok}};
        if (!r.ok)
            e["error"] = r.error;
        j["stage_a"].push_back(e);
    }
    j["runs"] = json::array();
    for (const RunRecord& r : manifest.runs) {
        json e{{"seed", r.seed},
               {"lambda", r.lambda},
               {"checkpoint", r.checkpoint_path},
               {"history", r.history_path},
               {"report", r.report_path},
               {"ok", r.ok}};
        if (r.ok) {
            e["group_pcc"] = r.group_pcc;
            e["accuracy"] = r.accuracy;
            e["final_l_ortho"] = r.final_l_ortho;
        } else {
            e["error"] = r.error;
        }
        j["runs"].push_back(e);
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

RunManifest run_experiment(const ExperimentConfig& config, std::ostream* log) {
    validate(config);
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out_dir(config.output_dir);
    ensure_dir(out_dir);

    std::optional<GroupLabeledDataset> csv_ds;
    if (config.dataset_csv) {
        csv_ds = ingest_feature_csv(*config.dataset_csv);
        if (!csv_ds->has_task_labels())
            throw ConfigError("dataset.csv '" + *config.dataset_csv + "' has no task labels");
        if (csv_ds->X.cols != config.model.input_dim)
            throw ConfigError("dataset.csv feature dimension " + std::to_string(csv_ds->X.cols) +
                              " does not match model.input_dim " +
                              std::to_string(config.model.input_dim));
    }

    RunManifest manifest;
    manifest.config_hash = config_hash(config);
    manifest.library_version = kVersion;
    manifest.output_dir = config.output_dir;

    for (const std::uint64_t seed : config.seeds) {
        const std::string seed_rel = "seed_" + std::to_string(seed);
        StageARecord arec;
        arec.seed = seed;
        arec.checkpoint_path = seed_rel + "/stage_a.aorm";
        arec.history_path = seed_rel + "/stage_a_history.csv";

        GroupLabeledDataset train_split;
        GroupLabeledDataset val_split;
        try {
            ensure_dir(out_dir / seed_rel);
            DatasetSpec spec = config.dataset;
            GroupLabeledDataset task_ds;
            if (csv_ds) {
                task_ds = *csv_ds;
            } else {
                spec.seed = derive_seed(seed, seed_tags::data);
                task_ds = generate_task_dataset(spec);
            }
            std::tie(train_split, val_split) =
                split_train_val(task_ds, 0.2, derive_seed(seed, seed_tags::split));
            const GroupLabeledDataset external = generate_external_dataset(
                spec, config.external.n, config.external.domain_shift_sd,
                derive_seed(seed, seed_tags::external));

            SplitModelConfig mc = config.model;
            mc.seed = derive_seed(seed, seed_tags::model);
            SplitModel model = build_split_model(mc);

            TrainingConfig ca = config.stage_a;
            ca.seed = derive_seed(seed, seed_tags::stage_a);
            const TrainingHistory hist_a = train_stage_a(model, external, ca);
            save_checkpoint(model, (out_dir / arec.checkpoint_path).string());
            write_history_csv(hist_a, (out_dir / arec.history_path).string());
            arec.ok = true;
            if (log)
                *log << "seed " << seed << ": stage A done, attr val_acc "
                     << hist_a.back().val_acc << "\n";
        } catch (const std::exception& e) {
            arec.error = e.what();
            if (log)
                *log << "seed " << seed << ": stage A FAILED: " << e.what() << "\n";
        }
        manifest.stage_a.push_back(arec);

        for (const double lambda : config.lambda_values) {
            const std::string lam_rel = seed_rel + "/lambda_" + format_lambda(lambda);
            RunRecord rec;
            rec.seed = seed;
            rec.lambda = lambda;
            rec.checkpoint_path = lam_rel + "/stage_b.aorm";
            rec.history_path = lam_rel + "/history.csv";
            rec.report_path = lam_rel + "/report.json";
            if (!arec.ok) {
                rec.error = "stage A failed";
                manifest.runs.push_back(rec);
                continue;
            }
            try {
                ensure_dir(out_dir / lam_rel);
                SplitModel model = load_checkpoint((out_dir / arec.checkpoint_path).string());
                freeze_for_stage_b(model);
                TrainingConfig cb = config.stage_b;
                cb.lambda = lambda;
                cb.seed = derive_seed(seed, seed_tags::stage_b);
                const TrainingHistory hist = train_stage_b(model, train_split, val_split, cb);
                save_checkpoint(model, (out_dir / rec.checkpoint_path).string());
                write_history_csv(hist, (out_dir / rec.history_path).string());

                SubsetEvalParams subset;
                subset.seed = derive_seed(seed, seed_tags::subset);
                const FairnessReport report = evaluate_model(model, val_split, subset);
                write_report_json(report, (out_dir / rec.report_path).string());

                rec.group_pcc = report.group_pcc;
                rec.accuracy = report.accuracy;
                rec.final_l_ortho = hist.back().l_ortho;
                rec.ok = true;
                if (log)
                    *log << "seed " << seed << " lambda " << format_lambda(lambda)
                         << ": group_pcc " << report.group_pcc << ", accuracy " << report.accuracy
                         << "\n";
            } catch (const std::exception& e) {
                rec.error = e.what();
                if (log)
                    *log << "seed " << seed << " lambda " << format_lambda(lambda)
                         << ": FAILED: " << e.what() << "\n";
            }
            manifest.runs.push_back(rec);
        }
    }

    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest_json(manifest, (out_dir / "manifest.json").string());
    return manifest;
}

namespace {

void write_sweep_csv(const SweepSummary& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << "lambda,seed,group_pcc,accuracy,final_l_ortho\n";
    char buf[256];
    for (const SweepRow& r : summary.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%llu,%.17g,%.17g,%.17g\n", r.lambda,
                      static_cast<unsigned long long>(r.seed), r.group_pcc, r.accuracy,
                      r.final_l_ortho);
        out << buf;
    }
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

void write_sweep_json(const SweepSummary& summary, const std::string& path) {
    json j;
    j["rows"] = json::array();
    for (const SweepRow& r : summary.rows)
        j["rows"].push_back(json{{"lambda", r.lambda},
                                 {"seed", r.seed},
                                 {"group_pcc", r.group_pcc},
                                 {"accuracy", r.accuracy},
                                 {"final_l_ortho", r.final_l_ortho}});
    j["aggregates"] = json::array();
    for (const SweepAggregate& a : summary.aggregates)
        j["aggregates"].push_back(json{{"lambda", a.lambda},
                                       {"mean_group_pcc", a.mean_group_pcc},
                                       {"min_group_pcc", a.min_group_pcc},
                                       {"max_group_pcc", a.max_group_pcc},
                                       {"mean_accuracy", a.mean_accuracy},
                                       {"mean_final_l_ortho", a.mean_final_l_ortho}});
    j["best_lambda"] = summary.best_lambda;
    j["monotone_improvement"] = summary.monotone_improvement;
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace

SweepSummary sweep_lambda(const ExperimentConfig& config, std::ostream* log) {
    if (config.lambda_values.size() < 2)
        throw ConfigError("sweep requires at least 2 lambda values");
    const RunManifest manifest = run_experiment(config, log);

    SweepSummary summary;
    for (const double lambda : config.lambda_values) {
        SweepAggregate agg;
        agg.lambda = lambda;
        agg.min_group_pcc = 1.0;
        agg.max_group_pcc = -1.0;
        std::size_t count = 0;
        for (const RunRecord& r : manifest.runs) {
            if (r.lambda != lambda || !r.ok)
                continue;
            summary.rows.push_back({r.lambda, r.seed, r.group_pcc, r.accuracy, r.final_l_ortho});
            agg.mean_group_pcc += r.group_pcc;
            agg.min_group_pcc = std::min(agg.min_group_pcc, r.group_pcc);
            agg.max_group_pcc = std::max(agg.max_group_pcc, r.group_pcc);
            agg.mean_accuracy += r.accuracy;
            agg.mean_final_l_ortho += r.final_l_ortho;
            ++count;
        }
        if (count == 0)
            throw ContractError("no successful runs for lambda " + format_lambda(lambda));
        agg.mean_group_pcc /= static_cast<double>(count);
        agg.mean_accuracy /= static_cast<double>(count);
        agg.mean_final_l_ortho /= static_cast<double>(count);
        summary.aggregates.push_back(agg);
    }

    const SweepAggregate* best = &summary.aggregates.front();
    for (const SweepAggregate& a : summary.aggregates)
        if (a.mean_group_pcc > best->mean_group_pcc)
            best = &a;
    summary.best_lambda = best->lambda;
    for (const SweepAggregate& a : summary.aggregates)
        if (a.lambda == 0.0 && best->mean_group_pcc > a.mean_group_pcc)
            summary.monotone_improvement = true;

    const fs::path out_dir(config.output_dir);
    write_sweep_csv(summary, (out_dir / "sweep.csv").string());
    write_sweep_json(summary, (out_dir / "sweep.json").string());
    return summary;
}

void render_histograms(const std::string& report_path, const std::string& out_path) {
    const FairnessReport report = read_report_json(report_path);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"300\" "
           "viewBox=\"0 0 640 300\">\n";
    svg << "<rect width=\"640\" height=\"300\" fill=\"#ffffff\"/>\n";

    const struct {
        const GroupDistribution* dist;
        double origin_x;
        const char* title;
        const char* fill;
    } panels[] = {{&report.dist_g0, 40.0, "group 0", "#4477aa"},
                  {&report.dist_g1, 360.0, "group 1", "#ee6677"}};

    char buf[512];
    for (const auto& panel : panels) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\" "
                      "text-anchor=\"middle\">%s</text>\n",
                      panel.origin_x + 120.0, panel.title);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"250\" x2=\"%.1f\" y2=\"250\" stroke=\"#222222\" "
                      "stroke-width=\"1\"/>\n",
                      panel.origin_x - 10.0, panel.origin_x + 250.0);
        svg << buf;
        for (std::size_t level = 0; level < 4; ++level) {
            const double p = panel.dist->proportions[level];
            const double height = 200.0 * p;
            const double x = panel.origin_x + 10.0 + static_cast<double>(level) * 60.0;
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%.1f\" y=\"%.3f\" width=\"40\" height=\"%.3f\" "
                          "fill=\"%s\"/>\n",
                          x, 250.0 - height, height, panel.fill);
            svg << buf;
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.1f\" y=\"%.3f\" font-family=\"sans-serif\" font-size=\"11\" "
                          "text-anchor=\"middle\">%.3f</text>\n",
                          x + 20.0, 244.0 - height, p);
            svg << buf;
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.1f\" y=\"268\" font-family=\"sans-serif\" font-size=\"12\" "
                          "text-anchor=\"middle\">level %zu</text>\n",
                          x + 20.0, level);
            svg << buf;
        }
    }
    svg << "</svg>\n";

    std::ofstream out(out_path);
    if (!out)
        throw IoError("cannot open '" + out_path + "' for writing");
    out << svg.str();
    if (!out)
        throw IoError("write to '" + out_path + "' failed");
}

} // namespace aor
