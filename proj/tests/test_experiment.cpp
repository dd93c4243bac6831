#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aor/checkpoint.hpp"
#include "aor/csv_io.hpp"
#include "aor/errors.hpp"
#include "aor/experiment.hpp"
#include "aor/fairness.hpp"

using namespace aor;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "aor_experiment_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small enough to train in well under a second per run.
ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig cfg = default_experiment_config();
    cfg.dataset.n = 1200;
    cfg.external.n = 600;
    cfg.stage_a.epochs = 2;
    cfg.stage_b.epochs = 2;
    cfg.lambda_values = {0.0, 1.0};
    cfg.seeds = {1, 2};
    cfg.output_dir = out_dir;
    return cfg;
}

std::vector<char> file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

const std::string kTomlText = R"(# full experiment description
output_dir = "toml_out"
lambda_values = [0.0, 1.0]
seeds = [1, 2]

[dataset]
preset = "daisee_skew"
n = 1200
seed = 3

[external]
n = 600
domain_shift_sd = 0.1

[model]
trunk_widths = [16, 8]
head_task_widths = [4]
head_attr_widths = [2]

[stage_a]
epochs = 2
learning_rate = 0.02 # mid-line comment

[stage_b]
epochs = 2
momentum = 0.0
shuffle = true
)";

const std::string kJsonText = R"({
  "output_dir": "json_out",
  "lambda_values": [0.0, 1.0],
  "seeds": [1, 2],
  "dataset": {"preset": "daisee_skew", "n": 1200, "seed": 3},
  "external": {"n": 600, "domain_shift_sd": 0.1},
  "model": {"trunk_widths": [16, 8], "head_task_widths": [4], "head_attr_widths": [2]},
  "stage_a": {"epochs": 2, "learning_rate": 0.02},
  "stage_b": {"epochs": 2, "momentum": 0.0, "shuffle": true}
})";

} // namespace

TEST_CASE("key-value config text parses into every section") {
    const ExperimentConfig cfg = parse_experiment_config(kTomlText);
    CHECK(cfg.output_dir == "toml_out");
    CHECK(cfg.lambda_values == std::vector<double>{0.0, 1.0});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(cfg.dataset.n == 1200);
    CHECK(cfg.dataset.seed == 3);
    CHECK(cfg.dataset.group1_fraction == daisee_skew_preset().group1_fraction);
    CHECK(cfg.external.n == 600);
    CHECK(cfg.external.domain_shift_sd == 0.1);
    CHECK(cfg.model.trunk_widths == std::vector<std::size_t>{16, 8});
    CHECK(cfg.model.head_task_widths == std::vector<std::size_t>{4});
    CHECK(cfg.stage_a.epochs == 2);
    CHECK(cfg.stage_a.learning_rate == 0.02);
    CHECK(cfg.stage_b.epochs == 2);
    CHECK(cfg.stage_b.momentum == 0.0);
    CHECK(cfg.stage_b.shuffle);
}

TEST_CASE("json and key-value configs describe the same experiment") {
    const ExperimentConfig a = parse_experiment_config(kTomlText);
    const ExperimentConfig b = parse_experiment_config(kJsonText);
    // output_dir differs on purpose; the semantic hash ignores it
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("config parsing names the offending key or line") {
    try {
        parse_experiment_config("[dataset]\nbogus = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("dataset.bogus") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_experiment_config("zzz = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("{\"zzz\": 1}"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("{broken json"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("   \n"), ConfigError);

    try {
        parse_experiment_config("[stage_a]\njust a line\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_experiment_config("[dataset]\npreset = \"unknown\"\n"), ConfigError);
}

TEST_CASE("experiment validation rejects inconsistent grids and shapes") {
    ExperimentConfig cfg = default_experiment_config();
    validate(cfg);

    cfg.lambda_values = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_experiment_config();
    cfg.lambda_values = {};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_experiment_config();
    cfg.lambda_values = {0.0, -1.0};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_experiment_config();
    cfg.seeds = {3, 3};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_experiment_config();
    cfg.seeds = {};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_experiment_config();
    cfg.output_dir = "";
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = default_experiment_config();
    cfg.model.input_dim = 10; // dataset generates 24 features
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("input_dim") != std::string::npos);
    }
}

TEST_CASE("config hash tracks semantics and ignores the output directory") {
    const ExperimentConfig base = default_experiment_config();
    const std::string h = config_hash(base);
    CHECK(h.size() == 16);
    CHECK(config_hash(default_experiment_config()) == h);

    ExperimentConfig moved = base;
    moved.output_dir = "somewhere/else";
    CHECK(config_hash(moved) == h);

    ExperimentConfig grid = base;
    grid.lambda_values = {0.0, 0.2};
    CHECK(config_hash(grid) != h);

    ExperimentConfig data = base;
    data.dataset.n += 1;
    CHECK(config_hash(data) != h);

    ExperimentConfig model = base;
    model.model.trunk_widths = {32, 8};
    CHECK(config_hash(model) != h);

    ExperimentConfig train = base;
    train.stage_b.learning_rate *= 2.0;
    CHECK(config_hash(train) != h);
}

TEST_CASE("experiment run writes a complete, auditable output tree") {
    const fs::path dir = fresh_dir("tree");
    const ExperimentConfig cfg = tiny_config(dir.string());
    std::ostringstream log;
    const RunManifest manifest = run_experiment(cfg, &log);

    CHECK(manifest.config_hash == config_hash(cfg));
    CHECK(manifest.output_dir == dir.string());
    CHECK(manifest.wall_clock_seconds > 0.0);
    REQUIRE(manifest.stage_a.size() == 2);
    REQUIRE(manifest.runs.size() == 4); // 2 seeds x 2 lambdas
    CHECK(fs::exists(dir / "manifest.json"));

    for (const StageARecord& rec : manifest.stage_a) {
        CHECK(rec.ok);
        CHECK(fs::exists(dir / rec.checkpoint_path));
        CHECK(fs::exists(dir / rec.history_path));
        const SplitModel model = load_checkpoint((dir / rec.checkpoint_path).string());
        CHECK(model.stage_tag == "stage-a");
    }
    for (const RunRecord& rec : manifest.runs) {
        CHECK(rec.ok);
        CHECK(rec.error.empty());
        CHECK(fs::exists(dir / rec.checkpoint_path));
        CHECK(fs::exists(dir / rec.history_path));
        CHECK(fs::exists(dir / rec.report_path));
        const FairnessReport report = read_report_json((dir / rec.report_path).string());
        validate(report);
        CHECK(rec.group_pcc == report.group_pcc);
        CHECK(rec.accuracy == report.accuracy);
        const SplitModel model = load_checkpoint((dir / rec.checkpoint_path).string());
        CHECK(model.stage_tag == "stage-b");
    }
    CHECK(log.str().find("stage A done") != std::string::npos);

    // every lambda run of a seed keeps that seed's frozen stage-A sections
    for (const StageARecord& arec : manifest.stage_a) {
        const SplitModel a = load_checkpoint((dir / arec.checkpoint_path).string());
        for (const RunRecord& rec : manifest.runs) {
            if (rec.seed != arec.seed) continue;
            const SplitModel b = load_checkpoint((dir / rec.checkpoint_path).string());
            const auto pa = a.parameters();
            const auto pb = b.parameters();
            REQUIRE(pa.size() == pb.size());
            for (std::size_t i = 0; i < pa.size(); ++i) {
                const bool frozen = pa[i]->name.rfind("trunk.", 0) == 0 ||
                                    pa[i]->name.rfind("head_attr.", 0) == 0;
                if (frozen) CHECK(pa[i]->value == pb[i]->value);
            }
        }
    }
}

TEST_CASE("experiment reruns are bit-identical artifact for artifact") {
    const fs::path dir1 = fresh_dir("rerun1");
    const fs::path dir2 = fresh_dir("rerun2");
    ExperimentConfig cfg = tiny_config(dir1.string());
    cfg.seeds = {1};
    const RunManifest m1 = run_experiment(cfg);
    cfg.output_dir = dir2.string();
    const RunManifest m2 = run_experiment(cfg);

    REQUIRE(m1.runs.size() == m2.runs.size());
    for (std::size_t i = 0; i < m1.runs.size(); ++i) {
        CHECK(file_bytes(dir1 / m1.runs[i].report_path) ==
              file_bytes(dir2 / m2.runs[i].report_path));
        CHECK(file_bytes(dir1 / m1.runs[i].checkpoint_path) ==
              file_bytes(dir2 / m2.runs[i].checkpoint_path));
        CHECK(file_bytes(dir1 / m1.runs[i].history_path) ==
              file_bytes(dir2 / m2.runs[i].history_path));
    }
    CHECK(file_bytes(dir1 / m1.stage_a[0].checkpoint_path) ==
          file_bytes(dir2 / m2.stage_a[0].checkpoint_path));
}

TEST_CASE("a single-lambda grid runs but cannot be swept") {
    const fs::path dir = fresh_dir("single");
    ExperimentConfig cfg = tiny_config(dir.string());
    cfg.lambda_values = {0.0};
    cfg.seeds = {1};
    const RunManifest manifest = run_experiment(cfg);
    REQUIRE(manifest.runs.size() == 1);
    CHECK(manifest.runs[0].ok);

    CHECK_THROWS_AS(sweep_lambda(cfg), ConfigError);
}

TEST_CASE("lambda sweep aggregates per-lambda statistics") {
    const fs::path dir = fresh_dir("sweep");
    const ExperimentConfig cfg = tiny_config(dir.string());
    const SweepSummary summary = sweep_lambda(cfg);

    REQUIRE(summary.rows.size() == 4);
    REQUIRE(summary.aggregates.size() == 2);
    CHECK((summary.best_lambda == 0.0 || summary.best_lambda == 1.0));
    for (const SweepAggregate& a : summary.aggregates) {
        CHECK(a.min_group_pcc <= a.mean_group_pcc + 1e-12);
        CHECK(a.mean_group_pcc <= a.max_group_pcc + 1e-12);
        double mean = 0.0;
        std::size_t count = 0;
        for (const SweepRow& r : summary.rows) {
            if (r.lambda == a.lambda) {
                mean += r.group_pcc;
                ++count;
            }
        }
        CHECK(count == 2);
        CHECK(a.mean_group_pcc == doctest::Approx(mean / 2.0).epsilon(1e-12));
    }

    // the improvement flag restates the aggregate comparison
    double mean0 = 0.0, best_mean = -2.0;
    for (const SweepAggregate& a : summary.aggregates) {
        if (a.lambda == 0.0) mean0 = a.mean_group_pcc;
        best_mean = std::max(best_mean, a.mean_group_pcc);
    }
    CHECK(summary.monotone_improvement == (summary.best_lambda != 0.0 && best_mean > mean0));

    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "sweep.json"));
    std::ifstream csv(dir / "sweep.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "lambda,seed,group_pcc,accuracy,final_l_ortho");
}

TEST_CASE("a single-seed sweep collapses range onto the mean") {
    const fs::path dir = fresh_dir("point");
    ExperimentConfig cfg = tiny_config(dir.string());
    cfg.seeds = {4};
    const SweepSummary summary = sweep_lambda(cfg);
    for (const SweepAggregate& a : summary.aggregates) {
        CHECK(a.min_group_pcc == a.mean_group_pcc);
        CHECK(a.max_group_pcc == a.mean_group_pcc);
    }
}

TEST_CASE("csv-backed experiments train on the ingested rows") {
    const fs::path dir = fresh_dir("csvrun");
    DatasetSpec spec = daisee_skew_preset();
    spec.n = 900;
    spec.seed = 12;
    const GroupLabeledDataset ds = generate_task_dataset(spec);
    const fs::path csv = dir / "task.csv";
    export_feature_csv(ds, csv.string());

    ExperimentConfig cfg = tiny_config((dir / "out").string());
    cfg.dataset_csv = csv.string();
    cfg.lambda_values = {0.0};
    cfg.seeds = {1};
    const RunManifest manifest = run_experiment(cfg);
    REQUIRE(manifest.runs.size() == 1);
    CHECK(manifest.runs[0].ok);

    // an unlabeled csv cannot feed task training
    GroupLabeledDataset bare = ds;
    bare.y.clear();
    const fs::path nolabel = dir / "nolabel.csv";
    export_feature_csv(bare, nolabel.string());
    cfg.dataset_csv = nolabel.string();
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("histogram rendering is deterministic and validates its input") {
    const fs::path dir = fresh_dir("plots");

    FairnessReport report;
    report.dist_g0 = {0, {0.0, 0.0, 0.77, 0.23}};
    report.dist_g1 = {1, {0.0, 0.0, 0.57, 0.43}};
    report.group_pcc = 0.897;
    report.accuracy = 0.65;
    report.baseline_uniform = 0.25;
    report.baseline_mode = 0.495;
    report.ext_total_variation = 0.2;
    const fs::path rp = dir / "report.json";
    write_report_json(report, rp.string());

    const fs::path svg1 = dir / "a.svg";
    const fs::path svg2 = dir / "b.svg";
    render_histograms(rp.string(), svg1.string());
    render_histograms(rp.string(), svg2.string());
    CHECK(file_bytes(svg1) == file_bytes(svg2));

    std::ifstream in(svg1);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string svg = buf.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("0.770") != std::string::npos); // bar label for group 0 level 2
    CHECK(svg.find("0.430") != std::string::npos); // bar label for group 1 level 3
    CHECK(svg.find("group 1") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{\"dist_g0\": {\"group\": 0}}";
    CHECK_THROWS_AS(render_histograms((dir / "broken.json").string(), svg1.string()),
                    ValidationError);
}
