#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aor/checkpoint.hpp"
#include "aor/csv_io.hpp"
#include "aor/errors.hpp"
#include "aor/experiment.hpp"
#include "aor/fairness.hpp"
#include "aor/rng.hpp"
#include "aor/version.hpp"

namespace {

aor::ExperimentConfig load_or_default(const std::string& path) {
    return path.empty() ? aor::default_experiment_config() : aor::load_experiment_config(path);
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw aor::IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::size_t count_failures(const aor::RunManifest& manifest) {
    std::size_t failed = 0;
    for (const auto& r : manifest.stage_a)
        if (!r.ok)
            ++failed;
    for (const auto& r : manifest.runs)
        if (!r.ok)
            ++failed;
    return failed;
}

int run(int argc, char** argv) {
    CLI::App app{"staged two-head training with an attribute-orthogonality penalty"};
    app.set_version_flag("--version", aor::kVersion);
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string gen_config;
    std::string gen_out;
    std::optional<std::uint64_t> gen_seed;
    CLI::App* gen = app.add_subcommand("gen-data", "write task.csv and external.csv");
    gen->add_option("--config", gen_config, "config file (TOML-style or JSON)");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", gen_seed, "override the dataset seed");

    std::string train_config;
    std::string train_out;
    std::optional<std::uint64_t> train_seed;
    CLI::App* train = app.add_subcommand("train", "run the staged (seed x lambda) grid");
    train->add_option("--config", train_config, "config file (TOML-style or JSON)");
    train->add_option("--out", train_out, "output directory (overrides config output_dir)");
    train->add_option("--seed", train_seed, "run a single seed instead of the config grid");

    std::string sweep_config;
    std::string sweep_out;
    std::optional<std::uint64_t> sweep_seed;
    CLI::App* sweep = app.add_subcommand("sweep", "run the grid and aggregate per lambda");
    sweep->add_option("--config", sweep_config, "config file (TOML-style or JSON)");
    sweep->add_option("--out", sweep_out, "output directory (overrides config output_dir)");
    sweep->add_option("--seed", sweep_seed, "run a single seed instead of the config grid");

    std::string eval_ckpt;
    std::string eval_config;
    std::string eval_out;
    std::optional<std::uint64_t> eval_seed;
    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on the val split");
    evaluate->add_option("checkpoint", eval_ckpt, "model checkpoint (.aorm)")->required();
    evaluate->add_option("--config", eval_config, "config file (TOML-style or JSON)");
    evaluate->add_option("--out", eval_out, "output directory")->required();
    evaluate->add_option("--seed", eval_seed, "data seed (default: first config seed)");

    std::string plot_report;
    std::string plot_out;
    CLI::App* plot = app.add_subcommand("plot", "render report histograms to SVG");
    plot->add_option("report", plot_report, "report.json to plot")->required();
    plot->add_option("--out", plot_out, "output directory")->required();

    std::string vc_config;
    CLI::App* vc = app.add_subcommand("validate-config", "parse and validate a config file");
    vc->add_option("--config", vc_config, "config file (TOML-style or JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    std::ostream* log = quiet ? nullptr : &std::cout;

    if (gen->parsed()) {
        aor::ExperimentConfig cfg = load_or_default(gen_config);
        if (gen_seed)
            cfg.dataset.seed = *gen_seed;
        make_out_dir(gen_out);
        const auto task = aor::generate_task_dataset(cfg.dataset);
        const auto external = aor::generate_external_dataset(
            cfg.dataset, cfg.external.n, cfg.external.domain_shift_sd,
            aor::derive_seed(cfg.dataset.seed, aor::seed_tags::external));
        aor::export_feature_csv(task, gen_out + "/task.csv");
        aor::export_feature_csv(external, gen_out + "/external.csv");
        if (log)
            *log << "wrote " << task.size() << " task rows and " << external.size()
                 << " external rows to " << gen_out << "\n";
        return 0;
    }

    if (train->parsed() || sweep->parsed()) {
        const bool sweeping = sweep->parsed();
        aor::ExperimentConfig cfg = load_or_default(sweeping ? sweep_config : train_config);
        const std::string& out_override = sweeping ? sweep_out : train_out;
        if (!out_override.empty())
            cfg.output_dir = out_override;
        const auto& seed_override = sweeping ? sweep_seed : train_seed;
        if (seed_override)
            cfg.seeds = {*seed_override};

        std::size_t failed = 0;
        if (sweeping) {
            const aor::SweepSummary summary = aor::sweep_lambda(cfg, log);
            if (log)
                *log << "best lambda " << summary.best_lambda
                     << (summary.monotone_improvement ? " (improves on lambda=0)" : "") << "\n";
        } else {
            failed = count_failures(aor::run_experiment(cfg, log));
        }
        if (failed > 0) {
            std::cerr << failed << " run(s) failed; see " << cfg.output_dir << "/manifest.json\n";
            return 2;
        }
        return 0;
    }

    if (evaluate->parsed()) {
        const aor::ExperimentConfig cfg = load_or_default(eval_config);
        const aor::SplitModel model = aor::load_checkpoint(eval_ckpt);
        const std::uint64_t seed = eval_seed ? *eval_seed : cfg.seeds.front();

        aor::GroupLabeledDataset task_ds;
        if (cfg.dataset_csv) {
            task_ds = aor::ingest_feature_csv(*cfg.dataset_csv);
        } else {
            aor::DatasetSpec spec = cfg.dataset;
            spec.seed = aor::derive_seed(seed, aor::seed_tags::data);
            task_ds = aor::generate_task_dataset(spec);
        }
        const auto [train_split, val_split] =
            aor::split_train_val(task_ds, 0.2, aor::derive_seed(seed, aor::seed_tags::split));
        (void)train_split;

        aor::SubsetEvalParams subset;
        subset.seed = aor::derive_seed(seed, aor::seed_tags::subset);
        const aor::FairnessReport report = aor::evaluate_model(model, val_split, subset);
        make_out_dir(eval_out);
        aor::write_report_json(report, eval_out + "/report.json");
        aor::write_f1_csv(report, eval_out + "/f1.csv");
        if (log)
            *log << "group_pcc " << report.group_pcc << ", accuracy " << report.accuracy
                 << " -> " << eval_out << "/report.json\n";
        return 0;
    }

    if (plot->parsed()) {
        make_out_dir(plot_out);
        aor::render_histograms(plot_report, plot_out + "/histogram.svg");
        if (log)
            *log << "wrote " << plot_out << "/histogram.svg\n";
        return 0;
    }

    if (vc->parsed()) {
        const aor::ExperimentConfig cfg = aor::load_experiment_config(vc_config);
        std::cout << "config ok, hash " << aor::config_hash(cfg) << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const aor::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const aor::CsvError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const aor::CheckpointError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const aor::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
