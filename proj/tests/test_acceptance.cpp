// Acceptance gate: ten release criteria, one [PASS]/[FAIL] line each.
// Exits nonzero when any criterion fails. Intentionally not a doctest
// binary so the output stays a flat, greppable checklist.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aor/checkpoint.hpp"
#include "aor/dataset.hpp"
#include "aor/errors.hpp"
#include "aor/experiment.hpp"
#include "aor/fairness.hpp"
#include "aor/layers.hpp"
#include "aor/matrix.hpp"
#include "aor/ortho.hpp"
#include "aor/rng.hpp"
#include "aor/split_model.hpp"
#include "aor/train.hpp"

namespace fs = std::filesystem;
using namespace aor;

namespace {

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

fs::path work_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "aor_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::vector<char> file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool same_bits(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(lo, hi);
    return m;
}

double rel_err(double analytic, double numeric) {
    return std::abs(analytic - numeric) /
           std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

// FD at a subgradient kink is meaningless, so random draws are retried until
// every relu input and every cross-correlation entry clears a margin that is
// orders of magnitude above the step h.
bool stack_clears_relu_margin(const LayerStack& stack, const Matrix& input, double margin) {
    const std::vector<Matrix> acts = forward(stack, input);
    for (std::size_t i = 0; i < stack.size(); ++i) {
        if (stack[i].kind != LayerKind::Relu) continue;
        for (double v : acts[i].data) {
            if (std::abs(v) < margin) return false;
        }
    }
    return true;
}

bool min_abs_above(const Matrix& m, double margin) {
    for (double v : m.data) {
        if (std::abs(v) < margin) return false;
    }
    return true;
}

// --- criterion 1: prediction distribution correlation fixture -------------

bool c01_pearson_fixture(std::string& detail) {
    const std::vector<double> u{0.0, 0.0, 0.77, 0.23};
    const std::vector<double> v{0.0, 0.0, 0.57, 0.43};
    const double r = pearson(u, v);
    detail = fmt("pearson %.6f, expected 0.897 within 0.001", r);
    return std::abs(r - 0.897) <= 0.001;
}

// --- criterion 2: gradients vs finite differences on random models --------

bool c02_random_model_gradients(std::string& detail) {
    Rng meta(20260816);
    auto draw_width = [&meta]() -> std::size_t {
        const double u = meta.uniform();
        return 2 + static_cast<std::size_t>(62.0 * u * u * u); // 2..64, biased small
    };
    const double h = 1e-6;
    const double margin = 1e-4;
    double worst = 0.0;
    std::size_t entries_checked = 0;
    int penalized_models = 0;

    for (int i = 0; i < 50; ++i) {
        SplitModel model;
        Matrix X;
        double lam = 0.0;
        bool clear = false;
        for (int attempt = 0; attempt < 500 && !clear; ++attempt) {
            SplitModelConfig mc;
            mc.input_dim = 2 + meta.uniform_index(7);
            mc.trunk_widths.assign(1 + meta.uniform_index(2), 0);
            for (std::size_t& w : mc.trunk_widths) w = draw_width();
            mc.head_task_widths =
                meta.uniform_index(2) == 0
                    ? std::vector<std::size_t>{4}
                    : std::vector<std::size_t>{draw_width(), 4};
            mc.head_attr_widths =
                meta.uniform_index(2) == 0
                    ? std::vector<std::size_t>{2}
                    : std::vector<std::size_t>{draw_width(), 2};
            mc.seed = static_cast<std::uint64_t>(1000 * i + 7919 * attempt + 17);
            model = build_split_model(mc);
            X = random_matrix(meta, 5, mc.input_dim, -1.5, 1.5);
            lam = (i % 4 == 0) ? 0.0 : meta.uniform(0.05, 3.0);

            const std::vector<Matrix> trunk_acts = forward(model.trunk, X);
            const Matrix& feat = trunk_acts.back();
            clear = stack_clears_relu_margin(model.trunk, X, margin) &&
                    stack_clears_relu_margin(model.head_task, feat, margin) &&
                    stack_clears_relu_margin(model.head_attr, feat, margin);
            if (clear && lam > 0.0) {
                const Matrix cross = matmul_at_b(head_first_layer_weights(model, Head::Task),
                                                 head_first_layer_weights(model, Head::Attr));
                clear = min_abs_above(cross, margin);
            }
        }
        if (!clear) {
            detail = fmt("model %d: no kink-free draw in 500 attempts", i);
            return false;
        }
        if (lam > 0.0) ++penalized_models;

        std::vector<int> y(X.rows);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = static_cast<int>(j % 4);
        const Matrix Y = one_hot(y, 4);

        model.zero_grads();
        total_loss(model, X, Y, lam);
        std::vector<Parameter*> params = model.parameters();
        std::vector<std::vector<double>> analytic;
        analytic.reserve(params.size());
        for (const Parameter* p : params) analytic.push_back(p->grad.data);

        for (std::size_t pi = 0; pi < params.size(); ++pi) {
            Parameter* p = params[pi];
            for (std::size_t k = 0; k < p->value.data.size(); ++k) {
                const double saved = p->value.data[k];
                p->value.data[k] = saved + h;
                const double f_plus = total_loss(model, X, Y, lam).total;
                p->value.data[k] = saved - h;
                const double f_minus = total_loss(model, X, Y, lam).total;
                p->value.data[k] = saved;
                const double numeric = (f_plus - f_minus) / (2.0 * h);
                worst = std::max(worst, rel_err(analytic[pi][k], numeric));
                ++entries_checked;
            }
        }
    }
    detail = fmt("50 models, %zu entries, %d with active penalty, worst rel err %.3g",
                 entries_checked, penalized_models, worst);
    return worst <= 1e-4;
}

// --- criterion 3: decorrelation penalty identities -------------------------

bool c03_penalty_identities(std::string& detail) {
    Rng rng(31);

    double worst_scale = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t d = 3 + k % 4;
        const Matrix w1 = random_matrix(rng, d, 1 + k % 3, -1.0, 1.0);
        const Matrix w2 = random_matrix(rng, d, 1 + (k + 1) % 3, -1.0, 1.0);
        const double a = rng.uniform(0.1, 10.0);
        const double b = rng.uniform(0.1, 10.0);
        const double base = l_ortho(w1, w2).l_ortho;
        const double scaled = l_ortho(scale(w1, a), scale(w2, b)).l_ortho;
        worst_scale = std::max(worst_scale, std::abs(scaled - base));
    }
    if (worst_scale >= 1e-12) {
        detail = fmt("scale invariance violated by %.3g", worst_scale);
        return false;
    }

    Matrix wa(4, 2, 0.0);
    wa.at(0, 0) = 1.0;
    wa.at(1, 0) = 2.0;
    wa.at(1, 1) = -1.5;
    Matrix wb(4, 1, 0.0);
    wb.at(2, 0) = 0.7;
    wb.at(3, 0) = 3.0;
    const double ortho_case = l_ortho(wa, wb).l_ortho;
    if (!(std::abs(ortho_case) <= 1e-15)) {
        detail = fmt("orthogonal columns gave %.3g instead of 0", ortho_case);
        return false;
    }

    const Matrix col = Matrix::from_rows({{3.0}, {4.0}});
    const double identical = l_ortho(col, col).l_ortho;
    if (!(std::abs(identical - 1.0) <= 1e-12)) {
        detail = fmt("identical single column gave %.17g instead of 1", identical);
        return false;
    }

    const double h = 1e-6;
    double worst_fd = 0.0;
    for (int pair = 0; pair < 6; ++pair) {
        Matrix w1, w2;
        bool clear = false;
        while (!clear) {
            w1 = random_matrix(rng, 5, 3, -1.0, 1.0);
            w2 = random_matrix(rng, 5, 4, -1.0, 1.0);
            clear = min_abs_above(matmul_at_b(w1, w2), 1e-3);
        }
        const auto [g1, g2] = l_ortho_grad(w1, w2);
        auto fd_all = [&](Matrix& w, const Matrix& g) {
            for (std::size_t k = 0; k < w.data.size(); ++k) {
                const double saved = w.data[k];
                w.data[k] = saved + h;
                const double f_plus = l_ortho(w1, w2).l_ortho;
                w.data[k] = saved - h;
                const double f_minus = l_ortho(w1, w2).l_ortho;
                w.data[k] = saved;
                worst_fd = std::max(worst_fd, rel_err(g.data[k], (f_plus - f_minus) / (2.0 * h)));
            }
        };
        fd_all(w1, g1);
        fd_all(w2, g2);
    }
    detail = fmt("scale drift %.2g, gradient worst rel err %.3g", worst_scale, worst_fd);
    return worst_fd <= 1e-4;
}

// --- criterion 4: preset generator calibration -----------------------------

bool c04_preset_calibration(std::string& detail) {
    DatasetSpec spec = daisee_skew_preset();
    spec.n = 100000;
    const GroupLabeledDataset ds = generate_task_dataset(spec);

    std::array<double, 4> hist{};
    std::size_t n0 = 0;
    for (int level : ds.y) hist[static_cast<std::size_t>(level)] += 1.0;
    for (double& v : hist) v /= static_cast<double>(ds.size());
    for (int g : ds.g) n0 += static_cast<std::size_t>(g == 0);
    const double ratio = static_cast<double>(n0) / static_cast<double>(ds.size() - n0);

    const auto [d0, d1] = group_label_distributions(ds);
    const double pcc = pearson(d0, d1);

    const double mass23 = hist[2] + hist[3];
    detail = fmt("mass{2,3} %.4f, level-2 %.4f, label pcc %.4f, ratio %.4f", mass23, hist[2],
                 pcc, ratio);
    return std::abs(mass23 - 0.935) <= 0.01 && std::abs(hist[2] - 0.495) <= 0.01 &&
           std::abs(pcc - 0.81) <= 0.05 && std::abs(ratio - 2.3) <= 0.05;
}

// --- criterion 5: penalty sweep improves group parity ----------------------

bool c05_mitigation_sweep(std::string& detail) {
    ExperimentConfig cfg = default_experiment_config();
    cfg.output_dir = (work_root() / "c05_sweep").string();
    std::ostringstream log;
    const SweepSummary sweep = sweep_lambda(cfg, &log);

    auto aggregate = [&sweep](double lambda) -> const SweepAggregate* {
        for (const SweepAggregate& a : sweep.aggregates) {
            if (a.lambda == lambda) return &a;
        }
        return nullptr;
    };
    auto row = [&sweep](double lambda, std::uint64_t seed) -> const SweepRow* {
        for (const SweepRow& r : sweep.rows) {
            if (r.lambda == lambda && r.seed == seed) return &r;
        }
        return nullptr;
    };

    const SweepAggregate* zero = aggregate(0.0);
    const SweepAggregate* best = aggregate(sweep.best_lambda);
    if (zero == nullptr || best == nullptr) {
        detail = "sweep aggregates missing the zero or best lambda";
        return false;
    }
    int improved = 0;
    for (std::uint64_t seed : cfg.seeds) {
        const SweepRow* rz = row(0.0, seed);
        const SweepRow* rb = row(sweep.best_lambda, seed);
        if (rz == nullptr || rb == nullptr) {
            detail = fmt("seed %llu missing from the sweep rows",
                         static_cast<unsigned long long>(seed));
            return false;
        }
        improved += rb->group_pcc > rz->group_pcc ? 1 : 0;
    }

    detail = fmt("best lambda %g: mean pcc %.4f vs %.4f at zero, %d/%zu seeds improved",
                 sweep.best_lambda, best->mean_group_pcc, zero->mean_group_pcc, improved,
                 cfg.seeds.size());
    return sweep.best_lambda != 0.0 && best->mean_group_pcc > zero->mean_group_pcc &&
           improved >= 4 && zero->mean_group_pcc < 0.98 &&
           best->mean_group_pcc >= zero->mean_group_pcc + 0.01;
}

// --- criterion 6: stage isolation and zero-penalty equivalence -------------

bool c06_stage_isolation(std::string& detail) {
    const ExperimentConfig defaults = default_experiment_config();
    DatasetSpec spec = defaults.dataset;
    spec.n = 4000;
    spec.seed = 101;

    SplitModelConfig mc = defaults.model;
    mc.seed = 7;
    SplitModel model = build_split_model(mc);

    const GroupLabeledDataset ext =
        generate_external_dataset(spec, 3000, defaults.external.domain_shift_sd, 202);
    TrainingConfig a = defaults.stage_a;
    a.epochs = 6;
    a.seed = 11;
    train_stage_a(model, ext, a);

    const fs::path ckpt = work_root() / "c06_stage_a.aorm";
    save_checkpoint(model, ckpt.string());

    const GroupLabeledDataset task = generate_task_dataset(spec, 303);
    const auto [train_ds, val_ds] = split_train_val(task, 0.2, 404);

    freeze_for_stage_b(model);
    TrainingConfig b = defaults.stage_b;
    b.lambda = 1.0;
    b.epochs = 5;
    b.seed = 12;
    train_stage_b(model, train_ds, val_ds, b);

    SplitModel reference = load_checkpoint(ckpt.string());
    const std::vector<const Parameter*> before =
        static_cast<const SplitModel&>(reference).parameters();
    const std::vector<const Parameter*> after =
        static_cast<const SplitModel&>(model).parameters();
    if (before.size() != after.size()) {
        detail = "parameter count changed across stage B";
        return false;
    }
    std::size_t frozen_params = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        const bool frozen_section = before[i]->name.rfind("trunk.", 0) == 0 ||
                                    before[i]->name.rfind("head_attr.", 0) == 0;
        if (!frozen_section) continue;
        ++frozen_params;
        if (before[i]->name != after[i]->name ||
            !same_bits(before[i]->value, after[i]->value)) {
            detail = fmt("stage B modified %s", before[i]->name.c_str());
            return false;
        }
    }

    // Zero penalty weight must make the staged objective coincide with the
    // plain task cross-entropy, exactly.
    freeze_for_stage_b(reference);
    TrainingConfig b0 = b;
    b0.lambda = 0.0;
    b0.epochs = 3;
    const TrainingHistory hist = train_stage_b(reference, train_ds, val_ds, b0);
    double worst_gap = 0.0;
    for (const EpochRecord& rec : hist) {
        worst_gap = std::max(worst_gap, std::abs(rec.total_loss - rec.l_cls1));
    }

    reference.zero_grads();
    const std::size_t nb = std::min<std::size_t>(64, train_ds.size());
    Matrix Xb(nb, train_ds.X.cols);
    std::vector<int> yb(nb);
    for (std::size_t r = 0; r < nb; ++r) {
        for (std::size_t c = 0; c < train_ds.X.cols; ++c) Xb.at(r, c) = train_ds.X.at(r, c);
        yb[r] = train_ds.y[r];
    }
    const LossBreakdown bd = total_loss(reference, Xb, one_hot(yb, 4), 0.0);
    worst_gap = std::max(worst_gap, std::abs(bd.total - bd.ce));

    const Prediction pred = predict(reference, Xb);
    double manual_ce = 0.0;
    for (std::size_t r = 0; r < nb; ++r) {
        manual_ce -= std::log(std::max(pred.probabilities.at(r, static_cast<std::size_t>(yb[r])),
                                       1e-12));
    }
    manual_ce /= static_cast<double>(nb);

    detail = fmt("%zu frozen params bit-identical, worst |total - ce| %.3g, ce check %.3g",
                 frozen_params, worst_gap, std::abs(manual_ce - bd.ce));
    return frozen_params > 0 && worst_gap <= 1e-15 && std::abs(manual_ce - bd.ce) <= 1e-12;
}

// --- criterion 7: attribute head transfers across the domain shift ---------

bool c07_attribute_transfer(std::string& detail) {
    const ExperimentConfig defaults = default_experiment_config();
    DatasetSpec spec = defaults.dataset;
    spec.seed = 11;

    SplitModelConfig mc = defaults.model;
    mc.seed = 5;
    SplitModel model = build_split_model(mc);

    const GroupLabeledDataset ext = generate_external_dataset(
        spec, defaults.external.n, defaults.external.domain_shift_sd, 21);
    TrainingConfig a = defaults.stage_a;
    a.seed = 31;
    train_stage_a(model, ext, a);

    const GroupLabeledDataset held = generate_task_dataset(spec, 99);
    const double acc = accuracy(predict_attr(model, held.X), held.g);
    detail = fmt("held-out attribute accuracy %.4f, required [0.75, 0.95]", acc);
    return acc >= 0.75 && acc <= 0.95;
}

// --- criterion 8: balanced subset evaluation protocol -----------------------

bool c08_subset_protocol(std::string& detail) {
    DatasetSpec spec = daisee_skew_preset();
    spec.n = 30000;
    spec.seed = 5;
    const GroupLabeledDataset ds = generate_task_dataset(spec);

    const GroupLabeledDataset sub = uniform_subset(ds, 21, 77);
    if (sub.size() != 168) {
        detail = fmt("per_cell 21 produced %zu samples instead of 168", sub.size());
        return false;
    }
    std::array<std::array<std::size_t, 4>, 2> cells{};
    for (std::size_t i = 0; i < sub.size(); ++i) {
        cells[static_cast<std::size_t>(sub.g[i])][static_cast<std::size_t>(sub.y[i])] += 1;
    }
    for (const auto& group_row : cells) {
        for (std::size_t count : group_row) {
            if (count != 21) {
                detail = fmt("a cell holds %zu samples instead of 21", count);
                return false;
            }
        }
    }

    DatasetSpec starved = daisee_skew_preset();
    starved.n = 4000;
    starved.seed = 6;
    starved.label_dist_g1 = {0.0, 0.3, 0.4, 0.3};
    const GroupLabeledDataset empty_cell_ds = generate_task_dataset(starved);
    bool threw = false;
    try {
        uniform_subset(empty_cell_ds, 10, 1);
    } catch (const ValidationError&) {
        threw = true;
    }
    if (!threw) {
        detail = "an empty cell did not trigger the insufficiency error";
        return false;
    }

    SplitModelConfig mc;
    mc.seed = 9;
    const SplitModel model = build_split_model(mc);
    const std::uint64_t seed = 123;
    const SubsetEval eval = uniform_subset_eval(model, ds, 21, 10, seed);
    std::array<double, 4> mean_g0{};
    std::array<double, 4> mean_g1{};
    for (std::uint64_t r = 0; r < 10; ++r) {
        const GroupLabeledDataset rep = uniform_subset(ds, 21, seed + r);
        const Prediction pred = predict(model, rep.X);
        const auto [g0, g1] = group_prediction_distributions(pred.levels, rep.g);
        for (std::size_t k = 0; k < 4; ++k) {
            mean_g0[k] += g0.proportions[k] / 10.0;
            mean_g1[k] += g1.proportions[k] / 10.0;
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(mean_g0[k] - eval.dist_g0.proportions[k]));
        worst = std::max(worst, std::abs(mean_g1[k] - eval.dist_g1.proportions[k]));
    }
    detail = fmt("168 samples, equal cells, deficiency detected, averaging gap %.3g", worst);
    return eval.per_cell == 21 && eval.repeats == 10 && worst <= 1e-12;
}

// --- criterion 9: accuracy baselines ----------------------------------------

bool c09_baselines(std::string& detail) {
    DatasetSpec spec = daisee_skew_preset();
    spec.seed = 55;
    const GroupLabeledDataset ds = generate_task_dataset(spec);
    const Baselines base = baselines(ds);
    detail = fmt("uniform %.17g, mode %.4f at level %d", base.uniform, base.mode,
                 base.mode_level);
    return base.uniform == 0.25 && std::abs(base.mode - 0.495) <= 0.01 && base.mode_level == 2;
}

// --- criterion 10: bitwise reproducibility ----------------------------------

bool c10_reproducibility(std::string& detail) {
    ExperimentConfig cfg = default_experiment_config();
    cfg.dataset.n = 1200;
    cfg.external.n = 600;
    cfg.stage_a.epochs = 2;
    cfg.stage_b.epochs = 2;
    cfg.lambda_values = {0.0, 1.0};
    cfg.seeds = {1};

    const fs::path dir_a = work_root() / "c10_a";
    const fs::path dir_b = work_root() / "c10_b";
    cfg.output_dir = dir_a.string();
    const RunManifest m1 = run_experiment(cfg);
    cfg.output_dir = dir_b.string();
    const RunManifest m2 = run_experiment(cfg);

    std::vector<std::string> rel_paths;
    for (const StageARecord& rec : m1.stage_a) {
        if (!rec.ok) {
            detail = "a stage-A run failed: " + rec.error;
            return false;
        }
        rel_paths.push_back(rec.checkpoint_path);
        rel_paths.push_back(rec.history_path);
    }
    for (const RunRecord& rec : m1.runs) {
        if (!rec.ok) {
            detail = "a run failed: " + rec.error;
            return false;
        }
        rel_paths.push_back(rec.checkpoint_path);
        rel_paths.push_back(rec.history_path);
        rel_paths.push_back(rec.report_path);
    }
    for (const RunRecord& rec : m2.runs) {
        if (!rec.ok) {
            detail = "a rerun failed: " + rec.error;
            return false;
        }
    }
    for (const std::string& rel : rel_paths) {
        if (file_bytes(dir_a / rel) != file_bytes(dir_b / rel)) {
            detail = "artifact differs between identical runs: " + rel;
            return false;
        }
    }

    const fs::path first_ckpt = dir_a / m1.runs.front().checkpoint_path;
    const SplitModel loaded = load_checkpoint(first_ckpt.string());
    const fs::path resaved = work_root() / "c10_resaved.aorm";
    save_checkpoint(loaded, resaved.string());
    if (file_bytes(first_ckpt) != file_bytes(resaved)) {
        detail = "checkpoint save, load, save is not byte-identical";
        return false;
    }

    for (const RunRecord& rec : m1.runs) {
        const FairnessReport report = read_report_json((dir_a / rec.report_path).string());
        validate(report);
    }

    detail = fmt("%zu artifacts byte-identical across reruns, %zu reports schema-valid",
                 rel_paths.size(), m1.runs.size());
    return true;
}

struct Criterion {
    const char* name;
    bool (*fn)(std::string&);
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"prediction distribution correlation fixture", c01_pearson_fixture},
        {"analytic gradients match finite differences on random models",
         c02_random_model_gradients},
        {"decorrelation penalty identities and gradient", c03_penalty_identities},
        {"preset generator hits its calibration targets", c04_preset_calibration},
        {"penalty sweep improves group parity", c05_mitigation_sweep},
        {"stage isolation and zero-penalty equivalence", c06_stage_isolation},
        {"attribute head transfers across the domain shift", c07_attribute_transfer},
        {"balanced subset evaluation protocol", c08_subset_protocol},
        {"accuracy baselines", c09_baselines},
        {"bitwise reproducibility of runs and checkpoints", c10_reproducibility},
    };

    work_root();
    int failures = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        std::string detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = fmt("unexpected exception: %s", e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", index,
                    c.name, detail.c_str(), seconds);
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
