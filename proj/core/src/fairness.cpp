#include "aor/fairness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aor/errors.hpp"
#include "aor/train.hpp"

namespace aor {

namespace {

using nlohmann::json;

void check_labels_present(const GroupLabeledDataset& ds, const std::string& what) {
    if (!ds.has_task_labels())
        throw ContractError(what + " requires task labels");
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw DegenerateError("zero mean saliency vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace

double pearson(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw DimensionError("pearson: length " + std::to_string(u.size()) + " vs " +
                             std::to_string(v.size()));
    if (u.size() < 2)
        throw DimensionError("pearson requires at least 2 entries");
    const double n = static_cast<double>(u.size());
    double mu = 0.0;
    double mv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mu += u[i];
        mv += v[i];
    }
    mu /= n;
    mv /= n;
    double suu = 0.0;
    double svv = 0.0;
    double suv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = u[i] - mu;
        const double dv = v[i] - mv;
        suu += du * du;
        svv += dv * dv;
        suv += du * dv;
    }
    if (suu == 0.0)
        throw DegenerateError("pearson: first vector is constant");
    if (svv == 0.0)
        throw DegenerateError("pearson: second vector is constant");
    return suv / (std::sqrt(suu) * std::sqrt(svv));
}

double pearson(const std::array<double, 4>& u, const std::array<double, 4>& v) {
    return pearson(std::vector<double>(u.begin(), u.end()),
                   std::vector<double>(v.begin(), v.end()));
}

std::pair<GroupDistribution, GroupDistribution> group_prediction_distributions(
    const std::vector<int>& pred_levels, const std::vector<int>& g) {
    if (pred_levels.size() != g.size())
        throw DimensionError("predictions and group labels differ in length");
    std::array<double, 4> c0{};
    std::array<double, 4> c1{};
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < pred_levels.size(); ++i) {
        const int level = pred_levels[i];
        if (level < 0 || level > 3)
            throw ValidationError("predicted level out of range at index " + std::to_string(i));
        if (g[i] == 0) {
            c0[static_cast<std::size_t>(level)] += 1.0;
            ++n0;
        } else {
            c1[static_cast<std::size_t>(level)] += 1.0;
            ++n1;
        }
    }
    if (n0 == 0)
        throw DegenerateError("group 0 has no samples");
    if (n1 == 0)
        throw DegenerateError("group 1 has no samples");
    for (auto& x : c0)
        x /= static_cast<double>(n0);
    for (auto& x : c1)
        x /= static_cast<double>(n1);
    return {GroupDistribution{0, c0}, GroupDistribution{1, c1}};
}

double group_distribution_pcc(const std::vector<int>& pred_levels, const std::vector<int>& g) {
    const auto [d0, d1] = group_prediction_distributions(pred_levels, g);
    return pearson(d0.proportions, d1.proportions);
}

std::array<std::array<double, 2>, 4> f1_table(const std::vector<int>& pred_levels,
                                              const std::vector<int>& true_levels,
                                              const std::vector<int>& g) {
    if (pred_levels.size() != true_levels.size() || pred_levels.size() != g.size())
        throw DimensionError("f1_table inputs differ in length");
    std::array<std::array<double, 2>, 4> table{};
    for (int group = 0; group <= 1; ++group) {
        for (int level = 0; level <= 3; ++level) {
            std::size_t tp = 0;
            std::size_t fp = 0;
            std::size_t fn = 0;
            for (std::size_t i = 0; i < pred_levels.size(); ++i) {
                if (g[i] != group)
                    continue;
                const bool predicted = pred_levels[i] == level;
                const bool actual = true_levels[i] == level;
                if (predicted && actual)
                    ++tp;
                else if (predicted)
                    ++fp;
                else if (actual)
                    ++fn;
            }
            const double denom = static_cast<double>(2 * tp + fp + fn);
            table[static_cast<std::size_t>(level)][static_cast<std::size_t>(group)] =
                denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
        }
    }
    return table;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw DimensionError("accuracy inputs differ in length");
    if (pred.empty())
        throw DimensionError("accuracy of an empty sequence");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == truth[i])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

Baselines baselines(const GroupLabeledDataset& ds) {
    check_labels_present(ds, "baselines");
    std::array<double, 4> freq{};
    for (int level : ds.y)
        freq[static_cast<std::size_t>(level)] += 1.0;
    for (auto& f : freq)
        f /= static_cast<double>(ds.y.size());
    Baselines b;
    b.uniform = 0.25;
    b.mode_level = 0;
    for (int level = 1; level <= 3; ++level)
        if (freq[static_cast<std::size_t>(level)] > freq[static_cast<std::size_t>(b.mode_level)])
            b.mode_level = level;
    b.mode = freq[static_cast<std::size_t>(b.mode_level)];
    return b;
}

SubsetEval uniform_subset_eval(const SplitModel& model, const GroupLabeledDataset& ds,
                               std::size_t per_cell, std::size_t repeats, std::uint64_t seed) {
    check_labels_present(ds, "uniform_subset_eval");
    if (repeats == 0)
        throw ValidationError("repeats must be positive");
    std::array<double, 4> acc0{};
    std::array<double, 4> acc1{};
    for (std::size_t r = 0; r < repeats; ++r) {
        const GroupLabeledDataset subset = uniform_subset(ds, per_cell, seed + r);
        const auto levels = predict(model, subset.X).levels;
        const auto [d0, d1] = group_prediction_distributions(levels, subset.g);
        for (std::size_t k = 0; k < 4; ++k) {
            acc0[k] += d0.proportions[k];
            acc1[k] += d1.proportions[k];
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        acc0[k] /= static_cast<double>(repeats);
        acc1[k] /= static_cast<double>(repeats);
    }
    return {per_cell, repeats, GroupDistribution{0, acc0}, GroupDistribution{1, acc1}};
}

SaliencyDivergence group_saliency_divergence(const SplitModel& model,
                                             const GroupLabeledDataset& ds,
                                             std::size_t sample_cap) {
    validate(ds);
    if (sample_cap == 0)
        throw ValidationError("sample_cap must be positive");

    std::vector<std::size_t> take;
    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto& c = counts[static_cast<std::size_t>(ds.g[i])];
        if (c < sample_cap) {
            take.push_back(i);
            ++c;
        }
    }
    if (counts[0] == 0)
        throw DegenerateError("group 0 has no samples");
    if (counts[1] == 0)
        throw DegenerateError("group 1 has no samples");

    const GroupLabeledDataset sub = take_rows(ds, take);

    // Grad writes require mutable stacks; copies keep the model untouched
    // (param grads are skipped anyway).
    LayerStack trunk = model.trunk;
    LayerStack head = model.head_task;
    const auto trunk_acts = forward(trunk, sub.X);
    const auto head_acts = forward(head, trunk_acts.back());
    const Matrix& logits = head_acts.back();
    const auto levels = argmax_rows(logits);

    Matrix upstream(logits.rows, logits.cols);
    for (std::size_t r = 0; r < upstream.rows; ++r)
        upstream.at(r, static_cast<std::size_t>(levels[r])) = 1.0;

    const BackwardOptions opts{false, true};
    const Matrix head_in_grad = backward(head, head_acts, upstream, opts);
    const Matrix saliency = backward(trunk, trunk_acts, head_in_grad, opts);

    SaliencyDivergence out;
    out.mean_saliency_g0.assign(saliency.cols, 0.0);
    out.mean_saliency_g1.assign(saliency.cols, 0.0);
    for (std::size_t r = 0; r < saliency.rows; ++r) {
        auto& mean = sub.g[r] == 0 ? out.mean_saliency_g0 : out.mean_saliency_g1;
        for (std::size_t c = 0; c < saliency.cols; ++c)
            mean[c] += saliency.at(r, c);
    }
    for (auto& v : out.mean_saliency_g0)
        v /= static_cast<double>(counts[0]);
    for (auto& v : out.mean_saliency_g1)
        v /= static_cast<double>(counts[1]);
    out.cosine_similarity = cosine(out.mean_saliency_g0, out.mean_saliency_g1);
    return out;
}

namespace {

void check_distribution(const GroupDistribution& dist, const std::string& name) {
    double sum = 0.0;
    for (double p : dist.proportions) {
        if (!(p >= 0.0))
            throw ValidationError(name + " has a negative proportion");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError(name + " proportions sum to " + std::to_string(sum));
    if (dist.group != 0 && dist.group != 1)
        throw ValidationError(name + " group must be 0 or 1");
}

} // namespace

void validate(const FairnessReport& report) {
    check_distribution(report.dist_g0, "dist_g0");
    check_distribution(report.dist_g1, "dist_g1");
    if (!(report.group_pcc >= -1.0 - 1e-12 && report.group_pcc <= 1.0 + 1e-12))
        throw ValidationError("group_pcc outside [-1, 1]");
    for (const auto& row : report.f1)
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("f1 entry outside [0, 1]");
    if (!(report.accuracy >= 0.0 && report.accuracy <= 1.0))
        throw ValidationError("accuracy outside [0, 1]");
    if (report.baseline_uniform != 0.25)
        throw ValidationError("baseline_uniform must be exactly 0.25");
    if (!(report.baseline_mode >= 0.25 && report.baseline_mode <= 1.0))
        throw ValidationError("baseline_mode outside [0.25, 1]");
    if (!(report.ext_total_variation >= 0.0 && report.ext_total_variation <= 1.0))
        throw ValidationError("ext_total_variation outside [0, 1]");
    if (report.uniform_subset_eval) {
        const SubsetEval& se = *report.uniform_subset_eval;
        if (se.per_cell == 0 || se.repeats == 0)
            throw ValidationError("uniform_subset_eval counts must be positive");
        check_distribution(se.dist_g0, "uniform_subset_eval.dist_g0");
        check_distribution(se.dist_g1, "uniform_subset_eval.dist_g1");
    }
}

FairnessReport evaluate_model(const SplitModel& model, const GroupLabeledDataset& ds,
                              const std::optional<SubsetEvalParams>& subset) {
    check_labels_present(ds, "evaluate_model");
    validate(ds);

    const auto levels = predict(model, ds.X).levels;
    const auto [d0, d1] = group_prediction_distributions(levels, ds.g);
    const Baselines base = baselines(ds);

    FairnessReport report;
    report.dist_g0 = d0;
    report.dist_g1 = d1;
    report.group_pcc = pearson(d0.proportions, d1.proportions);
    report.f1 = f1_table(levels, ds.y, ds.g);
    report.accuracy = accuracy(levels, ds.y);
    report.baseline_uniform = base.uniform;
    report.baseline_mode = base.mode;
    double tv = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        tv += std::abs(d0.proportions[k] - d1.proportions[k]);
    report.ext_total_variation = 0.5 * tv;

    if (subset) {
        try {
            report.uniform_subset_eval =
                uniform_subset_eval(model, ds, subset->per_cell, subset->repeats, subset->seed);
        } catch (const ValidationError&) {
            // a cell is short of per_cell samples; leave the field absent
        }
    }
    validate(report);
    return report;
}

namespace {

json distribution_to_json(const GroupDistribution& dist) {
    return json{{"group", dist.group}, {"proportions", dist.proportions}};
}

const json& require_field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object())
        throw ValidationError("field '" + path + "' must be an object");
    auto it = j.find(key);
    if (it == j.end())
        throw ValidationError("missing field '" + (path.empty() ? std::string(key)
                                                                : path + "." + key) +
                              "'");
    return *it;
}

double require_number(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number())
        throw ValidationError("field '" + (path.empty() ? std::string(key) : path + "." + key) +
                              "' must be a number");
    return v.get<double>();
}

GroupDistribution distribution_from_json(const json& j, const std::string& path) {
    GroupDistribution dist;
    const json& group = require_field(j, "group", path);
    if (!group.is_number_integer())
        throw ValidationError("field '" + path + ".group' must be an integer");
    dist.group = group.get<int>();
    const json& props = require_field(j, "proportions", path);
    if (!props.is_array() || props.size() != 4)
        throw ValidationError("field '" + path + ".proportions' must be an array of 4 numbers");
    for (std::size_t k = 0; k < 4; ++k) {
        if (!props[k].is_number())
            throw ValidationError("field '" + path + ".proportions' must be an array of 4 numbers");
        dist.proportions[k] = props[k].get<double>();
    }
    return dist;
}

} // namespace

std::string report_to_json(const FairnessReport& report) {
    json j;
    j["dist_g0"] = distribution_to_json(report.dist_g0);
    j["dist_g1"] = distribution_to_json(report.dist_g1);
    j["group_pcc"] = report.group_pcc;
    j["f1"] = report.f1;
    j["accuracy"] = report.accuracy;
    j["baseline_uniform"] = report.baseline_uniform;
    j["baseline_mode"] = report.baseline_mode;
    if (report.uniform_subset_eval) {
        const SubsetEval& se = *report.uniform_subset_eval;
        j["uniform_subset_eval"] = json{{"per_cell", se.per_cell},
                                        {"repeats", se.repeats},
                                        {"dist_g0", distribution_to_json(se.dist_g0)},
                                        {"dist_g1", distribution_to_json(se.dist_g1)}};
    } else {
        j["uniform_subset_eval"] = nullptr;
    }
    j["ext_total_variation"] = report.ext_total_variation;
    return j.dump(2) + "\n";
}

FairnessReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ValidationError("report root must be an object");

    FairnessReport report;
    report.dist_g0 = distribution_from_json(require_field(j, "dist_g0", ""), "dist_g0");
    report.dist_g1 = distribution_from_json(require_field(j, "dist_g1", ""), "dist_g1");
    report.group_pcc = require_number(j, "group_pcc", "");
    const json& f1 = require_field(j, "f1", "");
    if (!f1.is_array() || f1.size() != 4)
        throw ValidationError("field 'f1' must be a 4x2 array");
    for (std::size_t level = 0; level < 4; ++level) {
        if (!f1[level].is_array() || f1[level].size() != 2)
            throw ValidationError("field 'f1' must be a 4x2 array");
        for (std::size_t group = 0; group < 2; ++group) {
            if (!f1[level][group].is_number())
                throw ValidationError("field 'f1' must contain numbers");
            report.f1[level][group] = f1[level][group].get<double>();
        }
    }
    report.accuracy = require_number(j, "accuracy", "");
    report.baseline_uniform = require_number(j, "baseline_uniform", "");
    report.baseline_mode = require_number(j, "baseline_mode", "");
    const json& subset = require_field(j, "uniform_subset_eval", "");
    if (!subset.is_null()) {
        SubsetEval se;
        const json& per_cell = require_field(subset, "per_cell", "uniform_subset_eval");
        const json& repeats = require_field(subset, "repeats", "uniform_subset_eval");
        if (!per_cell.is_number_unsigned() || !repeats.is_number_unsigned())
            throw ValidationError("field 'uniform_subset_eval' counts must be non-negative integers");
        se.per_cell = per_cell.get<std::size_t>();
        se.repeats = repeats.get<std::size_t>();
        se.dist_g0 = distribution_from_json(require_field(subset, "dist_g0", "uniform_subset_eval"),
                                            "uniform_subset_eval.dist_g0");
        se.dist_g1 = distribution_from_json(require_field(subset, "dist_g1", "uniform_subset_eval"),
                                            "uniform_subset_eval.dist_g1");
        report.uniform_subset_eval = se;
    }
    report.ext_total_variation = require_number(j, "ext_total_variation", "");
    validate(report);
    return report;
}

void write_report_json(const FairnessReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << report_to_json(report);
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

FairnessReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

void write_f1_csv(const FairnessReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << "level,f1_g0,f1_g1\n";
    char buf[128];
    for (std::size_t level = 0; level < 4; ++level) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", level, report.f1[level][0],
                      report.f1[level][1]);
        out << buf;
    }
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace aor
