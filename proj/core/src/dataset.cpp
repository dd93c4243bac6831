#include "aor/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aor/errors.hpp"
#include "aor/rng.hpp"

namespace aor {

namespace {

constexpr std::uint64_t kGeometryTag = 0x47454F4D; // feature geometry stream
constexpr std::uint64_t kSampleTag = 0x53414D50;   // sample stream

void check_dist(const std::array<double, 4>& p, const std::string& name) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0))
            throw ValidationError(name + " has a negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError(name + " does not sum to 1");
}

// Draws `count` unit vectors in R^dim and orthonormalizes them by
// Gram-Schmidt. Keeps the class/group means at fixed pairwise distance so the
// Bayes accuracy of the generated problem does not drift with the seed.
std::vector<std::vector<double>> orthonormal_directions(std::size_t count, std::size_t dim,
                                                        Rng& rng) {
    if (count > dim)
        throw ValidationError("cannot fit " + std::to_string(count) +
                              " orthonormal directions in dimension " + std::to_string(dim));
    std::vector<std::vector<double>> dirs;
    dirs.reserve(count);
    while (dirs.size() < count) {
        std::vector<double> v(dim);
        for (double& x : v)
            x = rng.normal();
        for (const auto& u : dirs) {
            double proj = std::inner_product(v.begin(), v.end(), u.begin(), 0.0);
            for (std::size_t i = 0; i < dim; ++i)
                v[i] -= proj * u[i];
        }
        double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norm < 1e-8)
            continue; // degenerate draw; retry
        for (double& x : v)
            x /= norm;
        dirs.push_back(std::move(v));
    }
    return dirs;
}

struct Geometry {
    std::vector<std::vector<double>> class_dirs; // 4 in R^d_core
    std::vector<std::vector<double>> group_dirs; // 2 in R^d_spur
};

// Geometry depends only on spec.seed, never on a sample-seed override, so a
// task dataset and its external counterpart share the same spurious axes.
Geometry make_geometry(const DatasetSpec& spec) {
    Rng rng(derive_seed(spec.seed, kGeometryTag));
    Geometry geo;
    geo.class_dirs = orthonormal_directions(4, spec.d_core, rng);
    geo.group_dirs = orthonormal_directions(2, spec.d_spur, rng);
    return geo;
}

int sample_level(const std::array<double, 4>& p, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
        acc += p[static_cast<std::size_t>(k)];
        if (u < acc)
            return k;
    }
    return 3;
}

void fill_features(Matrix& X, std::size_t row, const DatasetSpec& spec, const Geometry& geo,
                   int level, int group, double extra_sd, Rng& rng) {
    const auto& cdir = geo.class_dirs[static_cast<std::size_t>(level)];
    const auto& gdir = geo.group_dirs[static_cast<std::size_t>(group)];
    std::size_t col = 0;
    for (std::size_t i = 0; i < spec.d_core; ++i, ++col)
        X.at(row, col) = spec.class_separation * cdir[i] + spec.noise_sd * rng.normal();
    for (std::size_t i = 0; i < spec.d_spur; ++i, ++col)
        X.at(row, col) = spec.group_separation * gdir[i] + spec.noise_sd * rng.normal();
    for (std::size_t i = 0; i < spec.d_noise; ++i, ++col)
        X.at(row, col) = spec.noise_sd * rng.normal();
    if (extra_sd > 0.0)
        for (std::size_t c = 0; c < X.cols; ++c)
            X.at(row, c) += extra_sd * rng.normal();
}

} // namespace

void validate(const GroupLabeledDataset& ds) {
    if (ds.g.size() != ds.X.rows)
        throw ValidationError("group labels: expected " + std::to_string(ds.X.rows) + " entries, got " +
                              std::to_string(ds.g.size()));
    if (!ds.y.empty() && ds.y.size() != ds.X.rows)
        throw ValidationError("task labels: expected " + std::to_string(ds.X.rows) + " entries, got " +
                              std::to_string(ds.y.size()));
    for (std::size_t i = 0; i < ds.g.size(); ++i)
        if (ds.g[i] != 0 && ds.g[i] != 1)
            throw ValidationError("group label out of range at row " + std::to_string(i));
    for (std::size_t i = 0; i < ds.y.size(); ++i)
        if (ds.y[i] < 0 || ds.y[i] > 3)
            throw ValidationError("task label out of range at row " + std::to_string(i));
    if (!ds.X.all_finite())
        throw ValidationError("feature matrix contains a non-finite value");
}

void validate(const DatasetSpec& spec) {
    if (spec.n == 0)
        throw ValidationError("n must be positive");
    if (!(spec.group1_fraction > 0.0 && spec.group1_fraction < 1.0))
        throw ValidationError("group1_fraction must lie strictly between 0 and 1");
    check_dist(spec.label_dist_g0, "label_dist_g0");
    check_dist(spec.label_dist_g1, "label_dist_g1");
    if (spec.d_core < 4)
        throw ValidationError("d_core must be at least 4 to separate 4 levels");
    if (spec.d_spur < 2)
        throw ValidationError("d_spur must be at least 2 to separate 2 groups");
    if (!(spec.noise_sd > 0.0))
        throw ValidationError("noise_sd must be positive");
    if (spec.class_separation < 0.0 || spec.group_separation < 0.0)
        throw ValidationError("separations must be non-negative");
}

DatasetSpec daisee_skew_preset() {
    DatasetSpec spec;
    spec.n = 40000;
    spec.group1_fraction = 1.0 / 3.3;
    spec.label_dist_g0 = {0.02, 0.06, 0.55, 0.37};
    spec.label_dist_g1 = {0.01, 0.02, 0.37, 0.60};
    spec.d_core = 12;
    spec.d_spur = 8;
    spec.d_noise = 4;
    spec.class_separation = 1.0;
    spec.group_separation = 2.0;
    spec.noise_sd = 1.0;
    return spec;
}

GroupLabeledDataset generate_task_dataset(const DatasetSpec& spec,
                                          std::optional<std::uint64_t> seed_override) {
    validate(spec);
    const Geometry geo = make_geometry(spec);
    const std::uint64_t sample_seed = seed_override.value_or(spec.seed);
    Rng rng(derive_seed(sample_seed, kSampleTag));

    GroupLabeledDataset ds;
    ds.X = Matrix(spec.n, spec.feature_dim());
    ds.y.resize(spec.n);
    ds.g.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const int group = rng.uniform() < spec.group1_fraction ? 1 : 0;
        const auto& dist = group == 1 ? spec.label_dist_g1 : spec.label_dist_g0;
        const int level = sample_level(dist, rng);
        ds.g[i] = group;
        ds.y[i] = level;
        fill_features(ds.X, i, spec, geo, level, group, 0.0, rng);
    }
    return ds;
}

GroupLabeledDataset generate_external_dataset(const DatasetSpec& spec, std::size_t n_ext,
                                              double domain_shift_sd, std::uint64_t seed) {
    validate(spec);
    if (n_ext == 0)
        throw ValidationError("n_ext must be positive");
    if (domain_shift_sd < 0.0)
        throw ValidationError("domain_shift_sd must be non-negative");
    const Geometry geo = make_geometry(spec);
    Rng rng(derive_seed(seed, kSampleTag));

    GroupLabeledDataset ds;
    ds.X = Matrix(n_ext, spec.feature_dim());
    ds.g.resize(n_ext);
    for (std::size_t i = 0; i < n_ext; ++i) {
        const int group = rng.uniform() < 0.5 ? 1 : 0;
        const int latent_level = static_cast<int>(rng.uniform_index(4));
        ds.g[i] = group;
        fill_features(ds.X, i, spec, geo, latent_level, group, domain_shift_sd, rng);
    }
    return ds;
}

GroupLabeledDataset take_rows(const GroupLabeledDataset& ds, const std::vector<std::size_t>& idx) {
    GroupLabeledDataset out;
    out.X = Matrix(idx.size(), ds.X.cols);
    out.g.resize(idx.size());
    if (ds.has_task_labels())
        out.y.resize(idx.size());
    out.level_names = ds.level_names;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const std::size_t src = idx[r];
        if (src >= ds.size())
            throw ValidationError("row index " + std::to_string(src) + " out of range");
        for (std::size_t c = 0; c < ds.X.cols; ++c)
            out.X.at(r, c) = ds.X.at(src, c);
        out.g[r] = ds.g[src];
        if (ds.has_task_labels())
            out.y[r] = ds.y[src];
    }
    return out;
}

GroupLabeledDataset uniform_subset(const GroupLabeledDataset& ds, std::size_t per_cell,
                                   std::uint64_t seed) {
    validate(ds);
    if (!ds.has_task_labels())
        throw ValidationError("uniform subset requires task labels");
    if (per_cell == 0)
        throw ValidationError("per_cell must be positive");

    std::array<std::vector<std::size_t>, 8> cells;
    for (std::size_t i = 0; i < ds.size(); ++i)
        cells[static_cast<std::size_t>(ds.g[i] * 4 + ds.y[i])].push_back(i);

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(per_cell * 8);
    for (int group = 0; group <= 1; ++group) {
        for (int level = 0; level <= 3; ++level) {
            auto& cell = cells[static_cast<std::size_t>(group * 4 + level)];
            if (cell.size() < per_cell)
                throw ValidationError("cell (group=" + std::to_string(group) +
                                      ", level=" + std::to_string(level) + ") has only " +
                                      std::to_string(cell.size()) + " samples, need " +
                                      std::to_string(per_cell));
            rng.shuffle(cell);
            chosen.insert(chosen.end(), cell.begin(), cell.begin() + static_cast<long>(per_cell));
        }
    }
    return take_rows(ds, chosen);
}

std::pair<GroupLabeledDataset, GroupLabeledDataset> split_train_val(const GroupLabeledDataset& ds,
                                                                    double val_fraction,
                                                                    std::uint64_t seed) {
    validate(ds);
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw ValidationError("val_fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(ds.size())));
    if (n_val == 0 || n_val >= ds.size())
        throw ValidationError("val_fraction leaves an empty split");
    std::vector<std::size_t> train_idx(idx.begin(), idx.end() - static_cast<long>(n_val));
    std::vector<std::size_t> val_idx(idx.end() - static_cast<long>(n_val), idx.end());
    return {take_rows(ds, train_idx), take_rows(ds, val_idx)};
}

std::pair<std::array<double, 4>, std::array<double, 4>> group_label_distributions(
    const GroupLabeledDataset& ds) {
    if (!ds.has_task_labels())
        throw ValidationError("label distributions require task labels");
    std::array<double, 4> d0{};
    std::array<double, 4> d1{};
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.g[i] == 0) {
            d0[static_cast<std::size_t>(ds.y[i])] += 1.0;
            ++n0;
        } else {
            d1[static_cast<std::size_t>(ds.y[i])] += 1.0;
            ++n1;
        }
    }
    if (n0 == 0 || n1 == 0)
        throw DegenerateError("a group has no samples");
    for (auto& v : d0)
        v /= static_cast<double>(n0);
    for (auto& v : d1)
        v /= static_cast<double>(n1);
    return {d0, d1};
}

} // namespace aor
