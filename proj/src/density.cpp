#include "collapse/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace collapse {

namespace {

// Gaussian kernels decay below 1e-14 of the peak beyond 8 bandwidths;
// points outside contribute nothing at the tolerances used here.
constexpr double kKernelCutoff = 8.0;

// Type-7 quantile (linear interpolation) on sorted data.
double quantile_sorted(std::span<const double> sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double sample_std(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace

void validate(const GridSpec& grid) {
    if (!(grid.min < grid.max))
        throw ConfigError("grid min must be below max");
    if (grid.n_points < 64)
        throw ConfigError("grid n_points must be >= 64 (got " + std::to_string(grid.n_points) + ")");
}

void validate(const KdeSpec& spec) {
    if (spec.rule == BandwidthRule::Fixed && !(spec.fixed_h > 0.0))
        throw ConfigError("fixed kde bandwidth must be > 0");
}

double grid_integral(const GriddedPdf& pdf) {
    const double step = pdf.grid.step();
    double sum = 0.0;
    for (double d : pdf.densities) sum += d;
    sum -= 0.5 * (pdf.densities.front() + pdf.densities.back());
    return sum * step;
}

void normalize(GriddedPdf& pdf) {
    const double mass = grid_integral(pdf);
    if (!(mass > 0.0))
        throw UsageError("cannot normalize a density with non-positive mass on the grid");
    for (double& d : pdf.densities) d /= mass;
}

double silverman_bandwidth(std::span<const double> samples) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = sample_std(sorted);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
    if (!(spread > 0.0)) return 1.0;  // all samples identical
    return 1.06 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
}

GriddedPdf fit_kde(std::span<const double> samples, const KdeSpec& spec, const GridSpec& grid) {
    validate(grid);
    validate(spec);
    if (samples.empty())
        throw UsageError("fit_kde requires at least one sample");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    double h = spec.rule == BandwidthRule::Fixed ? spec.fixed_h : silverman_bandwidth(sorted);
    // A kernel narrower than the grid spacing cannot be represented on the
    // grid; clamp so every in-range sample deposits mass.
    const double step = grid.step();
    h = std::max(h, step);

    GriddedPdf out{grid, std::vector<double>(static_cast<std::size_t>(grid.n_points), 0.0)};
    const double inv2h2 = 1.0 / (2.0 * h * h);
    const double reach = kKernelCutoff * h;
    const double ratio_decay = std::exp(-step * step * 2.0 * inv2h2);

    for (double s : sorted) {
        if (s + reach < grid.min || s - reach > grid.max) continue;
        const int i0 = std::max(0, static_cast<int>(std::ceil((s - reach - grid.min) / step)));
        const int i1 = std::min(grid.n_points - 1,
                                static_cast<int>(std::floor((s + reach - grid.min) / step)));
        if (i0 > i1) continue;
        // exp(-(x_i - s)^2 / 2h^2) along the row via the geometric-ratio
        // recurrence: one exp per sample instead of one per grid point.
        const double d0 = grid.x(i0) - s;
        double value = std::exp(-d0 * d0 * inv2h2);
        double ratio = std::exp(-(2.0 * d0 * step + step * step) * inv2h2);
        for (int i = i0; i <= i1; ++i) {
            out.densities[static_cast<std::size_t>(i)] += value;
            value *= ratio;
            ratio *= ratio_decay;
        }
    }
    normalize(out);
    return out;
}

GriddedPdf eval_grid(const TrueDistribution& dist, const GridSpec& grid) {
    validate(grid);
    GriddedPdf out{grid, std::vector<double>(static_cast<std::size_t>(grid.n_points), 0.0)};
    for (int i = 0; i < grid.n_points; ++i)
        out.densities[static_cast<std::size_t>(i)] = t_pdf(grid.x(i), dist);
    normalize(out);
    return out;
}

double hellinger(const GriddedPdf& p, const GriddedPdf& q) {
    if (!(p.grid == q.grid))
        throw UsageError("hellinger requires both pdfs to share one grid");
    const int n = p.grid.n_points;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::sqrt(p.densities[static_cast<std::size_t>(i)])
                         - std::sqrt(q.densities[static_cast<std::size_t>(i)]);
        const double sq = d * d;
        sum += (i == 0 || i == n - 1) ? 0.5 * sq : sq;
    }
    const double h = std::sqrt(0.5 * sum * p.grid.step());
    return std::clamp(h, 0.0, 1.0);
}

double pdf_variance(const GriddedPdf& p) {
    const int n = p.grid.n_points;
    const double step = p.grid.step();
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        mean += w * p.grid.x(i) * p.densities[static_cast<std::size_t>(i)];
    }
    mean *= step;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const double d = p.grid.x(i) - mean;
        var += w * d * d * p.densities[static_cast<std::size_t>(i)];
    }
    return var * step;
}

}  // namespace collapse
