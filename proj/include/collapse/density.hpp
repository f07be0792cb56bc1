#pragma once

#include <span>
#include <vector>

#include "collapse/distributions.hpp"

namespace collapse {

// Uniform evaluation grid. x(i) = min + i * (max - min) / (n_points - 1).
struct GridSpec {
    double min = -10.0;
    double max = 10.0;
    int n_points = 1024;

    double step() const { return (max - min) / static_cast<double>(n_points - 1); }
    double x(int i) const { return min + step() * static_cast<double>(i); }
    bool operator==(const GridSpec&) const = default;
};

void validate(const GridSpec& grid);

// A probability density evaluated on a uniform grid, normalized so the
// trapezoid integral over the grid is 1.
struct GriddedPdf {
    GridSpec grid;
    std::vector<double> densities;
};

enum class BandwidthRule { Silverman, Fixed };

struct KdeSpec {
    BandwidthRule rule = BandwidthRule::Silverman;
    double fixed_h = 0.5;  // used when rule == Fixed
};

void validate(const KdeSpec& spec);

// Trapezoid integral of the density values over the grid.
double grid_integral(const GriddedPdf& pdf);

// Divide by the trapezoid integral; throws UsageError on non-positive mass.
void normalize(GriddedPdf& pdf);

// Silverman bandwidth 1.06 * min(sd, IQR/1.34) * n^(-1/5) for the given
// samples. Degenerate spreads fall back so the bandwidth stays positive.
double silverman_bandwidth(std::span<const double> samples);

// Gaussian-kernel density estimate on the grid, renormalized. The samples
// are sorted internally, so the result is independent of input order.
GriddedPdf fit_kde(std::span<const double> samples, const KdeSpec& spec, const GridSpec& grid);

// Exact t density evaluated per grid point, renormalized on the grid.
GriddedPdf eval_grid(const TrueDistribution& dist, const GridSpec& grid);

// (1/sqrt(2)) * sqrt(trapezoid integral of (sqrt(p) - sqrt(q))^2),
// clamped to [0, 1]. Both pdfs must share one grid.
double hellinger(const GriddedPdf& p, const GriddedPdf& q);

// Second central moment by trapezoid quadrature.
double pdf_variance(const GriddedPdf& p);

}  // namespace collapse
