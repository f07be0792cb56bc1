#pragma once

#include <stdexcept>

#include "collapse/rng.hpp"

namespace collapse {

// Raised when a parameter fails validation at construction/configuration time.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an operation is called with inconsistent arguments.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Location-scale Student-t. df must exceed 2 so the standard deviation
// (scale * sqrt(df / (df - 2))) exists; generational rescaling depends on it.
struct TrueDistribution {
    double df;
    double location = 0.0;
    double scale = 1.0;
};

// Central truncation window, expressed in units of the distribution's
// standard deviation. Bounds are absolute and must be recomputed whenever
// the distribution is rescaled.
struct TruncationSpec {
    double sigma_tr;
    double lower;
    double upper;
};

void validate(const TrueDistribution& dist);

// Standard deviation scale * sqrt(df / (df - 2)).
double dist_std(const TrueDistribution& dist);

// Density of the location-scale t distribution.
double t_pdf(double x, const TrueDistribution& dist);

// One draw; identical seeds give identical sequences.
double t_sample(Rng& rng, const TrueDistribution& dist);

// Bounds at location -/+ sigma_tr * dist_std(dist).
TruncationSpec make_truncation(const TrueDistribution& dist, double sigma_tr);

// Draw conditioned on [lower, upper], by rejection against t_sample.
double truncated_sample(Rng& rng, const TrueDistribution& dist, const TruncationSpec& trunc);

// Same df and location, scale chosen so dist_std(result) == target_std.
TrueDistribution rescale_distribution(const TrueDistribution& dist, double target_std);

}  // namespace collapse
