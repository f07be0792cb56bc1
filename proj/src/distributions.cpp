#include "collapse/distributions.hpp"

#include <cmath>
#include <string>

namespace collapse {

void validate(const TrueDistribution& dist) {
    if (!(dist.df > 2.0))
        throw ConfigError("df must be > 2 (got " + std::to_string(dist.df) + ")");
    if (!(dist.scale > 0.0))
        throw ConfigError("scale must be > 0 (got " + std::to_string(dist.scale) + ")");
    if (!std::isfinite(dist.location))
        throw ConfigError("location must be finite");
}

double dist_std(const TrueDistribution& dist) {
    validate(dist);
    return dist.scale * std::sqrt(dist.df / (dist.df - 2.0));
}

double t_pdf(double x, const TrueDistribution& dist) {
    validate(dist);
    const double z = (x - dist.location) / dist.scale;
    const double log_norm = std::lgamma((dist.df + 1.0) / 2.0) - std::lgamma(dist.df / 2.0)
                            - 0.5 * std::log(dist.df * M_PI);
    const double log_kernel = -0.5 * (dist.df + 1.0) * std::log1p(z * z / dist.df);
    return std::exp(log_norm + log_kernel) / dist.scale;
}

double t_sample(Rng& rng, const TrueDistribution& dist) {
    return dist.location + dist.scale * rng.student_t(dist.df);
}

TruncationSpec make_truncation(const TrueDistribution& dist, double sigma_tr) {
    if (!(sigma_tr > 0.0))
        throw ConfigError("sigma_tr must be > 0 (got " + std::to_string(sigma_tr) + ")");
    const double half_width = sigma_tr * dist_std(dist);
    return TruncationSpec{sigma_tr, dist.location - half_width, dist.location + half_width};
}

double truncated_sample(Rng& rng, const TrueDistribution& dist, const TruncationSpec& trunc) {
    if (!(trunc.lower < dist.location && dist.location < trunc.upper))
        throw UsageError("truncation bounds do not bracket the distribution location");
    // The window is central, so acceptance is high for all studied sigma_tr;
    // the cap only guards against misconfiguration.
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const double x = t_sample(rng, dist);
        if (x >= trunc.lower && x <= trunc.upper) return x;
    }
    throw std::runtime_error("truncated_sample: rejection loop failed to accept");
}

TrueDistribution rescale_distribution(const TrueDistribution& dist, double target_std) {
    validate(dist);
    if (!(target_std > 0.0))
        throw ConfigError("target_std must be > 0 (got " + std::to_string(target_std) + ")");
    TrueDistribution out = dist;
    out.scale = target_std * std::sqrt((dist.df - 2.0) / dist.df);
    return out;
}

}  // namespace collapse
