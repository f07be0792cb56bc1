#include "collapse/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace collapse {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty range");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double linear_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_slope requires two equally sized ranges, n >= 2");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_slope: x values are all equal");
    return sxy / sxx;
}

double welch_one_sided_p(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch test requires at least 2 values per group");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_stddev(a) * sample_stddev(a) / na;
    const double vb = sample_stddev(b) * sample_stddev(b) / nb;
    if (va + vb == 0.0) return mean(a) > mean(b) ? 0.0 : 1.0;
    const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb)
                      / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    return 1.0 - student_t_cdf(t, df);
}

double student_t_cdf(double x, double df) {
    boost::math::students_t dist(df);
    return boost::math::cdf(dist, x);
}

double chi_squared_upper_p(double statistic, double df) {
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace collapse
