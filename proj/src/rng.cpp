#include "collapse/rng.hpp"

#include <cmath>

namespace collapse {

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::lognormal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
}

double Rng::student_t(double df) {
    // Bailey (1994), polar generation of t variates.
    double u, v, w;
    do {
        u = uniform_sym();
        v = uniform_sym();
        w = u * u + v * v;
    } while (w > 1.0 || w == 0.0);
    return u * std::sqrt(df * (std::pow(w, -2.0 / df) - 1.0) / w);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (splitmix64(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

}  // namespace collapse
