#pragma once

#include <cmath>
#include <vector>

#include "rmf/lattice.hpp"

namespace rmf::test {

// Normalized Gaussian of width s centred at c, weight w.
struct GaussianBlob {
    std::array<double, 3> c;
    double s;
    double w;
};

// Continuum solution of (-Delta + m^2) phi = unit Gaussian of width s, as a function of r.
inline double gaussian_yukawa(double r, double s, double m) {
    const double pre = std::exp(m * m * s * s / 2);
    if (r < 1e-8) {
        const double a = m * s / std::sqrt(2.0);
        return (-2 * m * std::exp(a * a) * std::erfc(a) + 4 / (std::sqrt(2 * M_PI) * s)) / (8 * M_PI);
    }
    const double q = std::sqrt(2.0) * s;
    const double t1 = std::exp(-m * r) * std::erfc((m * s * s - r) / q);
    const double t2 = std::exp(m * r) * std::erfc((m * s * s + r) / q);
    return pre * (t1 - t2) / (8 * M_PI * r);
}

// Sum over periodic images out to the shell where exp(-m * shell) < 1e-14 (or the
// Gaussian tail is below 1e-14 for the density).
template <class F>
double image_sum(const Lattice& lat, const std::array<double, 3>& x, const std::array<double, 3>& c, double reach,
                 F f) {
    const double L = lat.box_length();
    const int shells = int(std::ceil(reach / L)) + 1;
    double acc = 0;
    for (int a = -shells; a <= shells; ++a)
        for (int b = -shells; b <= shells; ++b)
            for (int d = -shells; d <= shells; ++d) {
                double dx = x[0] - c[0] + a * L, dy = x[1] - c[1] + b * L, dz = x[2] - c[2] + d * L;
                double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (r <= reach + L) acc += f(r);
            }
    return acc;
}

inline std::array<double, 3> position(const Lattice& lat, std::size_t site) {
    auto c = lat.coords(site);
    return {c[0] * lat.spacing(), c[1] * lat.spacing(), c[2] * lat.spacing()};
}

inline RVec periodic_gaussian_density(const Lattice& lat, const std::vector<GaussianBlob>& blobs) {
    RVec out = RVec::Zero(lat.sites());
    for (std::size_t s = 0; s < lat.sites(); ++s)
        for (const auto& b : blobs) {
            const double reach = b.s * std::sqrt(2 * 33.0); // exp(-r^2/2s^2) < 1e-14
            out[s] += b.w * image_sum(lat, position(lat, s), b.c, reach, [&](double r) {
                return std::exp(-r * r / (2 * b.s * b.s)) / std::pow(2 * M_PI * b.s * b.s, 1.5);
            });
        }
    return out;
}

inline RVec periodic_yukawa_potential(const Lattice& lat, const std::vector<GaussianBlob>& blobs, double m) {
    RVec out = RVec::Zero(lat.sites());
    const double reach = 33.0 / m; // exp(-m r) < 1e-14 (times 1/r, which only helps)
    for (std::size_t s = 0; s < lat.sites(); ++s)
        for (const auto& b : blobs)
            out[s] += b.w * image_sum(lat, position(lat, s), b.c, reach,
                                      [&](double r) { return gaussian_yukawa(r, b.s, m); });
    return out;
}

} // namespace rmf::test
