#pragma once

#include <cmath>
#include <random>

#include "rmf/lattice.hpp"
#include "rmf/model.hpp"

namespace rmf::test {

inline LatticePtr lattice(int n, double L = 6.0) { return make_lattice({L, n}); }

template <class A, class B>
double rel(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    double d = b.norm();
    return d > 0 ? (a - b).norm() / d : (a - b).norm();
}

inline Vec random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    return v;
}

inline SpinorField random_spinor(LatticePtr lat, std::mt19937_64& rng) {
    SpinorField f = SpinorField::zeros(lat);
    f.values = random_vec(lat->dim(), rng);
    return f;
}

inline RVec random_real(std::size_t n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
    std::uniform_real_distribution<double> u(lo, hi);
    RVec v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline std::array<int, 3> random_shift(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> u(-n, 2 * n);
    return {u(rng), u(rng), u(rng)};
}

// Small in-regime couplings used across tests.
inline ModelParams small_coupling(int Z, int N, double scale = 1.0) {
    ModelParams p;
    p.g_sigma = 1.0 * scale;
    p.g_omega = 0.8 * scale;
    p.g_rho = 0.3 * scale;
    p.e_charge = 0.3 * scale;
    p.Z = Z;
    p.N = N;
    return p;
}

} // namespace rmf::test
