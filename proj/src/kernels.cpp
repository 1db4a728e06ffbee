#include "rmf/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace rmf::kernels {

namespace scalar {

// (sigma.k) v for a two-component block (vr, vi interleaved as complex)
static inline void sigma_k(double kx, double ky, double kz, const double* v, double* o) {
    const double v0r = v[0], v0i = v[1], v1r = v[2], v1i = v[3];
    o[0] = (kz * v0r + kx * v1r) + ky * v1i;
    o[1] = (kz * v0i + kx * v1i) + (-ky) * v1r;
    o[2] = ((-kz) * v1r + kx * v0r) + (-ky) * v0i;
    o[3] = ((-kz) * v1i + kx * v0i) + ky * v0r;
}

void dirac_symbol(const double* kx, const double* ky, const double* kz, double m,
                  const cplx* in, cplx* out, std::size_t nodes) {
    for (std::size_t p = 0; p < nodes; ++p) {
        const double* u = reinterpret_cast<const double*>(in + 4 * p);
        const double* l = u + 4;
        double* ou = reinterpret_cast<double*>(out + 4 * p);
        double* ol = ou + 4;
        double su[4], sl[4];
        sigma_k(kx[p], ky[p], kz[p], l, sl);
        sigma_k(kx[p], ky[p], kz[p], u, su);
        for (int c = 0; c < 4; ++c) {
            double uc = u[c], lc = l[c];
            ou[c] = m * uc + sl[c];
            ol[c] = su[c] + (-m) * lc;
        }
    }
}

void local_potential(const double* s, const double* w, const cplx* in, cplx* out,
                     std::size_t sites) {
    for (std::size_t x = 0; x < sites; ++x) {
        const double a = w[x] + s[x];
        const double b = w[x] - s[x];
        const double* u = reinterpret_cast<const double*>(in + 4 * x);
        double* o = reinterpret_cast<double*>(out + 4 * x);
        for (int c = 0; c < 4; ++c) o[c] = o[c] + u[c] * a;
        for (int c = 4; c < 8; ++c) o[c] = o[c] + u[c] * b;
    }
}

void accumulate_densities(const cplx* psi, double weight, double* plain, double* bar,
                          std::size_t sites) {
    for (std::size_t x = 0; x < sites; ++x) {
        const double* u = reinterpret_cast<const double*>(psi + 4 * x);
        const double pu = (u[0] * u[0] + u[1] * u[1]) + (u[2] * u[2] + u[3] * u[3]);
        const double pl = (u[4] * u[4] + u[5] * u[5]) + (u[6] * u[6] + u[7] * u[7]);
        plain[x] = plain[x] + weight * (pu + pl);
        bar[x] = bar[x] + weight * (pu - pl);
    }
}

} // namespace scalar

static const Table scalar_table{scalar::dirac_symbol, scalar::local_potential,
                                scalar::accumulate_densities};
static const Table avx2_table{avx2::dirac_symbol, avx2::local_potential,
                              avx2::accumulate_densities};

bool supported(Isa isa) {
    return isa == Isa::scalar || avx2::available();
}

const Table& table(Isa isa) {
    return (isa == Isa::avx2 && avx2::available()) ? avx2_table : scalar_table;
}

Isa active_isa() {
    static const Isa chosen = [] {
        const char* env = std::getenv("RMF_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
        return avx2::available() ? Isa::avx2 : Isa::scalar;
    }();
    return chosen;
}

const Table& active() { return table(active_isa()); }

} // namespace rmf::kernels
