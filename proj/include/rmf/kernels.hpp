#pragma once

// Per-node spinor kernels. A scalar reference and an AVX2 variant are compiled;
// the variant is chosen once at runtime (override with RMF_SIMD=scalar).
// Both perform the same floating-point operations in the same order.

#include <complex>
#include <cstddef>

namespace rmf::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct Table {
    // out = (alpha.k + beta*m) in, node by node (4 components per node)
    void (*dirac_symbol)(const double* kx, const double* ky, const double* kz, double m,
                         const cplx* in, cplx* out, std::size_t nodes);
    // out += (s*beta + w) in, site by site
    void (*local_potential)(const double* s, const double* w, const cplx* in, cplx* out,
                            std::size_t sites);
    // plain += weight*psi^* psi, bar += weight*psi^* beta psi
    void (*accumulate_densities)(const cplx* psi, double weight, double* plain, double* bar,
                                 std::size_t sites);
};

const Table& table(Isa isa);
bool supported(Isa isa);
Isa active_isa();
const Table& active();

namespace scalar {
void dirac_symbol(const double*, const double*, const double*, double, const cplx*, cplx*,
                  std::size_t);
void local_potential(const double*, const double*, const cplx*, cplx*, std::size_t);
void accumulate_densities(const cplx*, double, double*, double*, std::size_t);
} // namespace scalar

namespace avx2 {
bool available();
void dirac_symbol(const double*, const double*, const double*, double, const cplx*, cplx*,
                  std::size_t);
void local_potential(const double*, const double*, const cplx*, cplx*, std::size_t);
void accumulate_densities(const cplx*, double, double*, double*, std::size_t);
} // namespace avx2

} // namespace rmf::kernels
