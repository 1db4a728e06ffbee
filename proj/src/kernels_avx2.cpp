#include "rmf/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define RMF_HAVE_X86 1
#endif

namespace rmf::kernels::avx2 {

#ifdef RMF_HAVE_X86

bool available() { return __builtin_cpu_supports("avx2"); }

#define RMF_AVX2 __attribute__((target("avx2")))

// lanes: [v0r v0i v1r v1i]; same operation order as the scalar sigma_k
RMF_AVX2 static inline __m256d sigma_k(__m256d v, double kx, double ky, double kz) {
    const __m256d swapped = _mm256_permute4x64_pd(v, 0x4E);      // v1r v1i v0r v0i
    const __m256d crossed = _mm256_permute_pd(swapped, 0x5);      // v1i v1r v0i v0r
    const __m256d t1 = _mm256_mul_pd(v, _mm256_set_pd(-kz, -kz, kz, kz));
    const __m256d t2 = _mm256_mul_pd(swapped, _mm256_set1_pd(kx));
    const __m256d t3 = _mm256_mul_pd(crossed, _mm256_set_pd(ky, -ky, -ky, ky));
    return _mm256_add_pd(_mm256_add_pd(t1, t2), t3);
}

RMF_AVX2 void dirac_symbol(const double* kx, const double* ky, const double* kz, double m,
                           const cplx* in, cplx* out, std::size_t nodes) {
    const __m256d vm = _mm256_set1_pd(m);
    const __m256d vnm = _mm256_set1_pd(-m);
    for (std::size_t p = 0; p < nodes; ++p) {
        const double* src = reinterpret_cast<const double*>(in + 4 * p);
        double* dst = reinterpret_cast<double*>(out + 4 * p);
        const __m256d u = _mm256_loadu_pd(src);
        const __m256d l = _mm256_loadu_pd(src + 4);
        const __m256d sl = sigma_k(l, kx[p], ky[p], kz[p]);
        const __m256d su = sigma_k(u, kx[p], ky[p], kz[p]);
        _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_mul_pd(vm, u), sl));
        _mm256_storeu_pd(dst + 4, _mm256_add_pd(su, _mm256_mul_pd(vnm, l)));
    }
}

RMF_AVX2 void local_potential(const double* s, const double* w, const cplx* in, cplx* out,
                              std::size_t sites) {
    for (std::size_t x = 0; x < sites; ++x) {
        const __m256d a = _mm256_set1_pd(w[x] + s[x]);
        const __m256d b = _mm256_set1_pd(w[x] - s[x]);
        const double* src = reinterpret_cast<const double*>(in + 4 * x);
        double* dst = reinterpret_cast<double*>(out + 4 * x);
        const __m256d ou = _mm256_loadu_pd(dst);
        const __m256d ol = _mm256_loadu_pd(dst + 4);
        _mm256_storeu_pd(dst, _mm256_add_pd(ou, _mm256_mul_pd(_mm256_loadu_pd(src), a)));
        _mm256_storeu_pd(dst + 4, _mm256_add_pd(ol, _mm256_mul_pd(_mm256_loadu_pd(src + 4), b)));
    }
}

RMF_AVX2 void accumulate_densities(const cplx* psi, double weight, double* plain, double* bar,
                                   std::size_t sites) {
    for (std::size_t x = 0; x < sites; ++x) {
        const double* src = reinterpret_cast<const double*>(psi + 4 * x);
        const __m256d u = _mm256_loadu_pd(src);
        const __m256d l = _mm256_loadu_pd(src + 4);
        // [u0r^2+u0i^2, l0r^2+l0i^2, u1r^2+u1i^2, l1r^2+l1i^2]
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(l, l));
        const __m128d lo = _mm256_castpd256_pd128(h);
        const __m128d hi = _mm256_extractf128_pd(h, 1);
        const __m128d s = _mm_add_pd(lo, hi); // [pu, pl]
        const double pu = _mm_cvtsd_f64(s);
        const double pl = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
        plain[x] = plain[x] + weight * (pu + pl);
        bar[x] = bar[x] + weight * (pu - pl);
    }
}

#else

bool available() { return false; }
void dirac_symbol(const double* kx, const double* ky, const double* kz, double m,
                  const cplx* in, cplx* out, std::size_t nodes) {
    scalar::dirac_symbol(kx, ky, kz, m, in, out, nodes);
}
void local_potential(const double* s, const double* w, const cplx* in, cplx* out,
                     std::size_t sites) {
    scalar::local_potential(s, w, in, out, sites);
}
void accumulate_densities(const cplx* psi, double weight, double* plain, double* bar,
                          std::size_t sites) {
    scalar::accumulate_densities(psi, weight, plain, bar, sites);
}

#endif

} // namespace rmf::kernels::avx2
