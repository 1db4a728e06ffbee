#include <doctest.h>

#include <cstring>

#include "rmf/kernels.hpp"
#include "support.hpp"

using namespace rmf;
namespace k = rmf::kernels;

namespace {

struct Inputs {
    std::vector<double> kx, ky, kz, s, w;
    std::vector<k::cplx> psi;
};

Inputs make_inputs(std::size_t nodes, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Inputs in;
    for (auto* v : {&in.kx, &in.ky, &in.kz, &in.s, &in.w}) {
        v->resize(nodes);
        for (auto& x : *v) x = g(rng);
    }
    in.psi.resize(4 * nodes);
    for (auto& x : in.psi) x = {g(rng), g(rng)};
    return in;
}

bool same_bits(const std::vector<k::cplx>& a, const std::vector<k::cplx>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(k::cplx)) == 0;
}

} // namespace

TEST_CASE("scalar dirac_symbol matches the 4x4 symbol matrix") {
    std::mt19937_64 rng(21);
    const std::size_t nodes = 9;
    Inputs in = make_inputs(nodes, rng);
    std::vector<k::cplx> out(4 * nodes);
    k::scalar::dirac_symbol(in.kx.data(), in.ky.data(), in.kz.data(), 0.9, in.psi.data(), out.data(), nodes);
    for (std::size_t p = 0; p < nodes; ++p) {
        Mat4 S = dirac::symbol(in.kx[p], in.ky[p], in.kz[p], 0.9);
        Eigen::Vector4cd v(in.psi[4 * p], in.psi[4 * p + 1], in.psi[4 * p + 2], in.psi[4 * p + 3]);
        Eigen::Vector4cd r = S * v;
        for (int c = 0; c < 4; ++c) CHECK(std::abs(r[c] - out[4 * p + c]) < 1e-14 * (1 + std::abs(r[c])));
    }
}

TEST_CASE("scalar local_potential and accumulate_densities match direct formulas") {
    std::mt19937_64 rng(22);
    const std::size_t sites = 7;
    Inputs in = make_inputs(sites, rng);
    std::vector<k::cplx> out(4 * sites, k::cplx(1.0, -2.0));
    k::scalar::local_potential(in.s.data(), in.w.data(), in.psi.data(), out.data(), sites);
    std::vector<double> plain(sites, 0.5), bar(sites, -0.5);
    k::scalar::accumulate_densities(in.psi.data(), 0.75, plain.data(), bar.data(), sites);
    for (std::size_t p = 0; p < sites; ++p) {
        double up = 0, lo = 0;
        for (int c = 0; c < 4; ++c) {
            double sign = c < 2 ? 1.0 : -1.0;
            k::cplx expect = k::cplx(1.0, -2.0) + (in.w[p] + sign * in.s[p]) * in.psi[4 * p + c];
            CHECK(std::abs(out[4 * p + c] - expect) < 1e-14 * (1 + std::abs(expect)));
            (c < 2 ? up : lo) += std::norm(in.psi[4 * p + c]);
        }
        CHECK(plain[p] == doctest::Approx(0.5 + 0.75 * (up + lo)).epsilon(1e-14));
        CHECK(bar[p] == doctest::Approx(-0.5 + 0.75 * (up - lo)).epsilon(1e-14));
    }
}

TEST_CASE("AVX2 kernels are bitwise identical to the scalar reference") {
    if (!k::supported(k::Isa::avx2)) {
        MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(23);
    // odd sizes exercise the tail handling
    for (std::size_t n : {1u, 2u, 3u, 8u, 17u, 64u, 513u}) {
        Inputs in = make_inputs(n, rng);
        const k::Table& s = k::table(k::Isa::scalar);
        const k::Table& v = k::table(k::Isa::avx2);

        std::vector<k::cplx> a(4 * n), b(4 * n);
        s.dirac_symbol(in.kx.data(), in.ky.data(), in.kz.data(), 1.1, in.psi.data(), a.data(), n);
        v.dirac_symbol(in.kx.data(), in.ky.data(), in.kz.data(), 1.1, in.psi.data(), b.data(), n);
        CHECK(same_bits(a, b));

        std::fill(a.begin(), a.end(), k::cplx(0.25, 0.5));
        std::fill(b.begin(), b.end(), k::cplx(0.25, 0.5));
        s.local_potential(in.s.data(), in.w.data(), in.psi.data(), a.data(), n);
        v.local_potential(in.s.data(), in.w.data(), in.psi.data(), b.data(), n);
        CHECK(same_bits(a, b));

        std::vector<double> p1(n, 0.1), b1(n, 0.2), p2(n, 0.1), b2(n, 0.2);
        s.accumulate_densities(in.psi.data(), 0.3, p1.data(), b1.data(), n);
        v.accumulate_densities(in.psi.data(), 0.3, p2.data(), b2.data(), n);
        CHECK(std::memcmp(p1.data(), p2.data(), n * sizeof(double)) == 0);
        CHECK(std::memcmp(b1.data(), b2.data(), n * sizeof(double)) == 0);
    }
}

TEST_CASE("dispatch honours RMF_SIMD=scalar") {
    CHECK(k::supported(k::Isa::scalar));
    const char* env = std::getenv("RMF_SIMD");
    if (env && std::string(env) == "scalar") CHECK(k::active_isa() == k::Isa::scalar);
    else CHECK(k::active_isa() == (k::supported(k::Isa::avx2) ? k::Isa::avx2 : k::Isa::scalar));
}
