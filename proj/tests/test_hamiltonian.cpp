#include <doctest.h>

#include <algorithm>

#include "rmf/error.hpp"
#include "rmf/hamiltonian.hpp"
#include "rmf/sampling.hpp"
#include "support.hpp"

using namespace rmf;
using rmf::test::rel;

namespace {

OrbitalSet random_set(LatticePtr lat, const ModelParams& p, std::uint64_t seed, double noise = 0.3) {
    std::mt19937_64 rng(seed);
    return random_low_energy_orbitals(lat, p, rng, 8, noise);
}

std::vector<double> free_spectrum(const Lattice& lat, double m) {
    std::vector<double> e;
    for (std::size_t s = 0; s < lat.sites(); ++s) {
        double x = std::sqrt(m * m + lat.k2()[s]);
        e.insert(e.end(), {x, x, -x, -x});
    }
    std::sort(e.begin(), e.end());
    return e;
}

} // namespace

TEST_CASE("zero couplings reproduce H0 and its spectrum") {
    auto lat = test::lattice(2, 3.0);
    ModelParams p;
    p.Z = 1;
    p.N = 1;
    OrbitalSet o = random_set(lat, p, 41);
    for (Species s : {Species::proton, Species::neutron}) {
        MeanFieldOperator H = build_hamiltonian(s, o, p);
        CHECK((H.dense() - dense_H0(*lat, p.m_b)).norm() < 1e-13);
        EigenPairs e = eig(H);
        auto expect = free_spectrum(*lat, p.m_b);
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(e.values[i] == doctest::Approx(expect[i]).epsilon(1e-12));
        CHECK(projector_from_eig(e, s).rank() == Eigen::Index(2 * lat->sites()));
    }
}

TEST_CASE("matrix-free and dense operators agree and are Hermitian") {
    std::mt19937_64 rng(42);
    for (int n : {2, 4}) {
        auto lat = test::lattice(n, 5.0);
        ModelParams p = test::small_coupling(2, 1);
        OrbitalSet o = random_set(lat, p, 43 + n);
        HamiltonianPair H = build_hamiltonians(o, p);
        for (Species s : {Species::proton, Species::neutron}) {
            const MeanFieldOperator& op = H.of(s);
            Mat D = op.dense();
            CHECK((D - D.adjoint()).norm() <= 1e-12 * D.norm());
            CHECK((D - dense_H0(*lat, p.m_b) - op.potential_dense()).norm() <= 1e-12 * D.norm());
            for (int t = 0; t < 3; ++t) {
                Vec v = test::random_vec(lat->dim(), rng);
                CHECK(rel(op.apply(v), Vec(D * v)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("proton and neutron potentials differ by 2 g_rho R00 + e A0") {
    auto lat = test::lattice(4, 5.0);
    ModelParams p = test::small_coupling(2, 1, 1.2);
    HamiltonianPair H = build_hamiltonians(random_set(lat, p, 44), p);
    const LocalPotential& vp = H.proton.potential();
    const LocalPotential& vn = H.neutron.potential();
    CHECK((vp.s - vn.s).cwiseAbs().maxCoeff() == 0.0);
    RVec expect = 2 * p.g_rho * H.fields.R00 + p.e_charge * H.fields.A0;
    CHECK((vp.w - vn.w - expect).cwiseAbs().maxCoeff() <= 1e-14 * (1 + expect.cwiseAbs().maxCoeff()));
    // the same statement on the dense operators
    Mat diff = H.proton.dense() - H.neutron.dense();
    double worst = 0;
    for (std::size_t site = 0; site < lat->sites(); ++site)
        for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(diff(4 * site + c, 4 * site + c) - expect[site]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("H depends on the orbitals only through the densities") {
    std::mt19937_64 rng(45);
    auto lat = test::lattice(4, 5.0);
    ModelParams p = test::small_coupling(3, 2);
    OrbitalSet o = random_set(lat, p, 46);
    HamiltonianPair a = build_hamiltonians(o, p);
    for (int t = 0; t < 3; ++t) {
        OrbitalSet m = o;
        m.protons = o.protons * random_unitary(p.Z, rng);
        m.neutrons = o.neutrons * random_unitary(p.N, rng);
        HamiltonianPair b = build_hamiltonians(m, p);
        for (Species s : {Species::proton, Species::neutron})
            CHECK((a.of(s).dense() - b.of(s).dense()).norm() <= 1e-12 * a.of(s).dense().norm());
    }
}

TEST_CASE("first-order perturbation shift of the lowest positive level") {
    // free ground level is the doubly degenerate k = 0 upper spinor; V restricted to it is (s + w) averaged
    auto lat = test::lattice(4, 5.0);
    ModelParams p = test::small_coupling(2, 1, 1e-3);
    HamiltonianPair H = build_hamiltonians(random_set(lat, p, 47, 0.5), p);
    const LocalPotential& v = H.proton.potential();
    const double shift = (v.s + v.w).mean();
    EigenPairs e = eig(H.proton);
    const double measured = e.values[e.first_positive()] - p.m_b;
    INFO("predicted " << shift << " measured " << measured);
    CHECK(std::abs(measured - shift) <= 0.05 * std::abs(shift));
}

TEST_CASE("eig: residuals, orthonormality, trace, phase convention") {
    auto lat = test::lattice(4, 5.0);
    ModelParams p = test::small_coupling(2, 2);
    MeanFieldOperator H = build_hamiltonian(Species::neutron, random_set(lat, p, 48), p);
    EigenPairs e = eig(H);
    Mat D = H.dense();
    for (Eigen::Index i = 1; i < e.values.size(); ++i) CHECK(e.values[i] >= e.values[i - 1]);
    CHECK((e.vectors.adjoint() * e.vectors - Mat::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff() <= 1e-10);
    double worst = 0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        worst = std::max(worst, (D * e.vectors.col(i) - e.values[i] * e.vectors.col(i)).norm());
    CHECK(worst <= 1e-10);
    CHECK(e.values.sum() == doctest::Approx(D.trace().real()).epsilon(1e-8));
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        Eigen::Index j;
        e.vectors.col(i).cwiseAbs().maxCoeff(&j);
        CHECK(std::abs(e.vectors(j, i).imag()) == 0.0);
        CHECK(e.vectors(j, i).real() > 0.0);
    }
    // unit L^2 orbital
    Vec phi = e.orbital(*lat, 0);
    CHECK(phi.squaredNorm() * lat->cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
    // determinism
    EigenPairs f = eig(H);
    CHECK(f.values == e.values);
    CHECK(f.vectors == e.vectors);
}

TEST_CASE("eig refusals") {
    auto lat = test::lattice(4);
    MeanFieldOperator H0 = MeanFieldOperator::free(Species::proton, lat, 1.0);
    EigOptions small;
    small.dense_cap = 100;
    CHECK_THROWS_AS(eig(H0, small), SizeCapError);

    // w = -m_b shifts the k = 0 upper level onto zero
    LocalPotential v{RVec::Zero(lat->sites()), RVec::Constant(lat->sites(), -1.0)};
    MeanFieldOperator gapless(Species::proton, lat, 1.0, v);
    try {
        eig(gapless);
        FAIL("expected a spectral-gap violation");
    } catch (const SpectralGapError& err) {
        CHECK(std::string(err.what()).find("spectral-gap violation") != std::string::npos);
    }
}

TEST_CASE("spectral projector identities") {
    for (int n : {2, 4}) {
        auto lat = test::lattice(n, 5.0);
        ModelParams p = test::small_coupling(2, 1);
        MeanFieldOperator H = build_hamiltonian(Species::proton, random_set(lat, p, 49 + n), p);
        EigenPairs e = eig(H);
        Mat M = projector_from_eig(e, Species::proton, Sign::minus).dense();
        Mat P = projector_from_eig(e, Species::proton, Sign::plus).dense();
        Mat D = H.dense();
        const auto I = Mat::Identity(D.rows(), D.cols());
        CHECK((M + P - I).norm() <= 1e-10);
        CHECK((M * M - M).norm() <= 1e-10);
        CHECK((P * P - P).norm() <= 1e-10);
        CHECK((M - M.adjoint()).norm() <= 1e-10);
        CHECK((M * P).norm() <= 1e-10);
        CHECK((M * D - D * M).norm() <= 1e-10 * D.norm());
        CHECK(projector_from_eig(e, Species::proton, Sign::minus).rank() +
                  projector_from_eig(e, Species::proton, Sign::plus).rank() ==
              Eigen::Index(lat->dim()));
        SpectralProjector neg = projector_from_eig(e, Species::proton, Sign::minus);
        std::mt19937_64 rng(50);
        for (int t = 0; t < 5; ++t) {
            Vec v = neg.apply(test::random_vec(lat->dim(), rng));
            v.normalize();
            CHECK(v.dot(D * v).real() < 0.0);
        }
    }
}

TEST_CASE("resolvent quadrature agrees with the eigendecomposition route") {
    std::mt19937_64 rng(51);
    for (int n : {2, 4}) {
        auto lat = test::lattice(n, 4.0);
        ModelParams p = test::small_coupling(1, 1, 1.5);
        MeanFieldOperator A = MeanFieldOperator::free(Species::proton, lat, p.m_b);
        MeanFieldOperator B = build_hamiltonian(Species::proton, random_set(lat, p, 52 + n, 0.5), p);
        Mat diff = projector_from_eig(B).dense() - projector_from_eig(A).dense();
        for (int t = 0; t < 3; ++t) {
            Vec v = test::random_vec(lat->dim(), rng);
            Vec q = projector_resolvent(A, B, v);
            Vec ref = diff * v;
            INFO("n=" << n << " |ref|/|v|=" << ref.norm() / v.norm());
            CHECK((q - ref).norm() <= 1e-6 * v.norm());
            Vec r = projector_resolvent(B, A, v);
            CHECK((q + r).norm() <= 1e-10 * v.norm());
        }
        Vec v = test::random_vec(lat->dim(), rng);
        CHECK(projector_resolvent(B, B, v).norm() <= 1e-12 * v.norm());
    }
}

TEST_CASE("resolvent SpinorField overload and non-convergence error") {
    auto lat = test::lattice(2, 4.0);
    ModelParams p = test::small_coupling(1, 1, 2.0);
    MeanFieldOperator A = MeanFieldOperator::free(Species::neutron, lat, p.m_b);
    MeanFieldOperator B = build_hamiltonian(Species::neutron, random_set(lat, p, 53, 0.5), p);
    std::mt19937_64 rng(54);
    SpinorField f = test::random_spinor(lat, rng);
    CHECK(rel(projector_resolvent(A, B, f).values, projector_resolvent(A, B, f.values)) <= 1e-14);
    ResolventOptions coarse;
    coarse.nodes = 4;
    CHECK_THROWS_AS(projector_resolvent(A, B, f.values, coarse), ConvergenceError);
}

TEST_CASE("regime arithmetic") {
    ModelParams p;
    p.Z = 1;
    p.N = 1;
    RegimeReport zero = validate_regime(p);
    CHECK(zero.all_ok());
    CHECK(zero.d_p == 0.0);
    CHECK(zero.d_n == 0.0);
    const long double pi = 3.141592653589793238462643383279502884L;
    const double oracle = double(2.0L / (pi / 2.0L + 2.0L / pi));
    CHECK(std::abs(zero.threshold - oracle) < 1e-15);
    CHECK(std::abs(zero.threshold - 0.9060367) < 1e-6);

    p.g_sigma = p.g_omega = p.g_rho = std::sqrt(0.1);
    p.e_charge = std::sqrt(0.05);
    RegimeReport r = validate_regime(p);
    CHECK(std::abs(r.d_p - 0.65 / (2 * M_PI)) < 1e-12);
    CHECK(std::abs(r.d_p - 0.103451) < 1e-6);
    CHECK(std::abs(r.d_n - 0.6 / (2 * M_PI)) < 1e-12);
    CHECK(r.all_ok());
    CHECK(r.failures().empty());

    p.g_sigma = p.g_omega = 3.0;
    RegimeReport bad = validate_regime(p);
    CHECK_FALSE(bad.all_ok());
    CHECK_FALSE(bad.failures().empty());
    CHECK_FALSE(bad.d_p_bounded);
}

TEST_CASE("regime report: property on random couplings") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> g(0, 2);
    std::uniform_int_distribution<int> nucleons(0, 6);
    for (int t = 0; t < 200; ++t) {
        ModelParams p;
        p.g_sigma = g(rng), p.g_omega = g(rng), p.g_rho = g(rng), p.e_charge = g(rng);
        p.Z = nucleons(rng);
        p.N = 1 + nucleons(rng);
        RegimeReport r = validate_regime(p);
        CHECK(r.d_p >= r.d_n);
        CHECK(r.d_p_bounded == (r.d_p < 0.8));
        CHECK(r.all_ok() == r.failures().empty());
        for (int i = 0; i < 3; ++i) CHECK(r.ok[i] == (r.margin(i) > 0));
    }
}

TEST_CASE("operator bounds at zero coupling are tight") {
    auto lat = test::lattice(2, 4.0);
    ModelParams p;
    p.Z = 1;
    p.N = 1;
    OperatorBoundsReport r = check_operator_bounds(random_set(lat, p, 56), p);
    for (const SpeciesBounds* b : {&r.proton, &r.neutron}) {
        CHECK(b->d == 0.0);
        CHECK(std::abs(b->min_eig_potential) <= 1e-12);
        CHECK(std::abs(b->min_eig_abs) <= 1e-12);
        CHECK(b->h_mu == doctest::Approx(p.m_b).epsilon(1e-12));
    }
    CHECK(r.hardy.limit == doctest::Approx(M_PI / 2).epsilon(1e-15));
}

TEST_CASE("operator bounds hold on random in-regime orbitals and Gram > 1 is refused") {
    auto lat = test::lattice(4, 5.0);
    ModelParams p = test::small_coupling(1, 1, 1.15);
    REQUIRE(validate_regime(p).all_ok());
    OrbitalSet o = random_set(lat, p, 57);
    OperatorBoundsReport r = check_operator_bounds(o, p);
    CHECK(r.proton.min_eig_potential >= -1e-8);
    CHECK(r.neutron.min_eig_potential >= -1e-8);
    CHECK(r.proton.min_eig_abs >= -1e-8);
    CHECK(r.neutron.min_eig_abs >= -1e-8);
    CHECK(r.proton.h_mu > 0);
    CHECK(r.hardy.within());
    CHECK(r.hardy.battery_size > 0);
    o.protons *= 1.01;
    CHECK_THROWS_AS(check_operator_bounds(o, p), PreconditionError);
}
