#include <doctest.h>

#include "rmf/error.hpp"
#include "rmf/fields.hpp"
#include "rmf/sampling.hpp"
#include "support.hpp"
#include "yukawa_oracle.hpp"

using namespace rmf;
using rmf::test::rel;

namespace {

OrbitalSet single(LatticePtr lat, Species s, const Eigen::Vector4cd& spinor) {
    SpinorField f = SpinorField::constant(lat, spinor);
    f.values /= l2_norm(f);
    Mat col = f.values;
    Mat none(lat->dim(), 0);
    return s == Species::proton ? OrbitalSet::with_identity_targets(lat, col, none)
                                : OrbitalSet::with_identity_targets(lat, none, col);
}

double max_abs(const RVec& v) { return v.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("densities of single constant spinors") {
    auto lat = test::lattice(4);
    DensitySet p = compute_densities(single(lat, Species::proton, {1, 0, 0, 0}));
    const double c = 1.0 / 216.0;
    CHECK(max_abs(p.rho_0.array() - c) < 1e-15);
    CHECK(max_abs(p.rho_s - p.rho_0) < 1e-15);
    CHECK(max_abs(p.rho_00 - p.rho_0) < 1e-15);
    CHECK(max_abs(p.rho_c - p.rho_0) < 1e-15);

    DensitySet n = compute_densities(single(lat, Species::neutron, {0, 0, 1, 0}));
    CHECK(max_abs(n.rho_s + n.rho_0) < 1e-15);
    CHECK(max_abs(n.rho_00 + n.rho_0) < 1e-15);
    CHECK(max_abs(n.rho_c) == 0.0);
}

TEST_CASE("identical proton and neutron orbitals cancel rho_00") {
    std::mt19937_64 rng(31);
    auto lat = test::lattice(4);
    ModelParams p;
    p.Z = 2;
    p.N = 2;
    OrbitalSet o = random_low_energy_orbitals(lat, p, rng, 8, 0.1);
    o.neutrons = o.protons;
    CHECK(max_abs(compute_densities(o).rho_00) < 1e-15);
}

TEST_CASE("density invariants on random orbital sets") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        auto lat = test::lattice(trial % 2 ? 4 : 2, 4.0 + trial);
        ModelParams p;
        p.Z = 1 + trial % 3;
        p.N = trial % 2;
        OrbitalSet o = random_low_energy_orbitals(lat, p, rng, 8, 0.5);
        // non-identity Gram targets through a diagonal rescaling
        RVec lam = test::random_real(p.Z, rng, 0.1, 1.0);
        o.protons = o.protons * lam.cwiseSqrt().cast<cplx>().asDiagonal();
        o.gram_target_p = lam.cast<cplx>().asDiagonal();
        DensitySet d = compute_densities(o);
        CHECK(d.rho_0.minCoeff() >= 0.0);
        CHECK(d.rho_c.minCoeff() >= 0.0);
        CHECK((d.rho_s.cwiseAbs() - d.rho_0).maxCoeff() <= 1e-15);
        const double tp = gram(*lat, o.protons).trace().real(), tn = gram(*lat, o.neutrons).trace().real();
        CHECK(integrate(*lat, d.rho_0) == doctest::Approx(tp + tn).epsilon(1e-12));
        CHECK(integrate(*lat, d.rho_c) == doctest::Approx(tp).epsilon(1e-12));
        CHECK(integrate(*lat, d.rho_00) == doctest::Approx(tp - tn).epsilon(1e-12));

        // block-unitary mixing U_p (+) U_n leaves every density unchanged
        OrbitalSet m = o;
        m.protons = o.protons * random_unitary(p.Z, rng);
        if (p.N > 0) m.neutrons = o.neutrons * random_unitary(p.N, rng);
        DensitySet e = compute_densities(m);
        const double scale = max_abs(d.rho_0);
        CHECK(max_abs(e.rho_s - d.rho_s) <= 1e-10 * scale);
        CHECK(max_abs(e.rho_0 - d.rho_0) <= 1e-10 * scale);
        CHECK(max_abs(e.rho_00 - d.rho_00) <= 1e-10 * scale);
        CHECK(max_abs(e.rho_c - d.rho_c) <= 1e-10 * scale);
    }
}

TEST_CASE("zero couplings give zero fields") {
    std::mt19937_64 rng(33);
    auto lat = test::lattice(4);
    ModelParams p;
    p.Z = 2;
    p.N = 1;
    DensitySet d = compute_densities(random_low_energy_orbitals(lat, p, rng));
    MesonFieldSet f = solve_fields(*lat, d, p);
    for (const RVec* v : {&f.sigma, &f.omega0, &f.R00, &f.A0}) CHECK(max_abs(*v) == 0.0);
}

TEST_CASE("constant sources") {
    auto lat = test::lattice(4);
    ModelParams p = test::small_coupling(1, 1);
    DensitySet d = DensitySet::zeros(lat->sites());
    d.rho_s.setConstant(0.2);
    d.rho_c.setConstant(0.3);
    MesonFieldSet f = solve_fields(*lat, d, p);
    CHECK(max_abs(f.sigma.array() + p.g_sigma * 0.2 / (p.m_sigma * p.m_sigma)) < 1e-14);
    CHECK(max_abs(f.A0) < 1e-15);
    FieldResiduals r = verify_field_equation(*lat, f, d, p);
    CHECK(r.coulomb == 0.0);
    CHECK(r.sigma < 1e-14);
}

TEST_CASE("field equations are satisfied and the solve is linear and translation equivariant") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 8; ++trial) {
        auto lat = test::lattice(trial % 2 ? 4 : 6, 5.0 + trial);
        ModelParams p = test::small_coupling(2, 1, 0.5 + trial);
        DensitySet d;
        d.rho_s = test::random_real(lat->sites(), rng);
        d.rho_0 = test::random_real(lat->sites(), rng, 0, 1);
        d.rho_00 = test::random_real(lat->sites(), rng);
        d.rho_c = test::random_real(lat->sites(), rng, 0, 1);
        MesonFieldSet f = solve_fields(*lat, d, p);
        FieldResiduals r = verify_field_equation(*lat, f, d, p);
        CHECK(r.max() <= 1e-10);

        const double t = 1.0 + trial;
        DensitySet ds = d;
        ds.rho_s *= t;
        ds.rho_c *= t;
        MesonFieldSet g = solve_fields(*lat, ds, p);
        CHECK(rel(g.sigma, RVec(t * f.sigma)) <= 1e-15);
        CHECK(rel(g.A0, RVec(t * f.A0)) <= 1e-15);
        CHECK(g.omega0 == f.omega0);

        auto s = test::random_shift(lat->n(), rng);
        MesonFieldSet h = solve_fields(*lat, translate(*lat, d, s), p);
        CHECK(rel(h.sigma, translate_scalar(*lat, f.sigma, s)) <= 1e-13);
        CHECK(rel(h.omega0, translate_scalar(*lat, f.omega0, s)) <= 1e-13);
        CHECK(rel(h.R00, translate_scalar(*lat, f.R00, s)) <= 1e-13);
        CHECK(rel(h.A0, translate_scalar(*lat, f.A0, s)) <= 1e-13);
    }
}

TEST_CASE("sigma is attractive for nonnegative scalar density") {
    std::mt19937_64 rng(35);
    auto lat = test::lattice(4);
    ModelParams p = test::small_coupling(1, 0);
    for (int trial = 0; trial < 10; ++trial) {
        DensitySet d = DensitySet::zeros(lat->sites());
        d.rho_s = test::random_real(lat->sites(), rng, 0, 1);
        CHECK(solve_fields(*lat, d, p).sigma.maxCoeff() <= 0.0);
    }
}

TEST_CASE("verify_field_equation trivial cases") {
    auto lat = test::lattice(4);
    ModelParams p = test::small_coupling(1, 1);
    DensitySet d = DensitySet::zeros(lat->sites());
    MesonFieldSet zero{RVec::Zero(lat->sites()), RVec::Zero(lat->sites()), RVec::Zero(lat->sites()), RVec::Zero(lat->sites())};
    CHECK(verify_field_equation(*lat, zero, d, p).max() == 0.0);
    std::mt19937_64 rng(36);
    d.rho_s = test::random_real(lat->sites(), rng);
    CHECK(verify_field_equation(*lat, zero, d, p).sigma == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Yukawa fields match the image-summed continuum Green's function on 8^3") {
    // smooth Gaussian sources so that lattice sampling adds no aliasing above 1e-9
    const double L = 8.0;
    auto lat = test::lattice(8, L);
    const double h = lat->spacing();
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> pos(0, L), wgt(0.2, 1.0);
    std::vector<test::GaussianBlob> blobs;
    for (int b = 0; b < 3; ++b) blobs.push_back({{pos(rng), pos(rng), pos(rng)}, 2.0 * h + 0.25 * h * b, wgt(rng)});

    ModelParams p = test::small_coupling(1, 1, 0.7);
    DensitySet d = DensitySet::zeros(lat->sites());
    d.rho_s = test::periodic_gaussian_density(*lat, blobs);
    d.rho_0 = d.rho_s;
    d.rho_00 = d.rho_s;
    MesonFieldSet f = solve_fields(*lat, d, p);

    struct Case { const char* name; double m, g; const RVec* field; };
    for (Case c : {Case{"sigma", p.m_sigma, -p.g_sigma, &f.sigma}, Case{"omega", p.m_omega, p.g_omega, &f.omega0},
                   Case{"rho", p.m_rho, p.g_rho, &f.R00}}) {
        RVec oracle = c.g * test::periodic_yukawa_potential(*lat, blobs, c.m);
        double err = rel(*c.field, oracle);
        INFO(c.name << " relative error " << err);
        CHECK(err <= 1e-6);
    }
    CHECK(verify_field_equation(*lat, f, d, p).max() <= 1e-10);
}

TEST_CASE("closed-form Gaussian Yukawa potential solves the Helmholtz equation") {
    // self-check of the oracle: radial finite differences of phi reproduce the source
    const double s = 0.8, m = 0.7;
    for (double r : {0.3, 1.0, 2.5}) {
        const double e = 1e-3;
        auto phi = [&](double x) { return test::gaussian_yukawa(x, s, m); };
        double lap = (phi(r + e) - 2 * phi(r) + phi(r - e)) / (e * e) + (phi(r + e) - phi(r - e)) / (e * r);
        double rho = std::exp(-r * r / (2 * s * s)) / std::pow(2 * M_PI * s * s, 1.5);
        CHECK(-lap + m * m * phi(r) == doctest::Approx(rho).epsilon(1e-5));
    }
    CHECK(test::gaussian_yukawa(0.0, s, m) == doctest::Approx(test::gaussian_yukawa(1e-6, s, m)).epsilon(1e-9));
}
