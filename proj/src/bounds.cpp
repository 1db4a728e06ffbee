#include <cmath>
#include <numbers>
#include <random>

#include "rmf/error.hpp"
#include "rmf/hamiltonian.hpp"
#include "rmf/linalg.hpp"

namespace rmf {

namespace {
constexpr double pi = std::numbers::pi;
}

bool RegimeReport::all_ok() const {
    return ok[0] && ok[1] && ok[2] && d_p_below_one && d_n_below_one && d_p_bounded && d_n_bounded;
}

std::vector<std::string> RegimeReport::failures() const {
    std::vector<std::string> f;
    const char* names[3] = {"scalar/isovector sum (g_sigma^2 A + g_rho^2 max(Z,N))/4pi",
                            "proton sum (g_sigma^2 A + g_omega^2 A + g_rho^2 Z + e^2 Z)/4pi",
                            "neutron sum (g_sigma^2 A + g_omega^2 A + g_rho^2 N)/4pi"};
    for (int i = 0; i < 3; ++i)
        if (!ok[i])
            f.push_back(std::string(names[i]) + " = " + std::to_string(lhs[i]) +
                        " is not below 2/(pi/2 + 2/pi) = " + std::to_string(threshold));
    if (!d_p_below_one) f.push_back("d_p = " + std::to_string(d_p) + " is not below 1");
    if (!d_n_below_one) f.push_back("d_n = " + std::to_string(d_n) + " is not below 1");
    if (d_p_below_one && !d_p_bounded) f.push_back("d_p = " + std::to_string(d_p) + " is not below 4/5");
    if (d_n_below_one && !d_n_bounded) f.push_back("d_n = " + std::to_string(d_n) + " is not below 4/5");
    return f;
}

RegimeReport validate_regime(const ModelParams& p) {
    validate(p);
    const double gs = p.g_sigma * p.g_sigma, gw = p.g_omega * p.g_omega,
                 gr = p.g_rho * p.g_rho, e2 = p.e_charge * p.e_charge;
    const double A = p.A(), Z = p.Z, N = p.N;
    RegimeReport r;
    r.threshold = 2.0 / (pi / 2.0 + 2.0 / pi);
    r.lhs[0] = (gs * A + gr * std::max(Z, N)) / (4.0 * pi);
    r.lhs[1] = (gs * A + gw * A + gr * Z + e2 * Z) / (4.0 * pi);
    r.lhs[2] = (gs * A + gw * A + gr * N) / (4.0 * pi);
    for (int i = 0; i < 3; ++i) r.ok[i] = r.lhs[i] < r.threshold;
    r.d_p = ((gs + gw + gr) * A + e2 * Z) / (2.0 * pi);
    r.d_n = ((gs + gw + gr) * A) / (2.0 * pi);
    r.d_p_below_one = r.d_p < 1.0;
    r.d_n_below_one = r.d_n < 1.0;
    r.d_p_bounded = r.d_p < 0.8;
    r.d_n_bounded = r.d_n < 0.8;
    return r;
}

namespace {

double min_eig(const Mat& m) { return hermitian_eig(0.5 * (m + m.adjoint())).values[0]; }

SpeciesBounds species_bounds(const MeanFieldOperator& H, double d, const EigOptions& opt) {
    const Lattice& lat = H.lattice();
    if (lat.dim() > opt.dense_cap)
        throw SizeCapError("hamiltonian", "operator bounds need dense matrices beyond the cap");
    const double m = H.m_b();
    SpeciesBounds b;
    b.d = d;
    const Mat absH0 = dense_abs_H0(lat, m);
    b.min_eig_potential = min_eig(std::sqrt(std::max(d, 0.0)) * absH0 - H.potential_dense());

    const Mat Hd = H.dense();
    HermitianEig e = hermitian_eig(Hd);
    const Mat absH = e.vectors * e.values.cwiseAbs().asDiagonal() * e.vectors.adjoint();
    b.min_eig_abs = min_eig(absH - std::sqrt(std::max(1.0 - d, 0.0)) * absH0);

    const Mat s = dense_abs_H0(lat, m, -0.5);
    RVec sv = hermitian_eig(0.5 * ((s * Hd * s) + (s * Hd * s).adjoint())).values.cwiseAbs();
    b.h_mu = m * sv.minCoeff();
    return b;
}

RVec periodic_gaussian(const Lattice& lat, const std::array<double, 3>& c, double width) {
    RVec g(lat.sites());
    const double h = lat.spacing(), L = lat.box_length();
    for (std::size_t s = 0; s < lat.sites(); ++s) {
        auto x = lat.coords(s);
        double r2 = 0;
        for (int a = 0; a < 3; ++a) {
            double d = x[a] * h - c[a];
            d -= L * std::round(d / L);
            r2 += d * d;
        }
        g[s] = std::exp(-r2 / (2.0 * width * width));
    }
    return g;
}

// lattice Coulomb potential 1/|x| convolved with a density (zero mode removed)
RVec coulomb_potential(const Lattice& lat, const RVec& mu) {
    const std::size_t S = lat.sites();
    Vec in = mu.cast<cplx>(), hat(S), out(S);
    lat.forward(in.data(), hat.data(), 1);
    for (std::size_t p = 0; p < S; ++p) hat[p] *= lat.k2()[p] > 0 ? 4.0 * pi / lat.k2()[p] : 0.0;
    lat.inverse(hat.data(), out.data(), 1);
    return out.real();
}

double hardy_ratio(const Lattice& lat, const RVec& W, const Vec& phi, double m_b) {
    double num = 0.0;
    for (std::size_t s = 0; s < lat.sites(); ++s) num += W[s] * phi.segment<4>(4 * s).squaredNorm();
    double den = phi.dot(apply_abs_H0(lat, phi, m_b)).real();
    return num / den;
}

} // namespace

HardyReport hardy_battery(LatticePtr latp, double m_b) {
    const Lattice& lat = *latp;
    const double h = lat.spacing(), L = lat.box_length();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> pos(0.0, L), unit(-1.0, 1.0);
    auto point = [&] { return std::array<double, 3>{pos(rng), pos(rng), pos(rng)}; };

    // measures: a lattice delta and two normalized Gaussians; test spinors are
    // Gaussians centred on each measure and at random points, with random spin parts
    const double mid = (lat.n() / 2) * h;
    std::vector<std::array<double, 3>> centers{{mid, mid, mid}, point(), point()};
    std::vector<RVec> measures;
    {
        RVec delta = RVec::Zero(lat.sites());
        delta[lat.site(lat.n() / 2, lat.n() / 2, lat.n() / 2)] = 1.0 / lat.cell_volume();
        measures.push_back(delta);
        for (int i = 1; i <= 2; ++i) {
            RVec g = periodic_gaussian(lat, centers[i], i * h);
            measures.push_back(g / (g.sum() * lat.cell_volume()));
        }
    }
    std::vector<std::array<double, 3>> spots = centers;
    spots.push_back(point());
    std::vector<Vec> tests;
    for (const auto& c : spots) {
        for (double w : {h, 1.5 * h, 2.0 * h, L / 4.0}) {
            RVec g = periodic_gaussian(lat, c, w);
            Eigen::Vector4cd spin;
            for (int k = 0; k < 4; ++k) spin[k] = cplx(unit(rng), unit(rng));
            Vec phi(lat.dim());
            for (std::size_t s = 0; s < lat.sites(); ++s) phi.segment<4>(4 * s) = g[s] * spin;
            tests.push_back(phi);
        }
    }
    FreeProjector plus(Sign::plus, latp, m_b);
    HardyReport r;
    r.limit = pi / 2.0;
    r.limit_free_projected = (pi / 2.0 + 2.0 / pi) / 2.0;
    r.max_ratio = r.max_ratio_free_projected = -INFINITY;
    for (const RVec& mu : measures) {
        RVec W = coulomb_potential(lat, mu);
        for (const Vec& phi : tests) {
            r.max_ratio = std::max(r.max_ratio, hardy_ratio(lat, W, phi, m_b));
            r.max_ratio_free_projected =
                std::max(r.max_ratio_free_projected, hardy_ratio(lat, W, plus.apply(phi), m_b));
            ++r.battery_size;
        }
    }
    return r;
}

OperatorBoundsReport check_operator_bounds(const OrbitalSet& o, const ModelParams& p,
                                           const EigOptions& opt) {
    for (Species s : {Species::proton, Species::neutron}) {
        const Mat& cols = o.of(s);
        if (cols.cols() == 0) continue;
        double top = hermitian_eig(gram(*o.lattice, cols)).values.maxCoeff();
        if (top > 1.0 + 1e-10)
            throw PreconditionError("hamiltonian", std::string("Gram matrix of the ") + name(s) +
                                                       " orbitals exceeds 1 (largest eigenvalue " +
                                                       std::to_string(top) + ")");
    }
    RegimeReport reg = validate_regime(p);
    HamiltonianPair H = build_hamiltonians(o, p);
    OperatorBoundsReport r;
    r.proton = species_bounds(H.proton, reg.d_p, opt);
    r.neutron = species_bounds(H.neutron, reg.d_n, opt);
    r.hardy = hardy_battery(o.lattice, p.m_b);
    return r;
}

} // namespace rmf
