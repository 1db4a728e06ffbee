#include "rmf/variational.hpp"

#include <cmath>
#include <future>
#include <limits>

#include "rmf/error.hpp"
#include "rmf/linalg.hpp"

namespace rmf {

namespace {

double sum_expectations(const Lattice& lat, const Mat& cols, const Mat& images) {
    return (lat.cell_volume() * cols.conjugate().cwiseProduct(images).sum()).real();
}

} // namespace

EnergyBreakdown energy(const OrbitalSet& o, const ModelParams& p) {
    const Lattice& lat = *o.lattice;
    HamiltonianPair H = build_hamiltonians(o, p);
    const DensitySet& rho = H.densities;
    const MesonFieldSet& f = H.fields;

    EnergyBreakdown e;
    const Mat h0p = apply_H0(lat, o.protons, p.m_b), h0n = apply_H0(lat, o.neutrons, p.m_b);
    e.kinetic = sum_expectations(lat, o.protons, h0p) + sum_expectations(lat, o.neutrons, h0n);
    e.sigma_term = 0.5 * p.g_sigma * integrate(lat, f.sigma.cwiseProduct(rho.rho_s));
    e.omega_term = 0.5 * p.g_omega * integrate(lat, f.omega0.cwiseProduct(rho.rho_0));
    e.rho_term = 0.5 * p.g_rho * integrate(lat, f.R00.cwiseProduct(rho.rho_00));
    e.coulomb_term = 0.5 * p.e_charge * integrate(lat, f.A0.cwiseProduct(rho.rho_c));
    e.total = e.kinetic + e.sigma_term + e.omega_term + e.rho_term + e.coulomb_term;

    // split route: potential expectation values from (H - H0) applied to each orbital
    const double vp = sum_expectations(lat, o.protons, H.proton.apply(o.protons) - h0p);
    const double vn = sum_expectations(lat, o.neutrons, H.neutron.apply(o.neutrons) - h0n);
    e.total_split_route = e.kinetic + 0.5 * vp + 0.5 * vn;
    return e;
}

double ELReport::max_residual() const {
    double m = 0;
    for (double r : residual_p) m = std::max(m, r);
    for (double r : residual_n) m = std::max(m, r);
    return m;
}

ELReport el_residual(const OrbitalSet& o, const ModelParams& p) {
    const Lattice& lat = *o.lattice;
    HamiltonianPair H = build_hamiltonians(o, p);
    ELReport r;
    for (Species s : {Species::proton, Species::neutron}) {
        const Mat& cols = o.of(s);
        const Mat img = H.of(s).apply(cols);
        auto& eps = s == Species::proton ? r.eps_p : r.eps_n;
        auto& res = s == Species::proton ? r.residual_p : r.residual_n;
        for (Eigen::Index i = 0; i < cols.cols(); ++i) {
            const double nn = cols.col(i).squaredNorm();
            const double e = nn > 0 ? cols.col(i).dot(img.col(i)).real() / nn : 0.0;
            eps.push_back(e);
            res.push_back((img.col(i) - e * cols.col(i)).norm() * std::sqrt(lat.cell_volume()));
        }
    }
    return r;
}

GradientCheck energy_gradient_check(const OrbitalSet& o, const ModelParams& p,
                                    const OrbitalSet& dir, const std::vector<double>& steps) {
    if (dir.protons.rows() != o.protons.rows() || dir.protons.cols() != o.protons.cols() ||
        dir.neutrons.rows() != o.neutrons.rows() || dir.neutrons.cols() != o.neutrons.cols())
        throw PreconditionError("variational", "direction does not match the orbital layout");
    const Lattice& lat = *o.lattice;
    HamiltonianPair H = build_hamiltonians(o, p);
    GradientCheck g;
    g.analytic = 2.0 * (sum_expectations(lat, H.proton.apply(o.protons), dir.protons) +
                        sum_expectations(lat, H.neutron.apply(o.neutrons), dir.neutrons));
    auto shifted = [&](double t) {
        OrbitalSet s = o;
        s.protons += t * dir.protons;
        s.neutrons += t * dir.neutrons;
        return energy(s, p).total;
    };
    g.steps = steps;
    g.best_relative_error = std::numeric_limits<double>::infinity();
    const double scale = std::abs(g.analytic);
    for (double t : steps) {
        double fd = (shifted(t) - shifted(-t)) / (2.0 * t);
        double err = std::abs(fd - g.analytic);
        double rel = scale > 0 ? err / scale : err;
        g.finite_difference.push_back(fd);
        g.relative_error.push_back(rel);
        g.best_relative_error = std::min(g.best_relative_error, rel);
    }
    g.observed_order = std::numeric_limits<double>::quiet_NaN();
    if (steps.size() >= 2 && g.relative_error[0] > 0 && g.relative_error[1] > 0)
        g.observed_order = std::log(g.relative_error[0] / g.relative_error[1]) / std::log(steps[0] / steps[1]);
    return g;
}

DensityMatrixPair DensityMatrixPair::from_orbitals(const OrbitalSet& o) {
    DensityMatrixPair g{o.lattice, o.protons, o.neutrons};
    g.check();
    return g;
}

OrbitalSet DensityMatrixPair::orbitals() const {
    return OrbitalSet::with_identity_targets(lattice, gamma_p, gamma_n);
}

void DensityMatrixPair::check(double tol) const {
    for (Species s : {Species::proton, Species::neutron}) {
        const Mat& c = of(s);
        if (c.cols() == 0) continue;
        double dev = (gram(*lattice, c) - Mat::Identity(c.cols(), c.cols())).cwiseAbs().maxCoeff();
        if (dev > tol)
            throw PreconditionError("variational", std::string("the ") + name(s) +
                                                       " projector columns are not orthonormal (deviation " +
                                                       std::to_string(dev) + ")");
    }
}

double commutator_norm(const MeanFieldOperator& H, const Mat& cols) {
    if (cols.cols() == 0) return 0.0;
    const Lattice& lat = H.lattice();
    const Mat psi = std::sqrt(lat.cell_volume()) * cols;
    const Mat Y = H.apply(psi);
    const Mat G = psi.adjoint() * psi;
    const Mat K = psi.adjoint() * Y;
    const Mat Ginv = G.inverse();
    const Mat R = Y - psi * (Ginv * K);
    const Mat D = Ginv * K - K * Ginv;
    const double inside = (D.adjoint() * G * D * G).trace().real();
    const double outside = (R.adjoint() * R * G).trace().real();
    return std::sqrt(std::max(inside, 0.0) + 2.0 * std::max(outside, 0.0));
}

CommutatorResidual commutator_residual(const DensityMatrixPair& gamma, const ModelParams& p) {
    gamma.check();
    HamiltonianPair H = build_hamiltonians(gamma.orbitals(), p);
    return {commutator_norm(H.proton, gamma.gamma_p), commutator_norm(H.neutron, gamma.gamma_n)};
}

DescentStep commutator_descent_step(const DensityMatrixPair& gamma, const ModelParams& p,
                                    double epsilon, const EigOptions& opt) {
    gamma.check();
    const Lattice& lat = *gamma.lattice;
    const double vol = std::sqrt(lat.cell_volume());
    HamiltonianPair H = build_hamiltonians(gamma.orbitals(), p);
    DescentStep out{gamma, 0.0};
    for (Species s : {Species::proton, Species::neutron}) {
        const Mat& cols = gamma.of(s);
        if (cols.cols() == 0) continue;
        const SpectralProjector plus = projector_from_eig(eig(H.of(s), opt), s, Sign::plus);
        const Mat psi = vol * cols; // l2-orthonormal
        const Mat Y = plus.apply(H.of(s).apply(plus.apply(psi)));
        const Mat K = psi.adjoint() * Y;
        out.predicted_change += 2.0 * epsilon * (K.squaredNorm() - Y.squaredNorm());

        // basis of span{psi, Y}
        const Mat R = Y - psi * K;
        HermitianEig rr = hermitian_eig(R.adjoint() * R);
        const double cut = 1e-24 * std::max(1.0, Y.squaredNorm());
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < rr.values.size(); ++i)
            if (rr.values[i] > cut) keep.push_back(i);
        Mat Q(psi.rows(), psi.cols() + Eigen::Index(keep.size()));
        Q.leftCols(psi.cols()) = psi;
        for (std::size_t j = 0; j < keep.size(); ++j) {
            Vec q = R * rr.vectors.col(keep[j]) / std::sqrt(rr.values[keep[j]]);
            q -= psi * (psi.adjoint() * q);
            Q.col(psi.cols() + Eigen::Index(j)) = q;
        }
        // restricted generator c = Q^*(Y psi^* - psi Y^*)Q is skew-Hermitian; c = iK'
        const Mat QY = Q.adjoint() * Y, Qp = Q.adjoint() * psi;
        const Mat c = QY * Qp.adjoint() - Qp * QY.adjoint();
        const Mat herm = cplx(0, -1) * c;
        HermitianEig ce = hermitian_eig(0.5 * (herm + herm.adjoint()));
        Eigen::VectorXcd phase(ce.values.size());
        for (Eigen::Index i = 0; i < ce.values.size(); ++i) {
            const double a = epsilon * ce.values[i];
            const double sh = std::sin(0.5 * a);
            phase[i] = cplx(-2.0 * sh * sh, -std::sin(a)); // exp(-i a) - 1
        }
        const Mat UminusI = ce.vectors * phase.asDiagonal() * ce.vectors.adjoint();
        out.gamma.of(s) = (psi + Q * (UminusI * Qp)) / vol;
    }
    return out;
}

SubadditivityReport subadditivity_probe(const ModelParams& p, const std::vector<double>& lambda,
                                        const ConstrainedSolver& solver, double slack, int threads) {
    if (int(lambda.size()) != p.A())
        throw PreconditionError("variational", "lambda must have A = Z + N entries");
    double total = 0;
    for (double l : lambda) {
        if (!(l >= 0.0 && l <= 1.0)) throw PreconditionError("variational", "lambda entries must lie in [0, 1]");
        total += l;
    }
    if (!(total > 0.0 && total < p.A()))
        throw PreconditionError("variational", "sum of lambda must lie strictly between 0 and A");
    std::vector<double> ones(lambda.size(), 1.0), comp(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) comp[i] = 1.0 - lambda[i];

    ConstrainedOutcome r[3];
    const std::vector<double>* which[3] = {&ones, &lambda, &comp};
    if (threads > 1) {
        std::future<ConstrainedOutcome> f[3];
        for (int i = 0; i < 3; ++i) f[i] = std::async(std::launch::async, solver, *which[i]);
        for (int i = 0; i < 3; ++i) r[i] = f[i].get();
    } else {
        for (int i = 0; i < 3; ++i) r[i] = solver(*which[i]);
    }
    const char* label[3] = {"full problem", "lambda problem", "complementary problem"};
    for (int i = 0; i < 3; ++i)
        if (!r[i].converged)
            throw ConvergenceError("variational", std::string("subadditivity probe: the ") + label[i] +
                                                      " did not converge after " +
                                                      std::to_string(r[i].iterations) + " iterations");
    SubadditivityReport rep;
    rep.lambda = lambda;
    rep.I_full = r[0].energy;
    rep.I_lambda = r[1].energy;
    rep.I_complement = r[2].energy;
    rep.gap = rep.I_lambda + rep.I_complement - rep.I_full;
    rep.slack = slack;
    rep.weak_holds = rep.gap >= -slack;
    rep.strict = rep.gap > slack;
    return rep;
}

ConcentrationReport concentration_profile(const OrbitalSet& o, double radius) {
    const Lattice& lat = *o.lattice;
    if (!(radius > 0.0) || radius > 0.5 * lat.box_length())
        throw PreconditionError("variational", "concentration radius must lie in (0, box_length/2]");
    const long A = o.protons.cols() + o.neutrons.cols();
    if (A == 0) throw PreconditionError("variational", "concentration profile needs at least one orbital");
    const std::size_t S = lat.sites();
    RVec rho = RVec::Zero(S), bar = RVec::Zero(S);
    accumulate_species(lat, o.protons, rho, bar);
    accumulate_species(lat, o.neutrons, rho, bar);

    const int n = lat.n();
    const double h = lat.spacing();
    std::vector<std::array<int, 3>> ball;
    for (std::size_t s = 0; s < S; ++s) {
        auto d = lat.coords(s);
        double r2 = 0;
        for (int a = 0; a < 3; ++a) {
            int m = std::min(d[a], n - d[a]);
            r2 += (m * h) * (m * h);
        }
        if (std::sqrt(r2) <= radius * (1.0 + 1e-12)) ball.push_back(d);
    }
    ConcentrationReport rep;
    rep.radius = radius;
    rep.value = -1.0;
    for (std::size_t y = 0; y < S; ++y) {
        auto c = lat.coords(y);
        double m = 0;
        for (const auto& d : ball) m += rho[lat.site(c[0] + d[0], c[1] + d[1], c[2] + d[2])];
        m *= lat.cell_volume() / double(A);
        if (m > rep.value) {
            rep.value = m;
            rep.center = y;
            rep.center_coords = c;
        }
    }
    return rep;
}

} // namespace rmf
