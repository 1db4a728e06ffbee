#include "rmf/hamiltonian.hpp"

#include <cmath>
#include <numbers>

#include "rmf/error.hpp"
#include "rmf/kernels.hpp"
#include "rmf/linalg.hpp"

namespace rmf {

MeanFieldOperator::MeanFieldOperator(Species species, LatticePtr lattice, double m_b,
                                     LocalPotential v)
    : species_(species), lattice_(std::move(lattice)), m_b_(m_b), v_(std::move(v)) {
    if (std::size_t(v_.s.size()) != lattice_->sites() || std::size_t(v_.w.size()) != lattice_->sites())
        throw PreconditionError("hamiltonian", "potential does not match the lattice");
}

MeanFieldOperator MeanFieldOperator::free(Species species, LatticePtr lattice, double m_b) {
    const std::size_t S = lattice->sites();
    return MeanFieldOperator(species, std::move(lattice), m_b, {RVec::Zero(S), RVec::Zero(S)});
}

Vec MeanFieldOperator::apply(const Vec& v) const {
    Vec out = apply_H0(*lattice_, v, m_b_);
    kernels::active().local_potential(v_.s.data(), v_.w.data(), v.data(), out.data(),
                                      lattice_->sites());
    return out;
}

Mat MeanFieldOperator::apply(const Mat& m) const {
    Mat out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = apply(Vec(m.col(c)));
    return out;
}

SpinorField MeanFieldOperator::apply(const SpinorField& f) const {
    SpinorField g = to_position(f);
    g.values = apply(g.values);
    return f.rep == Representation::momentum ? to_momentum(g) : g;
}

Mat MeanFieldOperator::potential_dense() const {
    const std::size_t S = lattice_->sites();
    Mat V = Mat::Zero(4 * S, 4 * S);
    for (std::size_t x = 0; x < S; ++x) {
        V(4 * x, 4 * x) = V(4 * x + 1, 4 * x + 1) = v_.w[x] + v_.s[x];
        V(4 * x + 2, 4 * x + 2) = V(4 * x + 3, 4 * x + 3) = v_.w[x] - v_.s[x];
    }
    return V;
}

Mat MeanFieldOperator::dense() const { return dense_H0(*lattice_, m_b_) + potential_dense(); }

HamiltonianPair build_hamiltonians(LatticePtr lat, const DensitySet& rho, const ModelParams& p) {
    MesonFieldSet f = solve_fields(*lat, rho, p);
    MeanFieldOperator hp(Species::proton, lat, p.m_b, potential(Species::proton, f, p));
    MeanFieldOperator hn(Species::neutron, lat, p.m_b, potential(Species::neutron, f, p));
    return {rho, std::move(f), std::move(hp), std::move(hn)};
}

HamiltonianPair build_hamiltonians(const OrbitalSet& o, const ModelParams& p) {
    return build_hamiltonians(o.lattice, compute_densities(o), p);
}

MeanFieldOperator build_hamiltonian(Species s, const OrbitalSet& o, const ModelParams& p) {
    return build_hamiltonians(o, p).of(s);
}

Vec EigenPairs::orbital(const Lattice& lat, Eigen::Index i) const {
    return vectors.col(i) / std::sqrt(lat.cell_volume());
}

Eigen::Index EigenPairs::first_positive() const {
    Eigen::Index i = 0;
    while (i < values.size() && values[i] < 0.0) ++i;
    return i;
}

EigenPairs eig(const MeanFieldOperator& op, const EigOptions& opt) {
    const std::size_t dim = op.lattice().dim();
    if (dim > opt.dense_cap)
        throw SizeCapError("hamiltonian", "dense eigendecomposition refused: dimension " +
                                              std::to_string(dim) + " exceeds cap " +
                                              std::to_string(opt.dense_cap));
    HermitianEig e = hermitian_eig(op.dense());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        if (std::abs(e.values[i]) < opt.zero_tol)
            throw SpectralGapError("hamiltonian",
                                   "spectral-gap violation: eigenvalue " + std::to_string(e.values[i]) +
                                       " of the " + name(op.species()) + " operator lies within zero_tol of 0");
        fix_phase(e.vectors.col(i));
    }
    return {std::move(e.values), std::move(e.vectors)};
}

SpinorField SpectralProjector::apply(const SpinorField& f) const {
    SpinorField g = to_position(f);
    g.values = apply(g.values);
    return f.rep == Representation::momentum ? to_momentum(g) : g;
}

SpectralProjector projector_from_eig(const EigenPairs& e, Species s, Sign sign) {
    const Eigen::Index k = e.first_positive();
    SpectralProjector P;
    P.species = s;
    P.sign = sign;
    P.basis = sign == Sign::minus ? Mat(e.vectors.leftCols(k)) : Mat(e.vectors.rightCols(e.vectors.cols() - k));
    return P;
}

SpectralProjector projector_from_eig(const MeanFieldOperator& op, Sign sign, const EigOptions& opt) {
    return projector_from_eig(eig(op, opt), op.species(), sign);
}

namespace {

// x = (A - i eta)^{-1} b via conjugate gradients on A^2 + eta^2
Vec shifted_solve(const MeanFieldOperator& A, double eta, const Vec& b, const ResolventOptions& opt) {
    const double eta2 = eta * eta;
    auto normal = [&](const Vec& x) -> Vec { return A.apply(A.apply(x)) + eta2 * x; };
    const double bnorm = b.norm();
    Vec x = Vec::Zero(b.size());
    if (bnorm == 0.0) return x;
    Vec r = b, p = r;
    double rr = r.squaredNorm();
    int it = 0;
    for (; it < opt.cg_max_iterations && std::sqrt(rr) > opt.cg_tol * bnorm; ++it) {
        Vec q = normal(p);
        double alpha = rr / p.dot(q).real();
        x += alpha * p;
        r -= alpha * q;
        double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    if (std::sqrt(rr) > opt.cg_tol * bnorm * 10.0)
        throw ConvergenceError("hamiltonian", "shifted solve did not converge in the resolvent quadrature");
    return A.apply(x) + cplx(0.0, eta) * x;
}

Vec resolvent_quadrature(const MeanFieldOperator& A, const MeanFieldOperator& B, const Vec& v,
                         int nodes, const ResolventOptions& opt) {
    std::vector<double> t, w;
    gauss_legendre(nodes, t, w);
    Vec acc = Vec::Zero(v.size());
    const double half_pi = 0.5 * std::numbers::pi;
    for (int q = 0; q < nodes; ++q) {
        const double theta = half_pi * t[q];
        const double eta = std::tan(theta);
        const double jac = half_pi * w[q] * (1.0 + eta * eta);
        Vec y = shifted_solve(B, eta, v, opt);
        Vec d = B.apply(y) - A.apply(y);
        acc += jac * shifted_solve(A, eta, d, opt);
    }
    return acc / (2.0 * std::numbers::pi);
}

} // namespace

Vec projector_resolvent(const MeanFieldOperator& A, const MeanFieldOperator& B, const Vec& v,
                        const ResolventOptions& opt) {
    if (opt.nodes < 2) throw PreconditionError("hamiltonian", "resolvent quadrature needs >= 2 nodes");
    Vec full = resolvent_quadrature(A, B, v, opt.nodes, opt);
    Vec half = resolvent_quadrature(A, B, v, opt.nodes / 2, opt);
    const double change = (full - half).norm();
    if (change > opt.tol * std::max(v.norm(), 1e-300))
        throw ConvergenceError("hamiltonian", "resolvent quadrature not converged: halving the node count changes the result by " +
                                                  std::to_string(change / v.norm()) + " (relative)");
    return full;
}

SpinorField projector_resolvent(const MeanFieldOperator& A, const MeanFieldOperator& B,
                                const SpinorField& v, const ResolventOptions& opt) {
    SpinorField g = to_position(v);
    g.values = projector_resolvent(A, B, g.values, opt);
    return v.rep == Representation::momentum ? to_momentum(g) : g;
}

} // namespace rmf
