#include "rmf/scf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmf/error.hpp"
#include "rmf/retraction.hpp"

namespace rmf {

void validate(const SCFConfig& c) {
    if (!(c.mixing > 0.0 && c.mixing <= 1.0)) throw PreconditionError("scf", "mixing must lie in (0, 1]");
    if (!(c.tol_eigenvalue > 0 && c.tol_density > 0 && c.tol_el > 0))
        throw PreconditionError("scf", "tolerances must be positive");
    if (c.max_iterations < 1) throw PreconditionError("scf", "max_iterations must be at least 1");
}

namespace {

// Occupation layout of one species: kept slots with their weights.
struct Slots {
    std::vector<double> weight;      // kept lambda, original order
    std::vector<std::size_t> column; // slot k (k-th lowest level) -> column index
    Mat target() const {
        Mat t = Mat::Zero(weight.size(), weight.size());
        for (std::size_t i = 0; i < weight.size(); ++i) t(i, i) = weight[i];
        return t;
    }
    std::size_t count() const { return weight.size(); }
};

Slots make_slots(const std::vector<double>& lambda) {
    Slots s;
    for (double l : lambda)
        if (l > 0.0) s.weight.push_back(l);
    s.column.resize(s.weight.size());
    std::iota(s.column.begin(), s.column.end(), 0);
    // heaviest weight on the lowest level
    std::stable_sort(s.column.begin(), s.column.end(),
                     [&](std::size_t a, std::size_t b) { return s.weight[a] > s.weight[b]; });
    return s;
}

void check_lambda(const ModelParams& p, const std::vector<double>& lambda) {
    if (int(lambda.size()) != p.A()) throw PreconditionError("scf", "lambda must have A = Z + N entries");
    for (double l : lambda)
        if (!(l >= 0.0 && l <= 1.0)) throw PreconditionError("scf", "lambda entries must lie in [0, 1]");
}

struct Occupied {
    Mat cols;
    std::vector<double> eps; // slot order
    bool degenerate = false;
};

Occupied occupy(const Lattice& lat, const EigenPairs& e, const Slots& slots, Species s, double zero_tol) {
    const Eigen::Index first = e.first_positive();
    const Eigen::Index available = e.values.size() - first;
    if (Eigen::Index(slots.count()) > available)
        throw PreconditionError("scf", std::string("only ") + std::to_string(available) + " positive " +
                                           name(s) + " eigenvalues for " + std::to_string(slots.count()) +
                                           " occupied orbitals");
    Occupied o;
    o.cols = Mat::Zero(lat.dim(), slots.count());
    for (std::size_t k = 0; k < slots.count(); ++k) {
        const Eigen::Index i = first + Eigen::Index(k);
        if (e.values[i] < zero_tol)
            throw SpectralGapError("scf", std::string("gap collapse: occupied ") + name(s) +
                                              " level sits at " + std::to_string(e.values[i]));
        const std::size_t c = slots.column[k];
        o.cols.col(c) = std::sqrt(slots.weight[c]) * e.orbital(lat, i);
        o.eps.push_back(e.values[i]);
    }
    if (slots.count() > 0) {
        const Eigen::Index last = first + Eigen::Index(slots.count()) - 1;
        if (last + 1 < e.values.size() && std::abs(e.values[last + 1] - e.values[last]) < 1e-8)
            o.degenerate = true;
    }
    return o;
}

EigenPairs eig_or_collapse(const MeanFieldOperator& H, const EigOptions& opt) {
    try {
        return eig(H, opt);
    } catch (const SpectralGapError& err) {
        throw SpectralGapError("scf", std::string("gap collapse: ") + err.what());
    }
}

std::vector<double> rayleigh_sorted(const MeanFieldOperator& H, const Mat& cols) {
    std::vector<double> r;
    const Mat img = H.apply(cols);
    for (Eigen::Index i = 0; i < cols.cols(); ++i) {
        double nn = cols.col(i).squaredNorm();
        r.push_back(nn > 0 ? cols.col(i).dot(img.col(i)).real() / nn : 0.0);
    }
    std::sort(r.begin(), r.end());
    return r;
}

double max_delta(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

OrbitalSet free_initial_guess(LatticePtr lat, const ModelParams& p, const std::vector<double>& lambda,
                              const EigOptions& opt) {
    check_lambda(p, lambda);
    const Slots sp = make_slots({lambda.begin(), lambda.begin() + p.Z});
    const Slots sn = make_slots({lambda.begin() + p.Z, lambda.end()});
    const EigenPairs e = eig(MeanFieldOperator::free(Species::proton, lat, p.m_b), opt);
    OrbitalSet o;
    o.lattice = lat;
    o.protons = occupy(*lat, e, sp, Species::proton, opt.zero_tol).cols;
    o.neutrons = occupy(*lat, e, sn, Species::neutron, opt.zero_tol).cols;
    o.gram_target_p = sp.target();
    o.gram_target_n = sn.target();
    return o;
}

SCFReport scf_solve_constrained(const ModelParams& p, const LatticeSpec& spec, const SCFConfig& cfg,
                                const std::vector<double>& lambda) {
    validate(p);
    validate(cfg);
    check_lambda(p, lambda);
    SCFReport rep;
    rep.lambda = lambda;
    rep.regime = validate_regime(p);
    if (!rep.regime.all_ok()) {
        std::string msg = "coupling regime check failed:";
        for (const auto& f : rep.regime.failures()) msg += "\n  " + f;
        if (!cfg.warn_and_proceed) throw RegimeError("scf", msg);
        rep.warnings.push_back(msg);
    }

    LatticePtr lat = make_lattice(spec);
    const Slots sp = make_slots({lambda.begin(), lambda.begin() + p.Z});
    const Slots sn = make_slots({lambda.begin() + p.Z, lambda.end()});

    OrbitalSet current;
    if (cfg.initial_guess == InitialGuess::provided) {
        if (!cfg.provided) throw PreconditionError("scf", "initial guess policy 'provided' without orbitals");
        current = *cfg.provided;
        current.lattice = lat;
        if (current.protons.cols() != Eigen::Index(sp.count()) ||
            current.neutrons.cols() != Eigen::Index(sn.count()) ||
            current.protons.rows() != Eigen::Index(lat->dim()) ||
            current.neutrons.rows() != Eigen::Index(lat->dim()))
            throw PreconditionError("scf", "provided orbitals do not match the occupied working set");
        current.gram_target_p = sp.target();
        current.gram_target_n = sn.target();
        current = gram_normalize(current);
    } else {
        current = free_initial_guess(lat, p, lambda, cfg.eig);
    }

    DensitySet rho = compute_densities(current);
    std::vector<double> eps_prev_p, eps_prev_n;
    {
        HamiltonianPair H0 = build_hamiltonians(lat, rho, p);
        eps_prev_p = rayleigh_sorted(H0.proton, current.protons);
        eps_prev_n = rayleigh_sorted(H0.neutron, current.neutrons);
    }

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        HamiltonianPair H = build_hamiltonians(lat, rho, p);
        const EigenPairs ep = eig_or_collapse(H.proton, cfg.eig);
        const EigenPairs en = eig_or_collapse(H.neutron, cfg.eig);
        Occupied op = occupy(*lat, ep, sp, Species::proton, cfg.eig.zero_tol);
        Occupied on = occupy(*lat, en, sn, Species::neutron, cfg.eig.zero_tol);
        current.protons = op.cols;
        current.neutrons = on.cols;
        rep.degenerate_p = op.degenerate;
        rep.degenerate_n = on.degenerate;
        rep.spectrum_p = ep.values;
        rep.spectrum_n = en.values;

        const DensitySet cand = compute_densities(current);
        SCFIteration rec;
        rec.iteration = it;
        rec.eps_p = op.eps;
        rec.eps_n = on.eps;
        rec.density_residual = l2_distance(*lat, cand, rho);
        rec.max_delta_eps = std::max(max_delta(op.eps, eps_prev_p), max_delta(on.eps, eps_prev_n));
        rec.el_residual = el_residual(current, p).max_residual();
        rec.energy = energy(current, p).total;
        rep.history.push_back(rec);
        rep.iterations = it;

        if (rec.max_delta_eps <= cfg.tol_eigenvalue && rec.density_residual <= cfg.tol_density &&
            rec.el_residual <= cfg.tol_el) {
            rep.converged = true;
            break;
        }
        rho = rho.mixed(cand, cfg.mixing);
        eps_prev_p = op.eps;
        eps_prev_n = on.eps;
    }

    rep.orbitals = current;
    rep.eps_p = rep.history.back().eps_p;
    rep.eps_n = rep.history.back().eps_n;
    rep.energy = energy(current, p);
    rep.el_residual = el_residual(current, p).max_residual();
    HamiltonianPair Hf = build_hamiltonians(current, p);
    rep.commutator_residual = std::max(commutator_norm(Hf.proton, current.protons),
                                       commutator_norm(Hf.neutron, current.neutrons));
    if (rep.degenerate_p) rep.warnings.push_back("highest occupied proton level is degenerate with the next level");
    if (rep.degenerate_n) rep.warnings.push_back("highest occupied neutron level is degenerate with the next level");
    return rep;
}

SCFReport scf_solve(const ModelParams& p, const LatticeSpec& spec, const SCFConfig& cfg) {
    validate(p);
    return scf_solve_constrained(p, spec, cfg, std::vector<double>(p.A(), 1.0));
}

ConstrainedSolver scf_solver_handle(const ModelParams& p, const LatticeSpec& spec, const SCFConfig& cfg) {
    return [p, spec, cfg](const std::vector<double>& lambda) {
        SCFReport r = scf_solve_constrained(p, spec, cfg, lambda);
        return ConstrainedOutcome{r.energy.total, r.converged, r.iterations};
    };
}

} // namespace rmf
