#include "rmf/retraction.hpp"

#include <cmath>
#include <sstream>

#include "rmf/error.hpp"
#include "rmf/linalg.hpp"

namespace rmf {

Mat gram_normalize(const Lattice& lat, const Mat& cols, const Mat& target) {
    if (target.rows() != cols.cols() || target.cols() != cols.cols())
        throw PreconditionError("retraction", "gram target size does not match the orbital count");
    if (cols.cols() == 0) return cols;
    HermitianEig g = hermitian_eig(gram(lat, cols));
    const double top = std::max(g.values.maxCoeff(), 1e-300);
    if (!(g.values[0] > 1e-13 * top)) {
        std::ostringstream os;
        os.precision(6);
        os << "Gram matrix is singular; null combination of the input columns:";
        for (Eigen::Index i = 0; i < g.vectors.rows(); ++i) os << " " << g.vectors(i, 0);
        throw PreconditionError("retraction", os.str());
    }
    RVec inv = g.values.unaryExpr([](double x) { return 1.0 / std::sqrt(x); });
    const Mat inv_sqrt = g.vectors * inv.asDiagonal() * g.vectors.adjoint();
    return cols * inv_sqrt * hermitian_sqrt(target);
}

OrbitalSet gram_normalize(const OrbitalSet& o) {
    OrbitalSet r = o;
    r.protons = gram_normalize(*o.lattice, o.protons, o.gram_target_p);
    r.neutrons = gram_normalize(*o.lattice, o.neutrons, o.gram_target_n);
    return r;
}

Mat positive_lift(const Lattice& lat, const Mat& cols, const SpectralProjector& plus) {
    if (cols.cols() == 0) return cols;
    const Mat tilde = gram_normalize(lat, cols, Mat::Identity(cols.cols(), cols.cols()));
    const Mat lifted = plus.apply(tilde);
    HermitianEig g = hermitian_eig(gram(lat, lifted));
    // tilde is orthonormal, so the lifted Gram lies below the identity
    const double cond = std::max(1.0, g.values.maxCoeff()) / std::max(g.values.minCoeff(), 1e-300);
    if (!(cond <= 1e8))
        throw PreconditionError("retraction", "hypothesis ii violated: Gram of the positive projection is near-singular (condition number " +
                                                  std::to_string(cond) + ")");
    RVec inv = g.values.unaryExpr([](double x) { return 1.0 / std::sqrt(x); });
    return lifted * (g.vectors * inv.asDiagonal() * g.vectors.adjoint());
}

Mat positive_lift(const OrbitalSet& o, Species s, const ModelParams& p, const EigOptions& opt) {
    HamiltonianPair H = build_hamiltonians(o, p);
    return positive_lift(*o.lattice, o.of(s), projector_from_eig(eig(H.of(s), opt), s, Sign::plus));
}

ProjectorDefect projector_defect(const OrbitalSet& o, const ModelParams& p, const EigOptions& opt) {
    HamiltonianPair H = build_hamiltonians(o, p);
    const double vol = std::sqrt(o.lattice->cell_volume());
    ProjectorDefect d;
    for (Species s : {Species::proton, Species::neutron}) {
        const Mat& cols = o.of(s);
        if (cols.cols() == 0) continue;
        const Mat neg = projector_from_eig(eig(H.of(s), opt), s, Sign::minus).apply(cols);
        double worst = 0;
        for (Eigen::Index i = 0; i < neg.cols(); ++i) worst = std::max(worst, neg.col(i).norm() * vol);
        (s == Species::proton ? d.proton : d.neutron) = worst;
        (s == Species::proton ? d.total_p : d.total_n) = neg.norm() * vol;
    }
    return d;
}

namespace {

struct SpeciesState {
    Mat target_sqrt, target_inv_sqrt;
    Mat plus_tilde;     // orthonormal positive lift
    SpectralProjector minus_psi;
    Mat X;              // unknown negative part, inside range(minus_psi)
};

Mat assemble(const Lattice& lat, const SpeciesState& st) {
    if (st.plus_tilde.cols() == 0) return st.plus_tilde;
    const Mat sum = st.plus_tilde + st.X;
    return gram_normalize(lat, sum, Mat::Identity(sum.cols(), sum.cols())) * st.target_sqrt;
}

double operator_norm_difference(const SpectralProjector& a, const SpectralProjector& b) {
    const Mat d = a.dense() - b.dense();
    return hermitian_eig(0.5 * (d + d.adjoint())).values.cwiseAbs().maxCoeff();
}

} // namespace

RetractionResult retract(const RetractionProblem& prob, const ModelParams& p, const EigOptions& opt) {
    const OrbitalSet& in = prob.input;
    const Lattice& lat = *in.lattice;
    const NewtonConfig& cfg = prob.newton;
    const double vol = std::sqrt(lat.cell_volume());

    HamiltonianPair Hpsi = build_hamiltonians(in, p);
    SpeciesState st[2];
    RetractionResult res;
    for (int k = 0; k < 2; ++k) {
        const Species s = k == 0 ? Species::proton : Species::neutron;
        const Mat& cols = in.of(s);
        const Mat& G = in.target(s);
        if (G.rows() != cols.cols())
            throw PreconditionError("retraction", "gram target size does not match the orbital count");
        if (cols.cols() > 0) {
            RVec ev = hermitian_eig(G).values;
            if (!(ev.minCoeff() > 0.0) || ev.maxCoeff() > 1.0 + 1e-12)
                throw PreconditionError("retraction", std::string("gram target of the ") + name(s) +
                                                          " orbitals must have eigenvalues in (0, 1]");
        }
        EigenPairs e = eig(Hpsi.of(s), opt);
        st[k].minus_psi = projector_from_eig(e, s, Sign::minus);
        const double defect = st[k].minus_psi.apply(cols).norm() * vol;
        (k == 0 ? res.input_defect_p : res.input_defect_n) = defect;
        if (defect > cfg.defect_threshold)
            throw PreconditionError("retraction", std::string("negative-projector defect of the ") + name(s) +
                                                      " orbitals is " + std::to_string(defect) +
                                                      ", above the admissible threshold " +
                                                      std::to_string(cfg.defect_threshold));
        st[k].target_sqrt = hermitian_sqrt(G);
        st[k].target_inv_sqrt = cols.cols() > 0 ? hermitian_inv_sqrt(G) : G;
        st[k].plus_tilde = positive_lift(lat, cols, projector_from_eig(e, s, Sign::plus));
        st[k].X = Mat::Zero(cols.rows(), cols.cols());
    }

    SpectralProjector minus_phi[2];
    auto evaluate = [&](const SpeciesState* s, Mat F[2], OrbitalSet& phi) {
        phi = in;
        phi.protons = assemble(lat, s[0]);
        phi.neutrons = assemble(lat, s[1]);
        HamiltonianPair Hphi = build_hamiltonians(phi, p);
        double r2 = 0;
        for (int k = 0; k < 2; ++k) {
            const Species sp = k == 0 ? Species::proton : Species::neutron;
            minus_phi[k] = projector_from_eig(eig(Hphi.of(sp), opt), sp, Sign::minus);
            F[k] = s[k].minus_psi.apply(minus_phi[k].apply(phi.of(sp)));
            r2 += F[k].squaredNorm();
        }
        return std::sqrt(r2) * vol;
    };

    Mat F[2];
    OrbitalSet phi;
    double r = evaluate(st, F, phi);
    res.residual_history.push_back(r);
    int it = 0;
    while (r > cfg.tolerance) {
        if (it >= cfg.max_iterations)
            throw ConvergenceError("retraction", "Newton iteration did not reach tolerance; try smaller couplings or a smaller defect threshold");
        double alpha = cfg.damping;
        bool accepted = false;
        for (int b = 0; b <= cfg.max_backtracks; ++b, alpha *= 0.5) {
            SpeciesState trial[2] = {st[0], st[1]};
            for (int k = 0; k < 2; ++k)
                if (trial[k].X.cols() > 0)
                    trial[k].X = trial[k].minus_psi.apply(Mat(st[k].X - alpha * F[k] * st[k].target_inv_sqrt));
            Mat Ft[2];
            OrbitalSet phit;
            double rt = evaluate(trial, Ft, phit);
            if (rt < r) {
                st[0] = trial[0];
                st[1] = trial[1];
                F[0] = Ft[0];
                F[1] = Ft[1];
                phi = phit;
                r = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw ConvergenceError("retraction", "Newton residual stopped decreasing (diverging); try smaller couplings or a smaller defect threshold");
        ++it;
        res.residual_history.push_back(r);
    }
    // refresh the projectors at the accepted point
    {
        HamiltonianPair Hphi = build_hamiltonians(phi, p);
        for (int k = 0; k < 2; ++k) {
            const Species sp = k == 0 ? Species::proton : Species::neutron;
            minus_phi[k] = projector_from_eig(eig(Hphi.of(sp), opt), sp, Sign::minus);
        }
    }
    res.projector_change_p = operator_norm_difference(st[0].minus_psi, minus_phi[0]);
    res.projector_change_n = operator_norm_difference(st[1].minus_psi, minus_phi[1]);
    if (res.projector_change_p >= 1.0 || res.projector_change_n >= 1.0)
        throw ConvergenceError("retraction", "one-to-one check failed: the negative projectors moved by norm >= 1");
    res.iterations = it;
    res.output = phi;
    res.distance = std::sqrt((phi.protons - in.protons).squaredNorm() +
                             (phi.neutrons - in.neutrons).squaredNorm()) * vol;
    return res;
}

} // namespace rmf
