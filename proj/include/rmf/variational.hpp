#pragma once

#include <functional>
#include <vector>

#include "rmf/hamiltonian.hpp"

namespace rmf {

struct EnergyBreakdown {
    double kinetic = 0;
    double sigma_term = 0;
    double omega_term = 0;
    double rho_term = 0;
    double coulomb_term = 0;
    double total = 0;
    double total_split_route = 0; // kinetic + half the potential expectation values
};

EnergyBreakdown energy(const OrbitalSet& orbitals, const ModelParams& p);

struct ELReport {
    std::vector<double> eps_p, eps_n;
    std::vector<double> residual_p, residual_n;
    double max_residual() const;
};

ELReport el_residual(const OrbitalSet& orbitals, const ModelParams& p);

struct GradientCheck {
    double analytic = 0;
    std::vector<double> steps;
    std::vector<double> finite_difference;
    std::vector<double> relative_error;
    double best_relative_error = 0;
    double observed_order = 0; // from the first two steps; NaN when both errors vanish
};

// `direction` uses the same column layout as `orbitals`.
GradientCheck energy_gradient_check(const OrbitalSet& orbitals, const ModelParams& p,
                                    const OrbitalSet& direction,
                                    const std::vector<double>& steps = {1e-3, 1e-4, 1e-5});

// Rank-Z and rank-N projectors held as L^2-orthonormal columns.
struct DensityMatrixPair {
    LatticePtr lattice;
    Mat gamma_p;
    Mat gamma_n;

    static DensityMatrixPair from_orbitals(const OrbitalSet& o);
    OrbitalSet orbitals() const;
    void check(double tol = 1e-10) const;
    const Mat& of(Species s) const { return s == Species::proton ? gamma_p : gamma_n; }
    Mat& of(Species s) { return s == Species::proton ? gamma_p : gamma_n; }
};

struct CommutatorResidual {
    double proton = 0;
    double neutron = 0;
    double max() const { return std::max(proton, neutron); }
};

// Hilbert-Schmidt norm of [H, sum_i |psi_i><psi_i|] for any column set with invertible Gram.
double commutator_norm(const MeanFieldOperator& H, const Mat& cols);
CommutatorResidual commutator_residual(const DensityMatrixPair& gamma, const ModelParams& p);

struct DescentStep {
    DensityMatrixPair gamma;
    double predicted_change = 0;
};

DescentStep commutator_descent_step(const DensityMatrixPair& gamma, const ModelParams& p,
                                    double epsilon, const EigOptions& opt = {});

// One constrained solve: Gram targets diag(lambda) over all A orbitals (protons first).
struct ConstrainedOutcome {
    double energy = 0;
    bool converged = false;
    int iterations = 0;
};
using ConstrainedSolver = std::function<ConstrainedOutcome(const std::vector<double>& lambda)>;

struct SubadditivityReport {
    std::vector<double> lambda;
    double I_full = 0;
    double I_lambda = 0;
    double I_complement = 0;
    double gap = 0;
    double slack = 0;
    bool weak_holds = false; // gap >= -slack
    bool strict = false;     // gap > slack, reported only
};

SubadditivityReport subadditivity_probe(const ModelParams& p, const std::vector<double>& lambda,
                                        const ConstrainedSolver& solver, double slack = 1e-7,
                                        int threads = 1);

struct ConcentrationReport {
    double radius = 0;
    double value = 0;
    std::size_t center = 0;
    std::array<int, 3> center_coords{0, 0, 0};
};

ConcentrationReport concentration_profile(const OrbitalSet& orbitals, double radius);

} // namespace rmf
