#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmf/variational.hpp"

namespace rmf {

enum class InitialGuess { free_eigenstates, provided };

struct SCFConfig {
    int max_iterations = 300;
    double mixing = 0.3;
    double tol_eigenvalue = 1e-9;
    double tol_density = 1e-9;
    double tol_el = 1e-8;
    InitialGuess initial_guess = InitialGuess::free_eigenstates;
    std::optional<OrbitalSet> provided; // used with InitialGuess::provided
    bool warn_and_proceed = false;
    EigOptions eig;
};

void validate(const SCFConfig& c);

struct SCFIteration {
    int iteration = 0;
    double energy = 0;
    std::vector<double> eps_p, eps_n;
    double density_residual = 0;
    double max_delta_eps = 0;
    double el_residual = 0;
};

struct SCFReport {
    bool converged = false;
    int iterations = 0;
    std::vector<SCFIteration> history;
    OrbitalSet orbitals;
    std::vector<double> lambda; // Gram targets over all A slots, protons first
    std::vector<double> eps_p, eps_n;
    EnergyBreakdown energy;
    double el_residual = 0;
    double commutator_residual = 0;
    RegimeReport regime;
    bool degenerate_p = false, degenerate_n = false; // last occupied level shares its eigenvalue
    std::vector<std::string> warnings;
    RVec spectrum_p, spectrum_n; // eigenvalues at the last iteration
};

SCFReport scf_solve(const ModelParams& p, const LatticeSpec& lattice, const SCFConfig& config);
SCFReport scf_solve_constrained(const ModelParams& p, const LatticeSpec& lattice,
                                const SCFConfig& config, const std::vector<double>& lambda);

// Orbitals of the lowest positive free eigenstates, weighted by sqrt(lambda).
OrbitalSet free_initial_guess(LatticePtr lat, const ModelParams& p, const std::vector<double>& lambda,
                              const EigOptions& opt = {});

ConstrainedSolver scf_solver_handle(const ModelParams& p, const LatticeSpec& lattice,
                                    const SCFConfig& config);

} // namespace rmf
