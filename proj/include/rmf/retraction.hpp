#pragma once

#include <vector>

#include "rmf/hamiltonian.hpp"

namespace rmf {

struct NewtonConfig {
    int max_iterations = 60;
    double tolerance = 1e-10;      // L^2 norm of the residual map
    double damping = 1.0;          // initial step length
    int max_backtracks = 30;
    double defect_threshold = 0.3; // admissible |Lambda^- Psi| on input
};

struct RetractionProblem {
    OrbitalSet input; // gram targets taken from input.gram_target_p / _n
    NewtonConfig newton;
};

struct RetractionResult {
    OrbitalSet output;
    int iterations = 0;
    std::vector<double> residual_history;
    double input_defect_p = 0, input_defect_n = 0;
    double distance = 0;             // |Phi - Psi| over both species
    double projector_change_p = 0;   // |Lambda^-_Psi - Lambda^-_Phi| (operator norm)
    double projector_change_n = 0;
};

// cols . Gram(cols)^{-1/2} . target^{1/2}
Mat gram_normalize(const Lattice& lat, const Mat& cols, const Mat& target);
OrbitalSet gram_normalize(const OrbitalSet& o);

// Lambda^+ Psi~ . Gram(Lambda^+ Psi~)^{-1/2}, where Psi~ is the orthonormalized input
Mat positive_lift(const Lattice& lat, const Mat& cols, const SpectralProjector& plus);
Mat positive_lift(const OrbitalSet& o, Species s, const ModelParams& p, const EigOptions& opt = {});

// Largest per-orbital |Lambda^-_{mu,Psi} psi_i| from a fresh eigendecomposition of H_{mu,Psi}.
struct ProjectorDefect {
    double proton = 0, neutron = 0;
    double total_p = 0, total_n = 0; // Frobenius over the species
    double max() const { return std::max(proton, neutron); }
};
ProjectorDefect projector_defect(const OrbitalSet& o, const ModelParams& p, const EigOptions& opt = {});

RetractionResult retract(const RetractionProblem& problem, const ModelParams& p,
                         const EigOptions& opt = {});

} // namespace rmf
