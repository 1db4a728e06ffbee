#pragma once

#include "rmf/lattice.hpp"

namespace rmf {

enum class Species { proton, neutron };
const char* name(Species s);

struct ModelParams {
    double g_sigma = 0.0;
    double g_omega = 0.0;
    double g_rho = 0.0;
    double e_charge = 0.0;
    double m_sigma = 0.55;
    double m_omega = 0.83;
    double m_rho = 0.82;
    double m_b = 1.0;
    int Z = 0;
    int N = 0;
    int A() const { return Z + N; }
};

void validate(const ModelParams& p);

// Occupied orbitals as matrix columns (position-space values, length 4*sites).
// Occupation weights are all 1; Gram targets carry the norms.
struct OrbitalSet {
    LatticePtr lattice;
    Mat protons;
    Mat neutrons;
    Mat gram_target_p;
    Mat gram_target_n;

    const Mat& of(Species s) const { return s == Species::proton ? protons : neutrons; }
    Mat& of(Species s) { return s == Species::proton ? protons : neutrons; }
    const Mat& target(Species s) const { return s == Species::proton ? gram_target_p : gram_target_n; }
    Mat& target(Species s) { return s == Species::proton ? gram_target_p : gram_target_n; }

    // Identity Gram targets matching the current column counts.
    static OrbitalSet with_identity_targets(LatticePtr lat, Mat protons, Mat neutrons);
};

// L^2 Gram matrix of the columns
Mat gram(const Lattice& lat, const Mat& cols);
// L^2 overlaps a^* b
Mat overlap(const Lattice& lat, const Mat& a, const Mat& b);
// Frobenius L^2 norm of a column set
double l2_norm(const Lattice& lat, const Mat& cols);

} // namespace rmf
