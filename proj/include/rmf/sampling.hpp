#pragma once

#include <random>

#include "rmf/model.hpp"

namespace rmf {

// Deterministic random orbital sets built from low-lying positive free eigenstates.
// `spread` positive states per species are mixed with random complex coefficients,
// then `noise` times a random smooth field is added before orthonormalization.
OrbitalSet random_low_energy_orbitals(LatticePtr lat, const ModelParams& p, std::mt19937_64& rng,
                                      int spread = 8, double noise = 0.0);

// Random complex matrix with entries of unit scale in each lattice value.
Mat random_field(const Lattice& lat, Eigen::Index cols, std::mt19937_64& rng);

// Random unitary matrix (QR of a complex Gaussian matrix).
Mat random_unitary(Eigen::Index n, std::mt19937_64& rng);

} // namespace rmf
