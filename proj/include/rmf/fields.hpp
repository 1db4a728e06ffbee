#pragma once

#include "rmf/model.hpp"

namespace rmf {

struct DensitySet {
    RVec rho_s;  // sum psi^* beta psi
    RVec rho_0;  // sum psi^* psi
    RVec rho_00; // protons minus neutrons
    RVec rho_c;  // protons only

    static DensitySet zeros(std::size_t sites);
    DensitySet mixed(const DensitySet& other, double theta) const; // theta*other + (1-theta)*this
};

struct MesonFieldSet {
    RVec sigma;
    RVec omega0;
    RVec R00;
    RVec A0;
};

// Pointwise potential V = s*beta + w*1 for one species.
struct LocalPotential {
    RVec s;
    RVec w;
};

DensitySet compute_densities(const OrbitalSet& orbitals);
// plain/bar densities of one column set, accumulated into the output vectors
void accumulate_species(const Lattice& lat, const Mat& cols, RVec& plain, RVec& bar);

MesonFieldSet solve_fields(const Lattice& lat, const DensitySet& rho, const ModelParams& p);
LocalPotential potential(Species s, const MesonFieldSet& f, const ModelParams& p);

struct FieldResiduals {
    double sigma = 0, omega = 0, rho = 0, coulomb = 0;
    double max() const;
};

FieldResiduals verify_field_equation(const Lattice& lat, const MesonFieldSet& f,
                                     const DensitySet& rho, const ModelParams& p);

// (-Delta + m^2) applied spectrally to a real scalar field; m = 0 gives -Delta
RVec helmholtz(const Lattice& lat, const RVec& f, double m);

double integrate(const Lattice& lat, const RVec& f);
double l2_norm(const Lattice& lat, const RVec& f);
double l2_distance(const Lattice& lat, const DensitySet& a, const DensitySet& b);
DensitySet translate(const Lattice& lat, const DensitySet& d, const std::array<int, 3>& shift);

} // namespace rmf
