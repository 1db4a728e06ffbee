#pragma once

#include <string>
#include <vector>

#include "rmf/fields.hpp"

namespace rmf {

// H0 plus a pointwise potential s*beta + w*1, for one species.
class MeanFieldOperator {
  public:
    MeanFieldOperator(Species species, LatticePtr lattice, double m_b, LocalPotential v);
    static MeanFieldOperator free(Species species, LatticePtr lattice, double m_b);

    Vec apply(const Vec& v) const;
    Mat apply(const Mat& m) const;
    SpinorField apply(const SpinorField& f) const;
    Mat dense() const;
    Mat potential_dense() const;

    Species species() const { return species_; }
    const Lattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }
    double m_b() const { return m_b_; }
    const LocalPotential& potential() const { return v_; }

  private:
    Species species_;
    LatticePtr lattice_;
    double m_b_;
    LocalPotential v_;
};

struct HamiltonianPair {
    DensitySet densities;
    MesonFieldSet fields;
    MeanFieldOperator proton;
    MeanFieldOperator neutron;
    const MeanFieldOperator& of(Species s) const { return s == Species::proton ? proton : neutron; }
};

HamiltonianPair build_hamiltonians(LatticePtr lat, const DensitySet& rho, const ModelParams& p);
HamiltonianPair build_hamiltonians(const OrbitalSet& orbitals, const ModelParams& p);
MeanFieldOperator build_hamiltonian(Species s, const OrbitalSet& orbitals, const ModelParams& p);

struct EigOptions {
    std::size_t dense_cap = 4096;
    double zero_tol = 1e-9;
};

// Eigenvectors are l2-orthonormal raw vectors; orbital() rescales to unit L^2 norm.
struct EigenPairs {
    RVec values;
    Mat vectors;
    Vec orbital(const Lattice& lat, Eigen::Index i) const;
    Eigen::Index first_positive() const;
};

EigenPairs eig(const MeanFieldOperator& op, const EigOptions& opt = {});

// Projector onto a spectral subspace, stored as an l2-orthonormal basis of its range.
struct SpectralProjector {
    Species species = Species::proton;
    Sign sign = Sign::minus;
    Mat basis;

    Vec apply(const Vec& v) const { return basis * (basis.adjoint() * v); }
    Mat apply(const Mat& m) const { return basis * (basis.adjoint() * m); }
    SpinorField apply(const SpinorField& f) const;
    Mat dense() const { return basis * basis.adjoint(); }
    Eigen::Index rank() const { return basis.cols(); }
};

SpectralProjector projector_from_eig(const EigenPairs& e, Species s, Sign sign = Sign::minus);
SpectralProjector projector_from_eig(const MeanFieldOperator& op, Sign sign = Sign::minus,
                                     const EigOptions& opt = {});

struct ResolventOptions {
    int nodes = 256;
    double tol = 1e-8;     // allowed change between node counts N/2 and N, relative to |v|
    double cg_tol = 1e-13; // relative residual of the inner shifted solves
    int cg_max_iterations = 5000;
};

// (Lambda_B^- - Lambda_A^-) v by quadrature of the resolvent identity, matrix-free.
Vec projector_resolvent(const MeanFieldOperator& A, const MeanFieldOperator& B, const Vec& v,
                        const ResolventOptions& opt = {});
SpinorField projector_resolvent(const MeanFieldOperator& A, const MeanFieldOperator& B,
                                const SpinorField& v, const ResolventOptions& opt = {});

struct RegimeReport {
    double threshold = 0;               // 2/(pi/2 + 2/pi)
    double lhs[3] = {0, 0, 0};          // the three coupling sums, each divided by 4 pi
    bool ok[3] = {false, false, false}; // lhs < threshold
    double d_p = 0, d_n = 0;
    bool d_p_below_one = false, d_n_below_one = false;
    bool d_p_bounded = false, d_n_bounded = false; // d < 4/5
    bool all_ok() const;
    std::vector<std::string> failures() const;
    double margin(int i) const { return threshold - lhs[i]; }
};

RegimeReport validate_regime(const ModelParams& p);

struct SpeciesBounds {
    double d = 0;
    double min_eig_potential = 0; // min eig of d^{1/2}|H0| - V
    double min_eig_abs = 0;       // min eig of |H| - (1-d)^{1/2}|H0|
    double h_mu = 0;              // m_b * min singular value of |H0|^{-1/2} H |H0|^{-1/2}
};

struct HardyReport {
    double max_ratio = 0;
    double max_ratio_free_projected = 0;
    double limit = 0;                // pi/2
    double limit_free_projected = 0; // (pi/2 + 2/pi)/2
    int battery_size = 0;
    bool within() const { return max_ratio <= limit && max_ratio_free_projected <= limit_free_projected; }
};

struct OperatorBoundsReport {
    SpeciesBounds proton, neutron;
    HardyReport hardy;
};

OperatorBoundsReport check_operator_bounds(const OrbitalSet& orbitals, const ModelParams& p,
                                           const EigOptions& opt = {});
HardyReport hardy_battery(LatticePtr lat, double m_b);

} // namespace rmf
