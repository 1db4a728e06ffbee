#include "rmf/model.hpp"

#include <cmath>

#include "rmf/error.hpp"

namespace rmf {

const char* name(Species s) { return s == Species::proton ? "proton" : "neutron"; }

void validate(const ModelParams& p) {
    auto nonneg = [](double v, const char* key) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw PreconditionError("model", std::string(key) + " must be a nonnegative real");
    };
    auto pos = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw PreconditionError("model", std::string(key) + " must be a positive real");
    };
    nonneg(p.g_sigma, "g_sigma");
    nonneg(p.g_omega, "g_omega");
    nonneg(p.g_rho, "g_rho");
    nonneg(p.e_charge, "e_charge");
    pos(p.m_sigma, "m_sigma");
    pos(p.m_omega, "m_omega");
    pos(p.m_rho, "m_rho");
    pos(p.m_b, "m_b");
    if (p.Z < 0 || p.N < 0) throw PreconditionError("model", "Z and N must be nonnegative");
}

OrbitalSet OrbitalSet::with_identity_targets(LatticePtr lat, Mat protons, Mat neutrons) {
    OrbitalSet o;
    o.lattice = std::move(lat);
    o.gram_target_p = Mat::Identity(protons.cols(), protons.cols());
    o.gram_target_n = Mat::Identity(neutrons.cols(), neutrons.cols());
    o.protons = std::move(protons);
    o.neutrons = std::move(neutrons);
    return o;
}

Mat gram(const Lattice& lat, const Mat& cols) {
    return lat.cell_volume() * (cols.adjoint() * cols);
}

Mat overlap(const Lattice& lat, const Mat& a, const Mat& b) {
    return lat.cell_volume() * (a.adjoint() * b);
}

double l2_norm(const Lattice& lat, const Mat& cols) {
    return cols.norm() * std::sqrt(lat.cell_volume());
}

} // namespace rmf
