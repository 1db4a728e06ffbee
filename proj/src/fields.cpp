#include "rmf/fields.hpp"

#include <cmath>

#include "rmf/error.hpp"
#include "rmf/kernels.hpp"

namespace rmf {

DensitySet DensitySet::zeros(std::size_t sites) {
    return {RVec::Zero(sites), RVec::Zero(sites), RVec::Zero(sites), RVec::Zero(sites)};
}

DensitySet DensitySet::mixed(const DensitySet& o, double theta) const {
    auto mix = [&](const RVec& a, const RVec& b) -> RVec { return theta * b + (1.0 - theta) * a; };
    return {mix(rho_s, o.rho_s), mix(rho_0, o.rho_0), mix(rho_00, o.rho_00), mix(rho_c, o.rho_c)};
}

void accumulate_species(const Lattice& lat, const Mat& cols, RVec& plain, RVec& bar) {
    if (!cols.allFinite()) throw PreconditionError("densities-fields", "orbital values are not finite");
    const auto& k = kernels::active();
    for (Eigen::Index c = 0; c < cols.cols(); ++c)
        k.accumulate_densities(cols.col(c).data(), 1.0, plain.data(), bar.data(), lat.sites());
}

DensitySet compute_densities(const OrbitalSet& o) {
    const Lattice& lat = *o.lattice;
    const std::size_t S = lat.sites();
    RVec pp = RVec::Zero(S), pb = RVec::Zero(S), np = RVec::Zero(S), nb = RVec::Zero(S);
    accumulate_species(lat, o.protons, pp, pb);
    accumulate_species(lat, o.neutrons, np, nb);
    return {pb + nb, pp + np, pp - np, pp};
}

namespace {

// real field -> real field through a radial momentum multiplier
template <class Mult>
RVec multiply(const Lattice& lat, const RVec& f, Mult&& mult) {
    const std::size_t S = lat.sites();
    Vec in = f.cast<cplx>(), hat(S), out(S);
    lat.forward(in.data(), hat.data(), 1);
    for (std::size_t p = 0; p < S; ++p) hat[p] *= mult(lat.k2()[p]);
    lat.inverse(hat.data(), out.data(), 1);
    return out.real();
}

} // namespace

RVec helmholtz(const Lattice& lat, const RVec& f, double m) {
    return multiply(lat, f, [m](double k2) { return k2 + m * m; });
}

MesonFieldSet solve_fields(const Lattice& lat, const DensitySet& rho, const ModelParams& p) {
    MesonFieldSet f;
    const double ms2 = p.m_sigma * p.m_sigma, mw2 = p.m_omega * p.m_omega,
                 mr2 = p.m_rho * p.m_rho;
    f.sigma = multiply(lat, rho.rho_s, [&](double k2) { return -p.g_sigma / (k2 + ms2); });
    f.omega0 = multiply(lat, rho.rho_0, [&](double k2) { return p.g_omega / (k2 + mw2); });
    f.R00 = multiply(lat, rho.rho_00, [&](double k2) { return p.g_rho / (k2 + mr2); });
    // uniform neutralizing background: the zero mode is dropped
    f.A0 = multiply(lat, rho.rho_c, [&](double k2) { return k2 > 0.0 ? p.e_charge / k2 : 0.0; });
    return f;
}

LocalPotential potential(Species s, const MesonFieldSet& f, const ModelParams& p) {
    LocalPotential v;
    v.s = p.g_sigma * f.sigma;
    if (s == Species::proton)
        v.w = p.g_omega * f.omega0 + p.g_rho * f.R00 + p.e_charge * f.A0;
    else
        v.w = p.g_omega * f.omega0 - p.g_rho * f.R00;
    return v;
}

double FieldResiduals::max() const { return std::max({sigma, omega, rho, coulomb}); }

FieldResiduals verify_field_equation(const Lattice& lat, const MesonFieldSet& f,
                                     const DensitySet& rho, const ModelParams& p) {
    auto rel = [&](const RVec& lhs, const RVec& source) {
        double d = l2_norm(lat, source);
        double r = l2_norm(lat, RVec(lhs - source));
        return d > 0.0 ? r / d : r;
    };
    FieldResiduals r;
    r.sigma = rel(helmholtz(lat, f.sigma, p.m_sigma), -p.g_sigma * rho.rho_s);
    r.omega = rel(helmholtz(lat, f.omega0, p.m_omega), p.g_omega * rho.rho_0);
    r.rho = rel(helmholtz(lat, f.R00, p.m_rho), p.g_rho * rho.rho_00);
    RVec neutral = rho.rho_c.array() - rho.rho_c.mean();
    // a uniform charge leaves only rounding noise after neutralization
    if (neutral.norm() <= 1e-13 * rho.rho_c.norm()) neutral.setZero();
    r.coulomb = rel(helmholtz(lat, f.A0, 0.0), p.e_charge * neutral);
    return r;
}

double integrate(const Lattice& lat, const RVec& f) { return f.sum() * lat.cell_volume(); }

double l2_norm(const Lattice& lat, const RVec& f) { return f.norm() * std::sqrt(lat.cell_volume()); }

double l2_distance(const Lattice& lat, const DensitySet& a, const DensitySet& b) {
    double s = (a.rho_s - b.rho_s).squaredNorm() + (a.rho_0 - b.rho_0).squaredNorm() +
               (a.rho_00 - b.rho_00).squaredNorm() + (a.rho_c - b.rho_c).squaredNorm();
    return std::sqrt(s * lat.cell_volume());
}

DensitySet translate(const Lattice& lat, const DensitySet& d, const std::array<int, 3>& shift) {
    return {translate_scalar(lat, d.rho_s, shift), translate_scalar(lat, d.rho_0, shift),
            translate_scalar(lat, d.rho_00, shift), translate_scalar(lat, d.rho_c, shift)};
}

} // namespace rmf
