#include "rmf/lattice.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "rmf/error.hpp"
#include "rmf/kernels.hpp"

namespace rmf {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Lattice::Plans {
    // index: [direction][components == 4]
    fftw_plan plan[2][2] = {{nullptr, nullptr}, {nullptr, nullptr}};
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (auto& row : plan)
            for (auto& p : row)
                if (p) fftw_destroy_plan(p);
    }
};

void validate(const LatticeSpec& spec) {
    if (!(spec.box_length > 0.0) || !std::isfinite(spec.box_length))
        throw PreconditionError("lattice", "box_length must be positive");
    if (spec.points_per_dim < 2 || spec.points_per_dim % 2 != 0)
        throw PreconditionError("lattice", "points_per_dim must be an even integer >= 2");
}

Lattice::Lattice(const LatticeSpec& spec) : spec_(spec) {
    validate(spec);
    const int nn = spec.points_per_dim;
    sites_ = std::size_t(nn) * nn * nn;
    kx_.resize(sites_);
    ky_.resize(sites_);
    kz_.resize(sites_);
    k2_.resize(sites_);
    const double dk = 2.0 * std::numbers::pi / spec.box_length;
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j)
            for (int k = 0; k < nn; ++k) {
                std::size_t s = site(i, j, k);
                kx_[s] = dk * mode(i);
                ky_[s] = dk * mode(j);
                kz_[s] = dk * mode(k);
                k2_[s] = kx_[s] * kx_[s] + ky_[s] * ky_[s] + kz_[s] * kz_[s];
            }

    plans_ = std::make_shared<Plans>();
    std::vector<cplx> a(4 * sites_), b(4 * sites_);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const int dims[3] = {nn, nn, nn};
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (int dir = 0; dir < 2; ++dir) {
        int sgn = dir == 0 ? FFTW_FORWARD : FFTW_BACKWARD;
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        plans_->plan[dir][0] = fftw_plan_dft(3, dims, pa, pb, sgn, flags);
        plans_->plan[dir][1] =
            fftw_plan_many_dft(3, dims, 4, pa, nullptr, 4, 1, pb, nullptr, 4, 1, sgn, flags);
    }
}

LatticePtr make_lattice(const LatticeSpec& spec) { return std::make_shared<const Lattice>(spec); }

std::size_t Lattice::site(int i, int j, int k) const {
    const int nn = n();
    i = ((i % nn) + nn) % nn;
    j = ((j % nn) + nn) % nn;
    k = ((k % nn) + nn) % nn;
    return (std::size_t(i) * nn + j) * nn + k;
}

std::array<int, 3> Lattice::coords(std::size_t s) const {
    const int nn = n();
    return {int(s / (std::size_t(nn) * nn)), int((s / nn) % nn), int(s % nn)};
}

static void run_fft(fftw_plan plan, const cplx* in, cplx* out, std::size_t count) {
    // FFTW may not preserve the input for out-of-place plans of rank > 1, so copy first.
    std::vector<cplx> tmp(in, in + count);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
}

void Lattice::forward(const cplx* in, cplx* out, int components) const {
    const std::size_t count = sites_ * components;
    run_fft(plans_->plan[0][components == 4], in, out, count);
    const double scale = 1.0 / std::sqrt(double(sites_));
    for (std::size_t i = 0; i < count; ++i) out[i] *= scale;
}

void Lattice::inverse(const cplx* in, cplx* out, int components) const {
    const std::size_t count = sites_ * components;
    run_fft(plans_->plan[1][components == 4], in, out, count);
    const double scale = 1.0 / std::sqrt(double(sites_));
    for (std::size_t i = 0; i < count; ++i) out[i] *= scale;
}

namespace dirac {

Eigen::Matrix2cd sigma(int k) {
    const cplx I(0, 1);
    Eigen::Matrix2cd s;
    switch (k) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -I, I, 0; break;
    default: s << 1, 0, 0, -1; break;
    }
    return s;
}

Mat4 beta() {
    Mat4 b = Mat4::Zero();
    b.diagonal() << 1, 1, -1, -1;
    return b;
}

Mat4 alpha(int k) {
    Mat4 a = Mat4::Zero();
    a.block<2, 2>(0, 2) = sigma(k);
    a.block<2, 2>(2, 0) = sigma(k);
    return a;
}

Mat4 gamma(int mu) { return mu == 0 ? beta() : Mat4(beta() * alpha(mu - 1)); }

Mat4 symbol(double kx, double ky, double kz, double m) {
    return kx * alpha(0) + ky * alpha(1) + kz * alpha(2) + m * beta();
}

} // namespace dirac

SpinorField SpinorField::zeros(LatticePtr lat, Representation rep) {
    SpinorField f;
    f.values = Vec::Zero(lat->dim());
    f.lattice = std::move(lat);
    f.rep = rep;
    return f;
}

SpinorField SpinorField::constant(LatticePtr lat, const Eigen::Vector4cd& spinor) {
    SpinorField f = zeros(lat);
    for (std::size_t s = 0; s < lat->sites(); ++s) f.values.segment<4>(4 * s) = spinor;
    return f;
}

SpinorField to_momentum(const SpinorField& f) {
    if (f.rep == Representation::momentum) return f;
    SpinorField g = SpinorField::zeros(f.lattice, Representation::momentum);
    f.lattice->forward(f.values.data(), g.values.data(), 4);
    return g;
}

SpinorField to_position(const SpinorField& f) {
    if (f.rep == Representation::position) return f;
    SpinorField g = SpinorField::zeros(f.lattice, Representation::position);
    f.lattice->inverse(f.values.data(), g.values.data(), 4);
    return g;
}

static void require_same(const SpinorField& f, const SpinorField& g) {
    if (f.lattice->n() != g.lattice->n() || f.lattice->box_length() != g.lattice->box_length())
        throw PreconditionError("lattice", "fields live on different lattices");
}

cplx l2_inner(const SpinorField& f, const SpinorField& g) {
    require_same(f, g);
    const Vec& a = f.rep == Representation::position ? f.values : to_position(f).values;
    const Vec& b = g.rep == Representation::position ? g.values : to_position(g).values;
    return a.dot(b) * f.lattice->cell_volume();
}

double l2_norm(const SpinorField& f) {
    return f.values.norm() * std::sqrt(f.lattice->cell_volume());
}

namespace {

template <class Symbol>
Vec apply_multiplier(const Lattice& lat, const Vec& v, Symbol&& symbol) {
    Vec hat(lat.dim()), out(lat.dim());
    lat.forward(v.data(), hat.data(), 4);
    Vec res(lat.dim());
    symbol(hat.data(), res.data());
    lat.inverse(res.data(), out.data(), 4);
    return out;
}

void h0_symbol(const Lattice& lat, double m_b, const cplx* in, cplx* out) {
    kernels::active().dirac_symbol(lat.kx().data(), lat.ky().data(), lat.kz().data(), m_b, in,
                                   out, lat.sites());
}

} // namespace

Vec apply_H0(const Lattice& lat, const Vec& v, double m_b) {
    return apply_multiplier(lat, v, [&](const cplx* in, cplx* out) { h0_symbol(lat, m_b, in, out); });
}

Mat apply_H0(const Lattice& lat, const Mat& m, double m_b) {
    Mat out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = apply_H0(lat, Vec(m.col(c)), m_b);
    return out;
}

Vec apply_abs_H0(const Lattice& lat, const Vec& v, double m_b, double power) {
    return apply_multiplier(lat, v, [&](const cplx* in, cplx* out) {
        for (std::size_t p = 0; p < lat.sites(); ++p) {
            const double e = std::pow(m_b * m_b + lat.k2()[p], 0.5 * power);
            for (int c = 0; c < 4; ++c) out[4 * p + c] = e * in[4 * p + c];
        }
    });
}

SpinorField apply_H0(const SpinorField& f, double m_b) {
    if (f.rep == Representation::momentum) {
        SpinorField g = SpinorField::zeros(f.lattice, Representation::momentum);
        h0_symbol(*f.lattice, m_b, f.values.data(), g.values.data());
        return g;
    }
    SpinorField g = f;
    g.values = apply_H0(*f.lattice, f.values, m_b);
    return g;
}

SpinorField apply_abs_H0(const SpinorField& f, double m_b) {
    SpinorField g = to_position(f);
    g.values = apply_abs_H0(*f.lattice, g.values, m_b);
    return f.rep == Representation::momentum ? to_momentum(g) : g;
}

SpinorField apply_laplacian_shifted(const SpinorField& f, double m_b) {
    const Lattice& lat = *f.lattice;
    SpinorField g = to_position(f);
    g.values = apply_multiplier(lat, g.values, [&](const cplx* in, cplx* out) {
        for (std::size_t p = 0; p < lat.sites(); ++p)
            for (int c = 0; c < 4; ++c) out[4 * p + c] = (lat.k2()[p] + m_b * m_b) * in[4 * p + c];
    });
    return f.rep == Representation::momentum ? to_momentum(g) : g;
}

cplx h_half_inner(const SpinorField& f, const SpinorField& g, double m_b) {
    require_same(f, g);
    const Lattice& lat = *f.lattice;
    const SpinorField fh = to_momentum(f), gh = to_momentum(g);
    cplx acc = 0;
    for (std::size_t p = 0; p < lat.sites(); ++p) {
        const double e = std::sqrt(m_b * m_b + lat.k2()[p]);
        cplx node = 0;
        for (int c = 0; c < 4; ++c) node += std::conj(fh.values[4 * p + c]) * gh.values[4 * p + c];
        acc += e * node;
    }
    return acc * lat.cell_volume();
}

Vec translate(const Lattice& lat, const Vec& v, const std::array<int, 3>& shift) {
    Vec out(v.size());
    for (std::size_t s = 0; s < lat.sites(); ++s) {
        auto c = lat.coords(s);
        std::size_t t = lat.site(c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]);
        out.segment<4>(4 * t) = v.segment<4>(4 * s);
    }
    return out;
}

RVec translate_scalar(const Lattice& lat, const RVec& v, const std::array<int, 3>& shift) {
    RVec out(v.size());
    for (std::size_t s = 0; s < lat.sites(); ++s) {
        auto c = lat.coords(s);
        out[lat.site(c[0] + shift[0], c[1] + shift[1], c[2] + shift[2])] = v[s];
    }
    return out;
}

SpinorField translate(const SpinorField& f, const std::array<int, 3>& shift) {
    SpinorField g = to_position(f);
    g.values = translate(*f.lattice, g.values, shift);
    return f.rep == Representation::momentum ? to_momentum(g) : g;
}

Vec FreeProjector::apply(const Vec& v) const {
    const Lattice& lat = *lattice_;
    const double sgn = sign_ == Sign::plus ? 1.0 : -1.0;
    return apply_multiplier(lat, v, [&](const cplx* in, cplx* out) {
        h0_symbol(lat, m_b_, in, out);
        for (std::size_t p = 0; p < lat.sites(); ++p) {
            const double e = std::sqrt(m_b_ * m_b_ + lat.k2()[p]);
            for (int c = 0; c < 4; ++c) {
                std::size_t i = 4 * p + c;
                out[i] = 0.5 * (in[i] + sgn * out[i] / e);
            }
        }
    });
}

SpinorField FreeProjector::apply(const SpinorField& f) const {
    SpinorField g = to_position(f);
    g.values = apply(g.values);
    return f.rep == Representation::momentum ? to_momentum(g) : g;
}

Mat FreeProjector::dense() const {
    const Lattice& lat = *lattice_;
    const double sgn = sign_ == Sign::plus ? 1.0 : -1.0;
    return dense_fourier_operator(lat, [&](std::size_t p) {
        const double e = std::sqrt(m_b_ * m_b_ + lat.k2()[p]);
        Mat4 h = dirac::symbol(lat.kx()[p], lat.ky()[p], lat.kz()[p], m_b_);
        return Mat4(0.5 * (Mat4::Identity() + (sgn / e) * h));
    });
}

FreeProjector free_projector(Sign sign, LatticePtr lattice, double m_b) {
    return FreeProjector(sign, std::move(lattice), m_b);
}

Mat dense_fourier_operator(const Lattice& lat, const std::function<Mat4(std::size_t)>& symbol) {
    const std::size_t S = lat.sites();
    // Column block for source site 0: K_d(x) = F^-1[symbol(k) e_d F(delta_0)](x)
    Mat kernel(lat.dim(), 4);
    std::vector<Mat4> sym(S);
    for (std::size_t p = 0; p < S; ++p) sym[p] = symbol(p);
    for (int d = 0; d < 4; ++d) {
        Vec delta = Vec::Zero(lat.dim());
        delta[d] = 1.0;
        Vec hat(lat.dim()), res(lat.dim()), out(lat.dim());
        lat.forward(delta.data(), hat.data(), 4);
        for (std::size_t p = 0; p < S; ++p) res.segment<4>(4 * p) = sym[p] * hat.segment<4>(4 * p);
        lat.inverse(res.data(), out.data(), 4);
        kernel.col(d) = out;
    }
    Mat M(lat.dim(), lat.dim());
    for (std::size_t y = 0; y < S; ++y) {
        auto cy = lat.coords(y);
        for (std::size_t x = 0; x < S; ++x) {
            auto cx = lat.coords(x);
            std::size_t r = lat.site(cx[0] - cy[0], cx[1] - cy[1], cx[2] - cy[2]);
            M.block<4, 4>(4 * x, 4 * y) = kernel.block<4, 4>(4 * r, 0);
        }
    }
    return M;
}

Mat dense_H0(const Lattice& lat, double m_b) {
    Mat M = dense_fourier_operator(lat, [&](std::size_t p) {
        return dirac::symbol(lat.kx()[p], lat.ky()[p], lat.kz()[p], m_b);
    });
    return 0.5 * (M + M.adjoint());
}

Mat dense_abs_H0(const Lattice& lat, double m_b, double power) {
    Mat M = dense_fourier_operator(lat, [&](std::size_t p) {
        return Mat4(std::pow(m_b * m_b + lat.k2()[p], 0.5 * power) * Mat4::Identity());
    });
    return 0.5 * (M + M.adjoint());
}

} // namespace rmf
