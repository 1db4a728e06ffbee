#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace rmf {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;

struct LatticeSpec {
    double box_length = 6.0;
    int points_per_dim = 4;
};

void validate(const LatticeSpec& spec);

enum class Representation { position, momentum };
enum class Sign { plus, minus };

// Periodic n^3 grid with its momentum table and FFT plans.
// Spinor data is site-major: value[4*site + component]; site = (i*n + j)*n + k.
class Lattice {
  public:
    explicit Lattice(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    int n() const { return spec_.points_per_dim; }
    double box_length() const { return spec_.box_length; }
    double spacing() const { return spec_.box_length / spec_.points_per_dim; }
    double cell_volume() const { double h = spacing(); return h * h * h; }
    std::size_t sites() const { return sites_; }
    std::size_t dim() const { return 4 * sites_; }

    std::size_t site(int i, int j, int k) const;
    std::array<int, 3> coords(std::size_t site) const;
    // signed mode number in {-n/2, ..., n/2-1}
    int mode(int j) const { return j < n() / 2 ? j : j - n(); }

    const std::vector<double>& kx() const { return kx_; }
    const std::vector<double>& ky() const { return ky_; }
    const std::vector<double>& kz() const { return kz_; }
    const std::vector<double>& k2() const { return k2_; }

    // unitary DFT of `components` interleaved scalar fields (1 or 4)
    void forward(const cplx* in, cplx* out, int components) const;
    void inverse(const cplx* in, cplx* out, int components) const;

  private:
    struct Plans;
    LatticeSpec spec_;
    std::size_t sites_;
    std::vector<double> kx_, ky_, kz_, k2_;
    std::shared_ptr<Plans> plans_;
};

using LatticePtr = std::shared_ptr<const Lattice>;
LatticePtr make_lattice(const LatticeSpec& spec);

namespace dirac {
Mat4 beta();
Mat4 alpha(int k); // k = 0,1,2
Mat4 gamma(int mu);
Eigen::Matrix2cd sigma(int k);
Mat4 symbol(double kx, double ky, double kz, double m); // alpha.k + beta m
} // namespace dirac

struct SpinorField {
    LatticePtr lattice;
    Representation rep = Representation::position;
    Vec values;

    static SpinorField zeros(LatticePtr lat, Representation rep = Representation::position);
    static SpinorField constant(LatticePtr lat, const Eigen::Vector4cd& spinor);
};

SpinorField to_momentum(const SpinorField& f);
SpinorField to_position(const SpinorField& f);

// L^2 inner product (conjugate-linear in the first slot); integrals are sums times cell volume
cplx l2_inner(const SpinorField& f, const SpinorField& g);
double l2_norm(const SpinorField& f);

SpinorField apply_H0(const SpinorField& f, double m_b);
SpinorField apply_abs_H0(const SpinorField& f, double m_b);
SpinorField apply_laplacian_shifted(const SpinorField& f, double m_b); // (-Delta + m^2)
cplx h_half_inner(const SpinorField& f, const SpinorField& g, double m_b);
SpinorField translate(const SpinorField& f, const std::array<int, 3>& shift);

class FreeProjector {
  public:
    FreeProjector(Sign sign, LatticePtr lattice, double m_b)
        : sign_(sign), lattice_(std::move(lattice)), m_b_(m_b) {}
    SpinorField apply(const SpinorField& f) const;
    Vec apply(const Vec& position_values) const;
    Mat dense() const;
    Sign sign() const { return sign_; }

  private:
    Sign sign_;
    LatticePtr lattice_;
    double m_b_;
};

FreeProjector free_projector(Sign sign, LatticePtr lattice, double m_b);

// Raw position-space vectors (length 4*sites) and matrices whose columns are such vectors.
Vec apply_H0(const Lattice& lat, const Vec& v, double m_b);
Mat apply_H0(const Lattice& lat, const Mat& m, double m_b);
Vec apply_abs_H0(const Lattice& lat, const Vec& v, double m_b, double power = 1.0);
Vec translate(const Lattice& lat, const Vec& v, const std::array<int, 3>& shift);

// Scalar fields (length sites).
RVec translate_scalar(const Lattice& lat, const RVec& v, const std::array<int, 3>& shift);

// Translation-invariant operator given by a 4x4 symbol per momentum node, assembled densely.
// The symbol callback receives the node index and writes the 4x4 block.
Mat dense_fourier_operator(const Lattice& lat, const std::function<Mat4(std::size_t)>& symbol);
Mat dense_H0(const Lattice& lat, double m_b);
Mat dense_abs_H0(const Lattice& lat, double m_b, double power = 1.0);

} // namespace rmf
