#include "rmf/sampling.hpp"

#include <cmath>

#include "rmf/hamiltonian.hpp"
#include "rmf/retraction.hpp"

namespace rmf {

namespace {
Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            double re = g(rng);
            double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}
} // namespace

Mat random_field(const Lattice& lat, Eigen::Index cols, std::mt19937_64& rng) {
    return gaussian_matrix(lat.dim(), cols, rng);
}

Mat random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    Mat a = gaussian_matrix(n, n, rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

OrbitalSet random_low_energy_orbitals(LatticePtr lat, const ModelParams& p, std::mt19937_64& rng,
                                      int spread, double noise) {
    const EigenPairs e = eig(MeanFieldOperator::free(Species::proton, lat, p.m_b));
    const Eigen::Index first = e.first_positive();
    const Eigen::Index avail = e.values.size() - first;
    auto species = [&](int count) {
        Eigen::Index k = std::min<Eigen::Index>(std::max(spread, count), avail);
        Mat basis(lat->dim(), k);
        for (Eigen::Index i = 0; i < k; ++i) basis.col(i) = e.orbital(*lat, first + i);
        Mat cols = basis * gaussian_matrix(k, count, rng);
        if (noise > 0.0 && count > 0) {
            Mat n = random_field(*lat, count, rng);
            for (Eigen::Index c = 0; c < count; ++c) {
                n.col(c) *= noise * cols.col(c).norm() / n.col(c).norm();
                cols.col(c) += n.col(c);
            }
        }
        return gram_normalize(*lat, cols, Mat::Identity(count, count));
    };
    Mat pr = species(p.Z);
    Mat nt = species(p.N);
    return OrbitalSet::with_identity_targets(lat, pr, nt);
}

} // namespace rmf
