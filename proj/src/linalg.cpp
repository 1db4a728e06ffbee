#include "rmf/linalg.hpp"

#include <cmath>
#include <numbers>

#include "rmf/error.hpp"

namespace rmf {

HermitianEig hermitian_eig(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success) throw ConvergenceError("linalg", "Hermitian eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Mat hermitian_function(const Mat& m, const std::function<double(double)>& f) {
    HermitianEig e = hermitian_eig(m);
    RVec fv = e.values.unaryExpr(f);
    return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Mat hermitian_sqrt(const Mat& m) {
    return hermitian_function(m, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Mat hermitian_inv_sqrt(const Mat& m) {
    HermitianEig e = hermitian_eig(m);
    if (e.values.size() > 0 && !(e.values[0] > 0.0))
        throw PreconditionError("linalg", "inverse square root of a non-positive matrix");
    RVec fv = e.values.unaryExpr([](double x) { return 1.0 / std::sqrt(x); });
    return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

void fix_phase(Eigen::Ref<Vec> v) {
    if (v.size() == 0) return;
    double best = -1.0;
    Eigen::Index at = 0;
    // a later component must win by more than roundoff to displace an earlier one
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = std::abs(v[i]);
        if (a > best * (1.0 + 1e-12)) {
            best = a;
            at = i;
        }
    }
    if (best <= 0.0) return;
    cplx phase = std::conj(v[at]) / best;
    v *= phase;
    v[at] = cplx(std::abs(v[at]), 0.0);
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
    if (count < 1) throw PreconditionError("linalg", "quadrature needs at least one node");
    nodes.assign(count, 0.0);
    weights.assign(count, 0.0);
    for (int i = 0; i < (count + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= count; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (count == 1) p0 = 1.0, p1 = x;
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= count; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
        }
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = weights[count - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace rmf
