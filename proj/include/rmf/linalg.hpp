#pragma once

#include <functional>

#include "rmf/lattice.hpp"

namespace rmf {

struct HermitianEig {
    RVec values; // ascending
    Mat vectors;
};

HermitianEig hermitian_eig(const Mat& m);

// f(M) for Hermitian M through its eigendecomposition
Mat hermitian_function(const Mat& m, const std::function<double(double)>& f);
Mat hermitian_sqrt(const Mat& m);     // principal root, eigenvalues clipped at 0
Mat hermitian_inv_sqrt(const Mat& m); // requires positive definite input

// Largest-modulus component made real positive; ties go to the lowest index.
void fix_phase(Eigen::Ref<Vec> v);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace rmf
