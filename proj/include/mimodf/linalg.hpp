#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mimodf {

/// Determinant of a square complex matrix by LU factorization with partial
/// pivoting. The argument is taken by value and factored in place. When
/// `min_pivot` is given it receives the smallest pivot magnitude, the usual
/// numerical-singularity indicator.
std::complex<double> lu_determinant(Eigen::MatrixXcd a, double* min_pivot = nullptr);

/// Nonzero real eigenvalues of R * G where R is symmetric positive
/// semidefinite and G symmetric. Computed through the congruent symmetric
/// matrix R^{1/2} G R^{1/2}, which keeps the structural zeros of R*G exact
/// instead of splitting them into O(sqrt(eps)) pairs the way a general
/// eigen-solver does on defective matrices. Eigenvalues whose magnitude is
/// below `rel_cutoff` times the largest one are discarded.
std::vector<double> psd_product_eigenvalues(const Eigen::MatrixXd& R, const Eigen::MatrixXd& G,
                                            double rel_cutoff = 1e-9);

/// Real roots of a real polynomial, coefficients in ascending order
/// (c[0] + c[1] s + ...). Roots with imaginary part above `imag_tol`
/// (relative to their magnitude) are dropped.
std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs, double imag_tol = 1e-7);

}  // namespace mimodf
