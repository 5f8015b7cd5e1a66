#include "mimodf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mimodf {

std::complex<double> lu_determinant(Eigen::MatrixXcd a, double* min_pivot)
{
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_determinant: matrix is not square");
    const Eigen::Index n = a.rows();
    std::complex<double> det{1.0, 0.0};
    if (min_pivot) *min_pivot = n ? INFINITY : 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = k;
        double best = std::abs(a(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            if (const double v = std::abs(a(i, k)); v > best) {
                best = v;
                pivot = i;
            }
        }
        if (min_pivot) *min_pivot = std::min(*min_pivot, best);
        if (best == 0.0) return {0.0, 0.0};
        if (pivot != k) {
            a.row(k).swap(a.row(pivot));
            det = -det;
        }
        const std::complex<double> d = a(k, k);
        det *= d;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const std::complex<double> f = a(i, k) / d;
            if (f == std::complex<double>{}) continue;
            a.row(i).tail(n - k - 1) -= f * a.row(k).tail(n - k - 1);
        }
    }
    return det;
}

std::vector<double> psd_product_eigenvalues(const Eigen::MatrixXd& R, const Eigen::MatrixXd& G, double rel_cutoff)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(R);
    Eigen::VectorXd w = rs.eigenvalues();
    const double wmax = w.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = w(i) > 1e-12 * wmax ? std::sqrt(w(i)) : 0.0;
    const Eigen::MatrixXd root = rs.eigenvectors() * w.asDiagonal() * rs.eigenvectors().transpose();
    const Eigen::MatrixXd sym = root * G * root;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);

    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    std::vector<double> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > rel_cutoff * emax) out.push_back(ev(i));
    return out;
}

std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs, double imag_tol)
{
    std::vector<double> c = coeffs;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) return {};

    // companion matrix of the monic polynomial
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);

    std::vector<double> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z.imag()) <= imag_tol * std::max(1.0, std::abs(z))) roots.push_back(z.real());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace mimodf
