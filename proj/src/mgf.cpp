#include "mimodf/mgf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mimodf/linalg.hpp"

namespace mimodf {
namespace {

constexpr double kPoleEps = 64 * std::numeric_limits<double>::epsilon();

using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b)
{
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly power(const Poly& p, int e)
{
    Poly out{1.0};
    for (int i = 0; i < e; ++i) out = multiply(out, p);
    return out;
}

cplx ipow(cplx z, int e)
{
    cplx r{1.0, 0.0};
    for (int i = 0; i < e; ++i) r *= z;
    return r;
}

struct Evaluated {
    cplx value;
    double scale;  // sum |c_k| |s|^k, for the pole test
};

Evaluated horner(const Poly& c, cplx s)
{
    cplx v{0.0, 0.0};
    double scale = 0.0;
    const double as = std::abs(s);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        v = v * s + *it;
        scale = scale * as + std::abs(*it);
    }
    return {v, scale};
}

// roots of c0 + c1 s + c2 s^2 with c2 != 0 (always real for these kernels)
void quadratic_roots(double c0, double c1, double c2, std::vector<double>& out)
{
    const double disc = std::max(0.0, c1 * c1 - 4 * c2 * c0);
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    if (q != 0.0) {
        out.push_back(q / c2);
        out.push_back(c0 / q);
    }
}

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<int> representative(int K, int nu)
{
    std::vector<int> x(static_cast<std::size_t>(K), -1);
    std::fill_n(x.begin(), nu, +1);
    return x;
}

[[noreturn]] void throw_pole(cplx s)
{
    std::ostringstream os;
    os << "MGF evaluated at a pole: s = " << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag())
       << "j";
    throw PoleError(os.str(), s);
}

void check_nu(int K, int nu)
{
    if (nu < 0 || nu > K) throw std::invalid_argument("nu must lie in [0, K]");
}

}  // namespace

std::string_view to_string(MgfBackend backend)
{
    return backend == MgfBackend::ClosedForm ? "closed" : "determinant";
}

Eigen::Matrix2d coupling_matrix()
{
    Eigen::Matrix2d F;
    F << 0.0, -0.5, -0.5, 0.0;
    return F;
}

Eigen::MatrixXd coupling_block(int L)
{
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    for (int l = 0; l < L; ++l) G.block<2, 2>(2 * l, 2 * l) = coupling_matrix();
    return G;
}

QuadraticFormSpec build_quadratic_form(const SymbolPlacementMap& map, const std::vector<int>& x, double sigma2)
{
    const int K = map.K();
    const int L = map.L();
    if (static_cast<int>(x.size()) != K) throw std::invalid_argument("build_quadratic_form: decision vector length != K");

    QuadraticFormSpec qf;
    qf.L = L;
    qf.R = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    // S_{ll'}[k,k'] = 1 when slots (l,k) and (l',k') carry the same user
    for (int l = 0; l < L; ++l) {
        for (int lp = 0; lp < L; ++lp) {
            double xSx = 0, xS1 = 0, oneSx = 0, oneS1 = 0;
            for (int k = 0; k < K; ++k) {
                const int u = map.at(l, k);
                if (u == 0) continue;
                for (int kp = 0; kp < K; ++kp) {
                    if (map.at(lp, kp) != u) continue;
                    xSx += x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(kp)];
                    xS1 += x[static_cast<std::size_t>(k)];
                    oneSx += x[static_cast<std::size_t>(kp)];
                    oneS1 += 1.0;
                }
            }
            qf.R(2 * l, 2 * lp) = xSx + (l == lp ? sigma2 : 0.0);
            qf.R(2 * l, 2 * lp + 1) = xS1;
            qf.R(2 * l + 1, 2 * lp) = oneSx;
            qf.R(2 * l + 1, 2 * lp + 1) = oneS1;
        }
    }
    qf.Q = qf.R * coupling_block(L);
    return qf;
}

cplx conditional_mgf_det(const QuadraticFormSpec& qf, cplx s, int N)
{
    const Eigen::Index n = qf.Q.rows();
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) + s * qf.Q.cast<cplx>();
    double pivot = 0;
    const cplx det = lu_determinant(A, &pivot);
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(pivot > kPoleEps * norm) || !std::isfinite(std::abs(det))) throw_pole(s);
    return 1.0 / ipow(det, N);
}

bool has_closed_form(ProtocolKind kind, int K)
{
    return kind != ProtocolKind::CMAC || K == 1 || K == 2 || K == 3;
}

std::vector<double> closed_form_kernel(ProtocolKind kind, int K, int nu, double sigma2)
{
    check_nu(K, nu);
    const double k = K;
    const double n = nu;
    const double s2 = sigma2;
    // every protocol collapses to the single-link model at K = 1
    if (K == 1) kind = ProtocolKind::MAC;
    switch (kind) {
    case ProtocolKind::MAC:
        return {1.0, k - 2 * n, n * (n - k) - k * s2 / 4};
    case ProtocolKind::PAC:
        return multiply(power({1.0, 1.0, -s2 / 4}, K - nu), power({1.0, -1.0, -s2 / 4}, nu));
    case ProtocolKind::CPAC:
        return power({1.0, -(2 * n - k), -k * s2 / 4}, K);
    case ProtocolKind::CMAC:
        if (K == 2)
            return {1.0, 4 * (1 - n), 3 * (n - 1) * (n - 1) - s2, 1.5 * (n - 1) * s2, 3.0 / 16 * s2 * s2};
        if (K == 3) {
            const double sign = (nu % 2 == 0) ? 1.0 : -1.0;
            return {1.0,
                    3 * (3 - 2 * n),
                    7 * n * n - 21 * n + 15 - 9.0 / 4 * s2,
                    (5 * s2 - 3) / 2 * (2 * n - 3) + 2.5 * sign,
                    s2 / 4 * (15.0 / 4 * s2 - 21 - 11 * n * n + 33 * n),
                    -7.0 / 16 * s2 * s2 * (2 * n - 3),
                    -7.0 / 64 * s2 * s2 * s2};
        }
        break;
    }
    throw UnsupportedClosedForm("no closed-form MGF for " + std::string(to_string(kind)) + " with K = " +
                                std::to_string(K));
}

cplx conditional_mgf_closed(ProtocolKind kind, int nu, cplx s, double sigma2, int K, int N)
{
    check_nu(K, nu);
    if (K == 1) kind = ProtocolKind::MAC;
    const double k = K;
    const double n = nu;
    // each factor is tested on its own: the evaluation error of a product is
    // governed by its factors, not by the product of their scales
    auto factor = [&s](const Poly& c) {
        const Evaluated e = horner(c, s);
        if (!(std::abs(e.value) > kPoleEps * e.scale)) throw_pole(s);
        return e.value;
    };
    cplx det;
    switch (kind) {
    case ProtocolKind::MAC:
        det = factor({1.0, k - 2 * n, n * (n - k) - k * sigma2 / 4});
        break;
    case ProtocolKind::PAC:
        det = 1.0;
        if (nu < K) det *= ipow(factor({1.0, 1.0, -sigma2 / 4}), K - nu);
        if (nu > 0) det *= ipow(factor({1.0, -1.0, -sigma2 / 4}), nu);
        break;
    case ProtocolKind::CPAC:
        det = ipow(factor({1.0, -(2 * n - k), -k * sigma2 / 4}), K);
        break;
    case ProtocolKind::CMAC:
        det = factor(closed_form_kernel(kind, K, nu, sigma2));
        break;
    }
    return 1.0 / ipow(det, N);
}

MgfBackend preferred_backend(ProtocolKind kind, int K)
{
    return has_closed_form(kind, K) ? MgfBackend::ClosedForm : MgfBackend::Determinant;
}

namespace {

// Phases linked by a shared symbol column or a shared user coefficient. The
// statistic is a sum of independent contributions over such groups, so the
// mixture over decisions factorizes across them.
struct PhaseGroup {
    SymbolPlacementMap map;     // relabelled columns and users
    std::vector<int> columns;   // original column of each group column
};

std::vector<PhaseGroup> split_phase_groups(const SymbolPlacementMap& map)
{
    const int K = map.K(), L = map.L();
    std::vector<int> parent(static_cast<std::size_t>(L));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        return v;
    };
    std::vector<int> by_column(static_cast<std::size_t>(K), -1), by_user(static_cast<std::size_t>(K + 1), -1);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) {
            const int u = map.at(l, k);
            if (u == 0) continue;
            for (int* seen : {&by_column[static_cast<std::size_t>(k)], &by_user[static_cast<std::size_t>(u)]}) {
                if (*seen < 0) *seen = l;
                else parent[static_cast<std::size_t>(find(l))] = find(*seen);
            }
        }

    std::vector<PhaseGroup> groups;
    std::vector<int> root_index(static_cast<std::size_t>(L), -1);
    std::vector<std::vector<int>> phases;
    for (int l = 0; l < L; ++l) {
        int& idx = root_index[static_cast<std::size_t>(find(l))];
        if (idx < 0) {
            idx = static_cast<int>(phases.size());
            phases.emplace_back();
        }
        phases[static_cast<std::size_t>(idx)].push_back(l);
    }
    for (const auto& ph : phases) {
        std::vector<int> cols, users;
        for (int l : ph)
            for (int k = 0; k < K; ++k)
                if (const int u = map.at(l, k); u != 0) {
                    cols.push_back(k);
                    users.push_back(u);
                }
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        std::sort(users.begin(), users.end());
        users.erase(std::unique(users.begin(), users.end()), users.end());
        const int Kc = static_cast<int>(cols.size());
        std::vector<int> slots(ph.size() * cols.size(), 0);
        for (std::size_t i = 0; i < ph.size(); ++i)
            for (int c = 0; c < Kc; ++c)
                if (const int u = map.at(ph[i], cols[static_cast<std::size_t>(c)]); u != 0)
                    slots[i * cols.size() + static_cast<std::size_t>(c)] =
                        static_cast<int>(std::lower_bound(users.begin(), users.end(), u) - users.begin()) + 1;
        // a column whose symbol rides on no coefficient of its own would need
        // a user count different from the column count; cannot happen here
        if (users.size() > cols.size()) throw std::logic_error("phase group has more users than symbols");
        groups.push_back({SymbolPlacementMap(Kc, static_cast<int>(ph.size()), std::move(slots)), std::move(cols)});
    }
    return groups;
}

}  // namespace

MgfEvaluator::MgfEvaluator(ProtocolKind kind, int K, int N, double sigma2, double p_plus, MgfBackend backend)
    : kind_(kind), K_(K), N_(N), sigma2_(sigma2), p_(p_plus), backend_(backend)
{
    if (K < 1 || N < 1) throw std::invalid_argument("MgfEvaluator: K and N must be positive");
    if (!(sigma2 > 0) || !std::isfinite(sigma2)) throw std::invalid_argument("MgfEvaluator: sigma2 must be positive");
    if (!(p_plus >= 0.0 && p_plus <= 1.0)) throw std::invalid_argument("MgfEvaluator: p must lie in [0,1]");
    if (backend == MgfBackend::ClosedForm && !has_closed_form(kind, K))
        throw UnsupportedClosedForm("no closed-form MGF for " + std::string(to_string(kind)) + " with K = " +
                                    std::to_string(K));

    std::vector<double> poles;
    auto weight = [&](int Kg, int nu, bool collapsed) {
        return (collapsed ? binomial(Kg, nu) : 1.0) * std::pow(p_plus, nu) * std::pow(1.0 - p_plus, Kg - nu);
    };

    if (backend == MgfBackend::ClosedForm) {
        // PAC users are independent: K identical single-link factors
        Group g{kind, K, 1, {}};
        if (kind == ProtocolKind::PAC || K == 1) g = Group{ProtocolKind::MAC, 1, K, {}};
        for (int nu = 0; nu <= g.K; ++nu) {
            const double w = weight(g.K, nu, true);
            if (w == 0.0) continue;
            g.terms.push_back({w, nu, {}});
            const double k = g.K, n = nu;
            switch (g.kind) {
            case ProtocolKind::MAC: quadratic_roots(1.0, k - 2 * n, n * (n - k) - k * sigma2 / 4, poles); break;
            case ProtocolKind::CPAC: quadratic_roots(1.0, -(2 * n - k), -k * sigma2 / 4, poles); break;
            case ProtocolKind::CMAC: {
                // det(I + sQ) has a real spectrum, so imaginary parts are rounding
                const auto r = real_polynomial_roots(closed_form_kernel(g.kind, g.K, nu, sigma2), 1e-3);
                poles.insert(poles.end(), r.begin(), r.end());
                break;
            }
            case ProtocolKind::PAC: break;  // mapped to single-link groups above
            }
        }
        groups_.push_back(std::move(g));
    } else {
        // nu alone determines the conditional MGF except for CMAC beyond
        // three users, where every configuration is enumerated
        const bool collapse = has_closed_form(kind, K);
        for (const PhaseGroup& pg : split_phase_groups(placement_map(kind, K))) {
            const int Kg = pg.map.K();
            const Eigen::MatrixXd G = coupling_block(pg.map.L());
            Group g{kind, Kg, 1, {}};
            auto add = [&](const std::vector<int>& x, int nu, double w) {
                if (w == 0.0) return;
                Term t{w, nu, build_quadratic_form(pg.map, x, sigma2)};
                for (double ev : psd_product_eigenvalues(t.qf.R, G)) poles.push_back(-1.0 / ev);
                g.terms.push_back(std::move(t));
            };
            if (collapse) {
                for (int nu = 0; nu <= Kg; ++nu) add(representative(Kg, nu), nu, weight(Kg, nu, true));
            } else {
                for (unsigned mask = 0; mask < (1u << Kg); ++mask) {
                    std::vector<int> x(static_cast<std::size_t>(Kg));
                    int nu = 0;
                    for (int k = 0; k < Kg; ++k) {
                        const bool plus = (mask >> k) & 1u;
                        x[static_cast<std::size_t>(k)] = plus ? 1 : -1;
                        nu += plus;
                    }
                    add(x, nu, weight(Kg, nu, false));
                }
            }
            groups_.push_back(std::move(g));
        }
    }

    // repeated roots come back from the eigen-solves split by ~eps^(1/m);
    // merge within a tolerance that covers triple roots
    std::sort(poles.begin(), poles.end());
    for (double p : poles) {
        if (!std::isfinite(p)) continue;
        if (poles_.empty() || std::abs(p - poles_.back()) > 1e-5 * std::abs(p)) poles_.push_back(p);
    }
}

std::size_t MgfEvaluator::terms() const
{
    std::size_t n = 0;
    for (const Group& g : groups_) n += g.terms.size();
    return n;
}

cplx MgfEvaluator::operator()(cplx s) const
{
    cplx total{1.0, 0.0};
    for (const Group& g : groups_) {
        cplx sum{0.0, 0.0};
        for (const Term& t : g.terms) {
            const cplx phi = backend_ == MgfBackend::ClosedForm ? conditional_mgf_closed(g.kind, t.nu, s, sigma2_, g.K, N_)
                                                                : conditional_mgf_det(t.qf, s, N_);
            sum += t.weight * phi;
        }
        total *= ipow(sum, g.multiplicity);
    }
    return total;
}

cplx unconditional_mgf(ProtocolKind kind, int K, int N, double sigma2, double p_plus, cplx s, MgfBackend backend)
{
    return MgfEvaluator(kind, K, N, sigma2, p_plus, backend)(s);
}

}  // namespace mimodf
