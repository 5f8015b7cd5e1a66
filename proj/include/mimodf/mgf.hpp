#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimodf/protocol.hpp"

namespace mimodf {

enum class MgfBackend { ClosedForm, Determinant };

std::string_view to_string(MgfBackend backend);

/// Raised when a closed-form MGF is requested for a protocol/K pair that has
/// none (CMAC beyond K = 3). Callers fall back to the determinant backend.
class UnsupportedClosedForm : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the MGF is evaluated on (or numerically at) one of its poles.
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, cplx s) : std::domain_error(what), s_(s) {}
    cplx s() const { return s_; }

private:
    cplx s_;
};

/// Conditional second-order description of the stacked per-antenna vector
/// v_n = (y_n[1], g_n[1], ..., y_n[L], g_n[L]) with g the row sums of H_eq.
/// -Lambda is the sum over antennas of v_n^H (I_L kron F) v_n.
struct QuadraticFormSpec {
    int L = 0;
    Eigen::MatrixXd R;  // 2L x 2L covariance given the decisions
    Eigen::MatrixXd Q;  // R * (I_L kron F)
};

/// The 2x2 coupling matrix F = [[0, -1/2], [-1/2, 0]].
Eigen::Matrix2d coupling_matrix();

/// I_L kron F.
Eigen::MatrixXd coupling_block(int L);

/// Builds R(x) and Q(x) from the coefficient-sharing pattern of the
/// placement map. `x` holds the +-1 decisions.
QuadraticFormSpec build_quadratic_form(const SymbolPlacementMap& map, const std::vector<int>& x, double sigma2);

/// 1 / det(I + s Q)^N through LU.
cplx conditional_mgf_det(const QuadraticFormSpec& qf, cplx s, int N);

/// Coefficients (ascending powers of s) of det(I + s Q(x)) for a decision
/// vector with nu entries equal to +1, for the protocols with known
/// closed forms. PAC and CPAC are returned as the full product polynomial.
std::vector<double> closed_form_kernel(ProtocolKind kind, int K, int nu, double sigma2);

/// 1 / det(I + s Q(x))^N evaluated with the closed-form kernels.
cplx conditional_mgf_closed(ProtocolKind kind, int nu, cplx s, double sigma2, int K, int N);

/// True when closed_form_kernel supports (kind, K).
bool has_closed_form(ProtocolKind kind, int K);

/// MGF of -Lambda (i.e. E[exp(s Lambda)]) under a hypothesis, mixing the
/// conditional MGFs over the local decision configurations. The mixture is
/// collapsed onto nu whenever the conditional MGF depends on x only through
/// nu; CMAC with K >= 4 enumerates all 2^K configurations.
///
/// Phases that share neither a symbol nor a user coefficient contribute
/// independently, and the mixture is evaluated as a product over such
/// groups (for PAC: K single-link factors). Summing the expanded binomial
/// mixture instead loses accuracy wherever the factors nearly cancel.
class MgfEvaluator {
public:
    MgfEvaluator(ProtocolKind kind, int K, int N, double sigma2, double p_plus, MgfBackend backend);

    cplx operator()(cplx s) const;

    ProtocolKind kind() const { return kind_; }
    int K() const { return K_; }
    int N() const { return N_; }
    double sigma2() const { return sigma2_; }
    double p_plus() const { return p_; }
    MgfBackend backend() const { return backend_; }

    /// Real singularities of the MGF (poles over every configuration with
    /// nonzero weight), ascending, duplicates merged. Zero is never a pole.
    const std::vector<double>& poles() const { return poles_; }

    /// Number of conditional MGFs evaluated per call.
    std::size_t terms() const;

private:
    struct Term {
        double weight;
        int nu;
        QuadraticFormSpec qf;  // determinant backend only
    };
    // independent factor of the MGF, raised to `multiplicity`
    struct Group {
        ProtocolKind kind;
        int K;
        int multiplicity;
        std::vector<Term> terms;
    };

    ProtocolKind kind_;
    int K_;
    int N_;
    double sigma2_;
    double p_;
    MgfBackend backend_;
    std::vector<Group> groups_;
    std::vector<double> poles_;
};

/// Convenience wrapper matching the functional form.
cplx unconditional_mgf(ProtocolKind kind, int K, int N, double sigma2, double p_plus, cplx s, MgfBackend backend);

/// Backend used when the caller does not force one: closed form where it
/// exists, determinant otherwise.
MgfBackend preferred_backend(ProtocolKind kind, int K);

}  // namespace mimodf
