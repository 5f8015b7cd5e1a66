#pragma once

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mimodf/croc.hpp"
#include "mimodf/mgf.hpp"

namespace mimodf {

/// The raw quadrature value fell outside [-tol, 1 + tol].
class QuadratureDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoFeasibleThreshold : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gauss-Chebyshev inversion settings.
///
/// The rule integrates along s(t) = c + jt + kappa t^2, a parabola through
/// the abscissa c that bends away from the singularities on the side where
/// e^{-gamma s} decays. With curvature = 0 it reduces to the textbook
/// vertical-line rule with scale |c|.
struct QuadratureConfig {
    int nodes = 500;              // even; nodes/2 are used by conjugate symmetry
    double abscissa_scale = 1.0;  // multiplies the automatically chosen c
    std::optional<double> abscissa;  // fixed c instead of the automatic one
    double curvature = 0.02;      // kappa relative to the gap to the nearest pole
    double tolerance = 1e-6;      // accepted overshoot outside [0, 1]

    void validate() const;
};

/// Abscissa used for a threshold: half the gap to the nearest pole on
/// whichever side of the origin gives the smaller integrand bound.
/// Negative values mean the complementary tail is integrated.
double choose_abscissa(const MgfEvaluator& mgf, double gamma, const QuadratureConfig& quad);

/// Pr(Lambda > gamma) under the law whose MGF is `mgf`.
double tail_probability(const MgfEvaluator& mgf, double gamma, const QuadratureConfig& quad = {});

/// Unclamped quadrature value, for diagnostics.
double tail_probability_raw(const MgfEvaluator& mgf, double gamma, const QuadratureConfig& quad = {});

/// q_f and q_d on a threshold grid. `backend` defaults to the closed form
/// where one exists.
CrocCurve analytic_croc(const ProtocolScenario& scenario, const std::vector<double>& thresholds,
                        const QuadratureConfig& quad = {}, std::optional<MgfBackend> backend = std::nullopt,
                        unsigned workers = 1);

struct BoundPoint {
    int g = 0;
    double q_f = 0;
    double q_m = 0;
};

/// Counting-rule performance with a noiseless reporting channel, g = 0..K+1.
std::vector<BoundPoint> observation_bound(int K, double p_f, double p_d);

struct NeymanPearson {
    double target_q_f;
};

struct Bayes {
    double p_0;
    double p_1;
};

using ThresholdCriterion = std::variant<NeymanPearson, Bayes>;

double select_threshold(const CrocCurve& curve, const ThresholdCriterion& criterion);

/// Linear interpolation of q_m at a given q_f along the curve (q_f is
/// non-increasing in the threshold). Where q_f is flat the smallest q_m is
/// returned. nullopt outside the covered range.
std::optional<double> q_m_at(const CrocCurve& curve, double q_f);

}  // namespace mimodf
