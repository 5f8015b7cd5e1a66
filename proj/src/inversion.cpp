#include "mimodf/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mimodf/parallel.hpp"

namespace mimodf {
namespace {

struct Strip {
    std::optional<double> lowest_positive;   // smallest positive pole
    std::optional<double> highest_negative;  // negative pole closest to 0
};

Strip convergence_strip(const std::vector<double>& poles)
{
    Strip s;
    for (double p : poles) {
        if (p > 0 && (!s.lowest_positive || p < *s.lowest_positive)) s.lowest_positive = p;
        if (p < 0 && (!s.highest_negative || p > *s.highest_negative)) s.highest_negative = p;
    }
    return s;
}

double integrand_bound(const MgfEvaluator& mgf, double gamma, double c)
{
    return std::abs(mgf(cplx{c, 0.0})) * std::exp(-gamma * c) / std::abs(c);
}

}  // namespace

void QuadratureConfig::validate() const
{
    if (nodes < 2 || nodes % 2 != 0) throw std::invalid_argument("quadrature nodes must be an even integer >= 2");
    if (!(abscissa_scale > 0) || !(abscissa_scale <= 1))
        throw std::invalid_argument("abscissa_scale must lie in (0, 1]");
    if (!(curvature >= 0) || !std::isfinite(curvature)) throw std::invalid_argument("curvature must be >= 0");
    if (!(tolerance >= 0)) throw std::invalid_argument("quadrature tolerance must be >= 0");
    if (abscissa && (*abscissa == 0 || !std::isfinite(*abscissa)))
        throw std::invalid_argument("fixed abscissa must be finite and nonzero");
}

double choose_abscissa(const MgfEvaluator& mgf, double gamma, const QuadratureConfig& quad)
{
    const Strip strip = convergence_strip(mgf.poles());
    if (quad.abscissa) {
        const double c = *quad.abscissa;
        if ((strip.lowest_positive && c >= *strip.lowest_positive) ||
            (strip.highest_negative && c <= *strip.highest_negative))
            throw std::invalid_argument("fixed abscissa lies outside the convergence strip");
        return c;
    }
    std::optional<double> best;
    double best_bound = 0;
    for (const auto& edge : {strip.lowest_positive, strip.highest_negative}) {
        if (!edge) continue;
        const double c = *edge / 2;
        const double bound = integrand_bound(mgf, gamma, c);
        // ties go to the right half-plane
        if (!best || bound < best_bound) {
            best = c;
            best_bound = bound;
        }
    }
    if (!best) throw std::domain_error("MGF has no finite real poles; the statistic is degenerate");
    return *best * quad.abscissa_scale;
}

double tail_probability_raw(const MgfEvaluator& mgf, double gamma, const QuadratureConfig& quad)
{
    quad.validate();
    if (!std::isfinite(gamma)) throw std::invalid_argument("threshold must be finite");
    const double c = choose_abscissa(mgf, gamma, quad);

    // nearest singularities either side of c; the origin counts as one
    const std::vector<double>& poles = mgf.poles();
    double r = c < 0 ? 0.0 : INFINITY, l = c > 0 ? 0.0 : -INFINITY;
    double far_right = r, far_left = l;
    for (double p : poles) {
        if (p > c) {
            r = std::min(r, p);
            far_right = std::isfinite(far_right) ? std::max(far_right, p) : p;
        } else if (p < c) {
            l = std::max(l, p);
            far_left = std::isfinite(far_left) ? std::min(far_left, p) : p;
        }
    }
    const double d = std::min(r - c, c - l);

    double kappa = 0, b = std::abs(c);
    if (quad.curvature > 0) {
        // open toward the side where e^{-gamma s} decays
        double extent;
        if (gamma >= 0) {
            kappa = quad.curvature / (r - c);
            extent = std::isfinite(far_right) ? far_right - c : d;
        } else {
            kappa = -quad.curvature / (c - l);
            extent = std::isfinite(far_left) ? c - far_left : d;
        }
        const double t_max = std::sqrt(std::max(extent, d) / std::abs(kappa));
        b = std::sqrt(d * std::max(t_max, d));
    }

    const int half = quad.nodes / 2;
    double sum = 0;
    for (int k = 1; k <= half; ++k) {
        const double theta = (2 * k - 1) * std::numbers::pi / (2.0 * quad.nodes);
        const double tau = std::tan(theta);
        const double t = b * tau;
        const cplx s{c + kappa * t * t, t};
        const cplx jacobian{1.0, -2 * kappa * t};  // (ds/dt) / j
        sum += (mgf(s) * std::exp(-gamma * s) * jacobian / s).real() * b * (1 + tau * tau);
    }
    const double v = sum / quad.nodes;
    return c > 0 ? v : 1.0 + v;
}

double tail_probability(const MgfEvaluator& mgf, double gamma, const QuadratureConfig& quad)
{
    const double v = tail_probability_raw(mgf, gamma, quad);
    if (!(v >= -quad.tolerance && v <= 1 + quad.tolerance)) {
        std::ostringstream os;
        os << "quadrature diverged: raw tail probability " << v << " at gamma = " << gamma;
        throw QuadratureDivergence(os.str());
    }
    return std::clamp(v, 0.0, 1.0);
}

CrocCurve analytic_croc(const ProtocolScenario& scenario, const std::vector<double>& thresholds,
                        const QuadratureConfig& quad, std::optional<MgfBackend> backend, unsigned workers)
{
    check_grid(thresholds);
    quad.validate();
    const auto& g = scenario.geometry;
    const MgfBackend be = backend.value_or(preferred_backend(scenario.kind, g.K));
    const MgfEvaluator h0(scenario.kind, g.K, g.N, scenario.sigma_eff2, scenario.sensor.p_f, be);
    const MgfEvaluator h1(scenario.kind, g.K, g.N, scenario.sigma_eff2, scenario.sensor.p_d, be);

    CrocCurve curve;
    curve.thresholds = thresholds;
    curve.q_f.resize(thresholds.size());
    curve.q_d.resize(thresholds.size());
    curve.scenario = scenario;
    curve.engine = EngineTag::Analytic;
    curve.nodes = quad.nodes;

    parallel_for(thresholds.size(), workers, [&](std::size_t i) {
        curve.q_f[i] = tail_probability(h0, thresholds[i], quad);
        curve.q_d[i] = tail_probability(h1, thresholds[i], quad);
    });

    // isotonic cleanup, bounded by the quadrature tolerance
    for (auto* q : {&curve.q_f, &curve.q_d}) {
        for (std::size_t i = 1; i < q->size(); ++i) {
            const double rise = (*q)[i] - (*q)[i - 1];
            if (rise <= 0) continue;
            if (rise > quad.tolerance) {
                std::ostringstream os;
                os << "analytic CROC not monotone at gamma = " << thresholds[i] << " (rise " << rise << ")";
                throw QuadratureDivergence(os.str());
            }
            (*q)[i] = (*q)[i - 1];
        }
    }
    return curve;
}

std::vector<BoundPoint> observation_bound(int K, double p_f, double p_d)
{
    if (K < 1) throw std::invalid_argument("observation_bound: K must be positive");
    if (!(p_f >= 0 && p_f <= 1 && p_d >= 0 && p_d <= 1))
        throw std::invalid_argument("observation_bound: probabilities must lie in [0,1]");
    auto pmf = [K](double p) {
        std::vector<double> w(static_cast<std::size_t>(K + 1));
        double binom = 1;
        for (int nu = 0; nu <= K; ++nu) {
            w[static_cast<std::size_t>(nu)] = binom * std::pow(p, nu) * std::pow(1 - p, K - nu);
            binom = binom * (K - nu) / (nu + 1);
        }
        return w;
    };
    const auto w0 = pmf(p_f), w1 = pmf(p_d);
    std::vector<BoundPoint> out;
    for (int g = 0; g <= K + 1; ++g) {
        BoundPoint b{g, 0, 0};
        // the pmf need not sum to exactly 1; pin the endpoints
        if (g == 0) b.q_f = 1;
        else for (int nu = g; nu <= K; ++nu) b.q_f += w0[static_cast<std::size_t>(nu)];
        if (g == K + 1) b.q_m = 1;
        else for (int nu = 0; nu < g; ++nu) b.q_m += w1[static_cast<std::size_t>(nu)];
        out.push_back(b);
    }
    return out;
}

double select_threshold(const CrocCurve& curve, const ThresholdCriterion& criterion)
{
    if (curve.size() == 0) throw std::invalid_argument("select_threshold: empty curve");
    if (const auto* np = std::get_if<NeymanPearson>(&criterion)) {
        for (std::size_t i = 0; i < curve.size(); ++i)
            if (curve.q_f[i] <= np->target_q_f) return curve.thresholds[i];
        std::ostringstream os;
        os << "no threshold on the grid reaches q_f <= " << np->target_q_f;
        throw NoFeasibleThreshold(os.str());
    }
    const auto& bayes = std::get<Bayes>(criterion);
    std::size_t best = 0;
    double best_pe = INFINITY;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double pe = bayes.p_0 * curve.q_f[i] + bayes.p_1 * curve.q_m(i);
        if (pe < best_pe) {
            best_pe = pe;
            best = i;
        }
    }
    return curve.thresholds[best];
}

std::optional<double> q_m_at(const CrocCurve& curve, double q_f)
{
    // on flat stretches of q_f the lowest q_m is the one a detector can reach
    std::optional<double> best;
    auto offer = [&](double v) { best = best ? std::min(*best, v) : v; };
    for (std::size_t j = 0; j < curve.size(); ++j)
        if (curve.q_f[j] == q_f) offer(curve.q_m(j));
    for (std::size_t j = 1; j < curve.size(); ++j) {
        const double hi = curve.q_f[j - 1], lo = curve.q_f[j];
        if (!(lo < q_f && q_f < hi)) continue;
        const double w = (q_f - lo) / (hi - lo);
        offer((1 - w) * curve.q_m(j) + w * curve.q_m(j - 1));
    }
    return best;
}

}  // namespace mimodf
