#include "mimodf/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mimodf/parallel.hpp"

namespace mimodf {
namespace {

// Per-user uniforms are drawn first so that, with common random numbers,
// both hypotheses see the same channels and noise.
DecisionVector decisions_from_uniforms(const std::vector<double>& u, double p_plus)
{
    DecisionVector d;
    d.x.resize(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) d.x[k] = u[k] < p_plus ? +1 : -1;
    return d;
}

double one_trial(const ProtocolScenario& sc, const SymbolPlacementMap& map, double p_plus, double alpha,
                 double noise_var, Engine rng)
{
    const int K = sc.geometry.K;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(K));
    for (double& v : u) v = unif(rng);
    const DecisionVector x = decisions_from_uniforms(u, p_plus);
    const EquivalentChannel H = build_equivalent_channel(map, draw_channel(K, sc.geometry.N, rng));
    return mrc_statistic(H, simulate_frame(H, x, noise_var, rng, alpha));
}

}  // namespace

int DecisionVector::nu() const
{
    return static_cast<int>(std::count(x.begin(), x.end(), +1));
}

DecisionVector draw_local_decisions(const LocalSensor& sensor, Hypothesis h, int K, Engine& rng)
{
    if (K < 1) throw std::invalid_argument("draw_local_decisions: K must be positive");
    sensor.validate();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(K));
    for (double& v : u) v = unif(rng);
    return decisions_from_uniforms(u, sensor.p_plus(h));
}

ChannelRealization draw_channel(int K, int N, Engine& rng)
{
    if (K < 1 || N < 1) throw std::invalid_argument("draw_channel: K and N must be positive");
    std::normal_distribution<double> g(0.0, 1.0);
    ChannelRealization ch;
    ch.h.resize(N, K);
    const double scale = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n) {
            const double re = g(rng);
            const double im = g(rng);
            ch.h(n, k) = cplx{re, im} * scale;
        }
    return ch;
}

ReceivedFrame simulate_frame(const EquivalentChannel& H, const DecisionVector& x, double noise_var, Engine& rng,
                             double alpha)
{
    if (H.H.cols() != x.K()) throw std::invalid_argument("simulate_frame: channel and decision sizes differ");
    if (!(noise_var >= 0)) throw std::invalid_argument("simulate_frame: noise variance must be >= 0");
    Eigen::VectorXcd xv(x.K());
    for (int k = 0; k < x.K(); ++k) xv(k) = x.x[static_cast<std::size_t>(k)];
    ReceivedFrame f;
    f.y = alpha * (H.H * xv);
    std::normal_distribution<double> g(0.0, 1.0);
    const double sd = std::sqrt(noise_var / 2);
    for (Eigen::Index m = 0; m < f.y.size(); ++m) {
        const double re = g(rng);
        const double im = g(rng);
        f.y(m) += cplx{re, im} * sd;
    }
    return f;
}

double mrc_statistic(const EquivalentChannel& H, const ReceivedFrame& frame)
{
    if (H.H.rows() != frame.y.size()) throw std::invalid_argument("mrc_statistic: frame length differs from M");
    return (H.H.adjoint() * frame.y).sum().real();
}

std::vector<double> sample_statistic(const ProtocolScenario& scenario, Hypothesis h, const McOptions& opts)
{
    if (opts.trials < 1) throw std::invalid_argument("Monte Carlo trials must be >= 1");
    scenario.sensor.validate();
    const SymbolPlacementMap map = placement_map(scenario.kind, scenario.geometry.K);
    const double alpha = opts.scaled_model ? scenario.alpha : 1.0;
    const double noise = opts.scaled_model ? scenario.noise.sigma_w2 : scenario.sigma_eff2;
    const double p_plus = scenario.sensor.p_plus(h);
    // common random numbers: H1 reuses the H0 stream
    const Hypothesis lane = opts.common_random_numbers ? Hypothesis::H0 : h;

    std::vector<double> out(static_cast<std::size_t>(opts.trials));
    parallel_for(out.size(), opts.workers, [&](std::size_t i) {
        out[i] = one_trial(scenario, map, p_plus, alpha, noise, opts.seed.stream(lane, i));
    });
    return out;
}

std::vector<double> exceedance(std::vector<double> samples, const std::vector<double>& thresholds)
{
    check_grid(thresholds);
    if (samples.empty()) throw std::invalid_argument("exceedance: no samples");
    std::sort(samples.begin(), samples.end());
    std::vector<double> q(thresholds.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), thresholds[i]);
        q[i] = static_cast<double>(above) / n;
    }
    return q;
}

CrocCurve estimate_croc(const ProtocolScenario& scenario, const std::vector<double>& thresholds,
                        const McOptions& opts)
{
    check_grid(thresholds);
    CrocCurve curve;
    curve.thresholds = thresholds;
    curve.q_f = exceedance(sample_statistic(scenario, Hypothesis::H0, opts), thresholds);
    curve.q_d = exceedance(sample_statistic(scenario, Hypothesis::H1, opts), thresholds);
    curve.scenario = scenario;
    curve.engine = EngineTag::MonteCarlo;
    curve.trials = opts.trials;
    return curve;
}

std::vector<double> default_threshold_grid(const ProtocolScenario& scenario, int points, const SeedSpec& seed,
                                           bool scaled_model)
{
    if (points < 2) throw std::invalid_argument("threshold grid needs at least two points");
    constexpr int pilot = 1000;
    const SymbolPlacementMap map = placement_map(scenario.kind, scenario.geometry.K);
    const double alpha = scaled_model ? scenario.alpha : 1.0;
    const double noise = scaled_model ? scenario.noise.sigma_w2 : scenario.sigma_eff2;
    std::vector<double> v;
    v.reserve(2 * pilot);
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1})
        for (int i = 0; i < pilot; ++i)
            v.push_back(one_trial(scenario, map, scenario.sensor.p_plus(h), alpha, noise,
                                  seed.auxiliary(static_cast<std::uint64_t>(i) * 2 + (h == Hypothesis::H1))));
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0;
    for (double s : v) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / (v.size() - 1));
    return linspace(mean - 6 * sd, mean + 6 * sd, points);
}

}  // namespace mimodf
