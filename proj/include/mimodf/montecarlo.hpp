#pragma once

#include <cstdint>
#include <vector>

#include "mimodf/croc.hpp"
#include "mimodf/protocol.hpp"
#include "mimodf/rng.hpp"

namespace mimodf {

struct DecisionVector {
    std::vector<int> x;  // entries in {-1, +1}

    int K() const { return static_cast<int>(x.size()); }
    int nu() const;
};

struct ReceivedFrame {
    Eigen::VectorXcd y;
};

DecisionVector draw_local_decisions(const LocalSensor& sensor, Hypothesis h, int K, Engine& rng);

/// Unit-power circularly symmetric complex Gaussian entries.
ChannelRealization draw_channel(int K, int N, Engine& rng);

/// y = alpha * H x + w, w ~ CN(0, noise_var I).
ReceivedFrame simulate_frame(const EquivalentChannel& H, const DecisionVector& x, double noise_var, Engine& rng,
                             double alpha = 1.0);

/// Lambda = Re(1^t H^H y).
double mrc_statistic(const EquivalentChannel& H, const ReceivedFrame& frame);

struct McOptions {
    long long trials = 100000;
    SeedSpec seed;
    /// Draw both hypotheses from the same per-trial stream: channels and
    /// noise coincide, decisions use a shared uniform per user.
    bool common_random_numbers = false;
    /// Simulate the unnormalized model (alpha, sigma_w^2) instead of
    /// (1, sigma_eff^2). Thresholds are then on the alpha-scaled statistic.
    bool scaled_model = false;
    unsigned workers = 1;
};

/// One fusion-statistic sample per trial, indexed by trial. Deterministic in
/// (seed, trial) regardless of the worker count.
std::vector<double> sample_statistic(const ProtocolScenario& scenario, Hypothesis h, const McOptions& opts);

/// Empirical q_f and q_d on the grid; one sample of the statistic is reused
/// across all thresholds.
CrocCurve estimate_croc(const ProtocolScenario& scenario, const std::vector<double>& thresholds,
                        const McOptions& opts);

/// Exceedance fractions of a sample over an ascending grid, via sorting.
std::vector<double> exceedance(std::vector<double> samples, const std::vector<double>& thresholds);

/// Equally spaced grid over mean +- 6 std of the statistic, pooled over a
/// 1000-frame pilot per hypothesis on the auxiliary stream.
std::vector<double> default_threshold_grid(const ProtocolScenario& scenario, int points = 101,
                                           const SeedSpec& seed = {}, bool scaled_model = false);

}  // namespace mimodf
