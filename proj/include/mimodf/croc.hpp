#pragma once

#include <string>
#include <vector>

#include "mimodf/protocol.hpp"

namespace mimodf {

enum class EngineTag { MonteCarlo, Analytic };

std::string_view to_string(EngineTag engine);

/// Complementary ROC sampled on an ascending threshold grid. Both engines
/// produce this type so their outputs can be compared point by point.
struct CrocCurve {
    std::vector<double> thresholds;
    std::vector<double> q_f;
    std::vector<double> q_d;

    ProtocolScenario scenario;
    EngineTag engine = EngineTag::MonteCarlo;
    long long trials = 0;  // Monte Carlo only
    int nodes = 0;         // quadrature only

    std::size_t size() const { return thresholds.size(); }
    double q_m(std::size_t i) const { return 1.0 - q_d[i]; }
};

/// Validates a threshold grid: non-empty, finite, strictly ascending.
void check_grid(const std::vector<double>& thresholds);

std::vector<double> linspace(double lo, double hi, int points);

}  // namespace mimodf
