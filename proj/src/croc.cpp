#include "mimodf/croc.hpp"

#include <cmath>
#include <stdexcept>

namespace mimodf {

std::string_view to_string(EngineTag engine)
{
    return engine == EngineTag::MonteCarlo ? "mc" : "analytic";
}

void check_grid(const std::vector<double>& thresholds)
{
    if (thresholds.empty()) throw std::invalid_argument("threshold grid is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!std::isfinite(thresholds[i])) throw std::invalid_argument("threshold grid has a non-finite value");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw std::invalid_argument("threshold grid must be strictly ascending");
    }
}

std::vector<double> linspace(double lo, double hi, int points)
{
    if (points < 1) throw std::invalid_argument("linspace: need at least one point");
    if (points == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    out.back() = hi;
    return out;
}

}  // namespace mimodf
