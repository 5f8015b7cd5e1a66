#include "mimodf/protocol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mimodf {

std::string_view to_string(ProtocolKind kind)
{
    switch (kind) {
    case ProtocolKind::MAC: return "MAC";
    case ProtocolKind::PAC: return "PAC";
    case ProtocolKind::CMAC: return "CMAC";
    case ProtocolKind::CPAC: return "CPAC";
    }
    return "?";
}

std::string_view to_string(PowerConstraint constraint)
{
    return constraint == PowerConstraint::UnitPower ? "power" : "energy";
}

ProtocolKind parse_protocol(std::string_view name)
{
    if (name == "MAC" || name == "mac") return ProtocolKind::MAC;
    if (name == "PAC" || name == "pac") return ProtocolKind::PAC;
    if (name == "CMAC" || name == "cmac") return ProtocolKind::CMAC;
    if (name == "CPAC" || name == "cpac") return ProtocolKind::CPAC;
    throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

PowerConstraint parse_constraint(std::string_view name)
{
    if (name == "power" || name == "p") return PowerConstraint::UnitPower;
    if (name == "energy" || name == "e") return PowerConstraint::UnitEnergy;
    throw std::invalid_argument("unknown constraint '" + std::string(name) + "'");
}

void LocalSensor::validate() const
{
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(p_f) || !in_unit(p_d) || !in_unit(p_0) || !in_unit(p_1))
        throw std::invalid_argument("sensor probabilities must lie in [0,1]");
    if (std::abs(p_0 + p_1 - 1.0) > 1e-12)
        throw std::invalid_argument("priors p_0 and p_1 must sum to 1");
}

SymbolPlacementMap::SymbolPlacementMap(int K, int L, std::vector<int> slots)
    : K_(K), L_(L), slots_(std::move(slots))
{
    if (K < 1 || L < 1 || slots_.size() != static_cast<std::size_t>(K) * static_cast<std::size_t>(L))
        throw std::invalid_argument("placement map dimensions do not match K x L");
    for (int v : slots_)
        if (v < 0 || v > K) throw std::invalid_argument("placement map entry out of range");
}

std::string ProtocolScenario::label() const
{
    std::ostringstream os;
    os << to_string(kind) << "_K" << geometry.K << "_N" << geometry.N << '_' << to_string(constraint);
    return os.str();
}

FrameGeometry frame_geometry(ProtocolKind kind, int K, int N)
{
    if (K < 1 || N < 1) throw std::invalid_argument("frame_geometry: K and N must be positive");
    FrameGeometry g;
    g.K = K;
    g.N = N;
    switch (kind) {
    case ProtocolKind::MAC: g.L = 1; g.q = 1; break;
    case ProtocolKind::PAC: g.L = K; g.q = 1; break;
    case ProtocolKind::CMAC: g.L = 2 * K - 1; g.q = K; break;
    case ProtocolKind::CPAC: g.L = K * K; g.q = K; break;
    }
    g.M = g.L * N;
    g.eta = static_cast<double>(K) / g.L;
    return g;
}

double scaling_factor(ProtocolKind kind, PowerConstraint constraint, int K, double T)
{
    if (K < 1 || !(T > 0)) throw std::invalid_argument("scaling_factor: K >= 1 and T > 0 required");
    const double k = K;
    if (constraint == PowerConstraint::UnitPower) {
        switch (kind) {
        case ProtocolKind::MAC: return std::sqrt(T);
        case ProtocolKind::PAC: return std::sqrt(k * T);
        case ProtocolKind::CMAC: return std::sqrt((2 * k - 1) / k * T);
        case ProtocolKind::CPAC: return std::sqrt(k * T);
        }
    }
    switch (kind) {
    case ProtocolKind::MAC:
    case ProtocolKind::PAC: return 1.0;
    case ProtocolKind::CMAC:
    case ProtocolKind::CPAC: return std::sqrt(1.0 / k);
    }
    return 1.0;
}

double equivalent_noise_variance(ProtocolKind kind, int K, double N_o)
{
    if (!(N_o > 0)) throw std::invalid_argument("equivalent_noise_variance: N_o must be positive");
    return N_o / frame_geometry(kind, K, 1).eta;
}

double snr_to_noise(PowerConstraint constraint, int K, double T, double snr)
{
    if (!(snr > 0) || !std::isfinite(snr)) throw std::invalid_argument("snr_to_noise: snr must be positive");
    return constraint == PowerConstraint::UnitPower ? K * T / snr : K / snr;
}

SymbolPlacementMap placement_map(ProtocolKind kind, int K)
{
    const FrameGeometry g = frame_geometry(kind, K, 1);
    std::vector<int> slots(static_cast<std::size_t>(g.L * K), 0);
    auto set = [&](int phase, int column, int user) { slots[static_cast<std::size_t>(phase * K + column)] = user; };

    // phases and columns are zero-based here, user ids one-based
    switch (kind) {
    case ProtocolKind::MAC:
        for (int k = 0; k < K; ++k) set(0, k, k + 1);
        break;
    case ProtocolKind::PAC:
        for (int k = 0; k < K; ++k) set(k, k, k + 1);
        break;
    case ProtocolKind::CMAC:
        for (int k = 0; k < K; ++k) set(k, k, k + 1);
        for (int i = 1; i < K; ++i)
            for (int k = 0; k < K; ++k) set(K + i - 1, k, cyclic_index(k + 1 + i, K));
        break;
    case ProtocolKind::CPAC:
        for (int i = 0; i < K; ++i)
            for (int r = 0; r < K; ++r) set(i * K + r, r, cyclic_index(r + 1 + i, K));
        break;
    }
    return SymbolPlacementMap(K, g.L, std::move(slots));
}

EquivalentChannel build_equivalent_channel(const SymbolPlacementMap& map, const ChannelRealization& ch)
{
    if (ch.K() != map.K() || ch.N() < 1)
        throw std::invalid_argument("build_equivalent_channel: channel and placement map disagree on K");
    const int N = ch.N();
    EquivalentChannel eq{Eigen::MatrixXcd::Zero(map.L() * N, map.K())};
    for (int l = 0; l < map.L(); ++l)
        for (int k = 0; k < map.K(); ++k)
            if (const int j = map.at(l, k); j > 0) eq.H.block(l * N, k, N, 1) = ch.h.col(j - 1);
    return eq;
}

ProtocolScenario make_scenario(ProtocolKind kind, PowerConstraint constraint, int K, int N, double snr,
                               const LocalSensor& sensor, double T)
{
    sensor.validate();
    ProtocolScenario sc;
    sc.kind = kind;
    sc.geometry = frame_geometry(kind, K, N);
    sc.constraint = constraint;
    sc.sensor = sensor;
    sc.noise.T = T;
    sc.noise.snr = snr;
    sc.noise.N_o = snr_to_noise(constraint, K, T, snr);
    sc.noise.sigma_w2 = equivalent_noise_variance(kind, K, sc.noise.N_o);
    sc.noise.snr_eq = sc.geometry.eta * snr;
    sc.alpha = scaling_factor(kind, constraint, K, T);
    sc.sigma_eff2 = sc.noise.sigma_w2 / (sc.alpha * sc.alpha);
    return sc;
}

}  // namespace mimodf
