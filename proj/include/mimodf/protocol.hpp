#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mimodf {

using cplx = std::complex<double>;

/// Reporting-channel protocol between the secondary users and the fusion center.
enum class ProtocolKind { MAC, PAC, CMAC, CPAC };

enum class PowerConstraint { UnitPower, UnitEnergy };

enum class Hypothesis { H0, H1 };

std::string_view to_string(ProtocolKind kind);
std::string_view to_string(PowerConstraint constraint);
ProtocolKind parse_protocol(std::string_view name);
PowerConstraint parse_constraint(std::string_view name);

/// Cooperative protocols relay every decision through all K users.
constexpr bool is_cooperative(ProtocolKind kind)
{
    return kind == ProtocolKind::CMAC || kind == ProtocolKind::CPAC;
}

struct FrameGeometry {
    int K = 1;       // secondary users
    int N = 1;       // receive antennas
    int L = 1;       // phases per frame
    int q = 1;       // phases in which each user transmits
    int M = 1;       // received-vector length, L*N
    double eta = 1;  // spectral efficiency, K/L bits per channel use
};

struct NoiseBudget {
    double N_o = 1;
    double sigma_w2 = 1;  // N_o / eta
    double T = 1;
    double snr = 1;
    double snr_eq = 1;  // eta * snr
};

struct LocalSensor {
    double p_f = 0.05;
    double p_d = 0.5;
    double p_0 = 0.5;
    double p_1 = 0.5;

    /// Probability that a single user reports +1 under the given hypothesis.
    double p_plus(Hypothesis h) const { return h == Hypothesis::H0 ? p_f : p_d; }
    void validate() const;
};

/// Slot ownership over (phase, symbol column). Entry j > 0 means the channel
/// vector of user j carries symbol k in that phase; 0 is an all-zero block.
class SymbolPlacementMap {
public:
    SymbolPlacementMap(int K, int L, std::vector<int> slots);

    int K() const { return K_; }
    int L() const { return L_; }
    /// Zero-based phase and column; returns the one-based user id or 0.
    int at(int phase, int column) const { return slots_[static_cast<std::size_t>(phase * K_ + column)]; }

private:
    int K_;
    int L_;
    std::vector<int> slots_;
};

/// K independent channel vectors; column k of `h` is the N-vector of user k+1.
struct ChannelRealization {
    Eigen::MatrixXcd h;

    int K() const { return static_cast<int>(h.cols()); }
    int N() const { return static_cast<int>(h.rows()); }
};

struct EquivalentChannel {
    Eigen::MatrixXcd H;  // M x K
};

struct ProtocolScenario {
    ProtocolKind kind = ProtocolKind::MAC;
    FrameGeometry geometry;
    PowerConstraint constraint = PowerConstraint::UnitPower;
    NoiseBudget noise;
    LocalSensor sensor;
    double alpha = 1;
    double sigma_eff2 = 1;  // noise variance of the alpha = 1 model

    std::string label() const;
};

/// One-based cyclic index on {1, ..., K}: 0 maps to K.
constexpr int cyclic_index(int value, int K)
{
    const int r = ((value % K) + K) % K;
    return r == 0 ? K : r;
}

FrameGeometry frame_geometry(ProtocolKind kind, int K, int N);
double scaling_factor(ProtocolKind kind, PowerConstraint constraint, int K, double T);
double equivalent_noise_variance(ProtocolKind kind, int K, double N_o);
double snr_to_noise(PowerConstraint constraint, int K, double T, double snr);
SymbolPlacementMap placement_map(ProtocolKind kind, int K);
EquivalentChannel build_equivalent_channel(const SymbolPlacementMap& map, const ChannelRealization& ch);

/// Assembles the full scenario for a linear SNR; T defaults to the unit phase.
ProtocolScenario make_scenario(ProtocolKind kind, PowerConstraint constraint, int K, int N, double snr,
                               const LocalSensor& sensor = {}, double T = 1.0);

}  // namespace mimodf
