#include <doctest.h>

#include <algorithm>

#include "mimodf/montecarlo.hpp"

using namespace mimodf;

TEST_CASE("local decisions")
{
    Engine rng(1);
    LocalSensor perfect;
    perfect.p_f = 0;
    perfect.p_d = 1;
    for (int i = 0; i < 100; ++i) {
        const auto d = draw_local_decisions(perfect, Hypothesis::H1, 4, rng);
        CHECK(d.nu() == 4);
        CHECK(draw_local_decisions(perfect, Hypothesis::H0, 4, rng).nu() == 0);
    }

    LocalSensor s;
    const int n = 100000, K = 2;
    double plus = 0, plus_h1 = 0;
    for (int i = 0; i < n; ++i) {
        plus += draw_local_decisions(s, Hypothesis::H0, K, rng).nu();
        plus_h1 += draw_local_decisions(s, Hypothesis::H1, K, rng).nu();
    }
    const double se = std::sqrt(0.05 * 0.95 / (n * K));
    CHECK(std::abs(plus / (n * K) - 0.05) <= 5 * se);
    CHECK(std::abs(plus_h1 / (n * K) - 0.5) <= 5 * std::sqrt(0.25 / (n * K)));

    DecisionVector d{{1, -1, -1, 1, 1}};
    CHECK(d.nu() == 3);
}

TEST_CASE("channel moments")
{
    Engine rng(2);
    const int n = 100000;
    double p = 0, p2 = 0, re2 = 0, im2 = 0;
    cplx mean = 0;
    for (int i = 0; i < n; ++i) {
        const cplx h = draw_channel(1, 1, rng).h(0, 0);
        const double a = std::norm(h);
        p += a;
        p2 += a * a;
        re2 += h.real() * h.real();
        im2 += h.imag() * h.imag();
        mean += h;
    }
    // |h|^2 is unit exponential: mean 1, variance 1
    CHECK(std::abs(p / n - 1) <= 5 / std::sqrt(n));
    CHECK(std::abs((p2 / n - (p / n) * (p / n)) - 1) <= 5 * std::sqrt(8.0 / n));
    CHECK(std::abs(mean / double(n)) <= 5 * std::sqrt(1.0 / n));
    // each quadrature component has variance 1/2; Var of its square is 1/2
    CHECK(std::abs(re2 / n - 0.5) <= 5 * std::sqrt(0.5 / n));
    CHECK(std::abs(im2 / n - 0.5) <= 5 * std::sqrt(0.5 / n));

    const auto ch = draw_channel(3, 4, rng);
    CHECK(ch.K() == 3);
    CHECK(ch.N() == 4);
    CHECK_THROWS_AS(draw_channel(0, 1, rng), std::invalid_argument);
}

TEST_CASE("frame synthesis and the MRC statistic")
{
    Engine rng(3);
    EquivalentChannel H{Eigen::MatrixXcd::Constant(1, 1, cplx{2, 0})};
    const auto f = simulate_frame(H, DecisionVector{{1}}, 0.0, rng);
    CHECK(f.y(0) == cplx{2, 0});

    EquivalentChannel one{Eigen::MatrixXcd::Constant(1, 1, cplx{1, 0})};
    CHECK(mrc_statistic(one, ReceivedFrame{Eigen::VectorXcd::Constant(1, cplx{2, 3})}) == 2);
    EquivalentChannel mac(Eigen::MatrixXcd(1, 2));
    mac.H << cplx{1, 0}, cplx{0, 1};
    CHECK(mrc_statistic(mac, ReceivedFrame{Eigen::VectorXcd::Constant(1, cplx{1, 0})}) == doctest::Approx(1));

    // linearity in y for real scalars
    const auto map = placement_map(ProtocolKind::CMAC, 3);
    const auto Hc = build_equivalent_channel(map, draw_channel(3, 2, rng));
    const auto y1 = simulate_frame(Hc, DecisionVector{{1, -1, 1}}, 1.0, rng);
    const auto y2 = simulate_frame(Hc, DecisionVector{{-1, -1, 1}}, 1.0, rng);
    const double a = -1.7;
    const ReceivedFrame mix{a * y1.y + y2.y};
    CHECK(mrc_statistic(Hc, mix) == doctest::Approx(a * mrc_statistic(Hc, y1) + mrc_statistic(Hc, y2)));

    // PAC: block l only sees x_l
    const auto pmap = placement_map(ProtocolKind::PAC, 2);
    const auto Hp = build_equivalent_channel(pmap, draw_channel(2, 3, rng));
    const auto fa = simulate_frame(Hp, DecisionVector{{1, 1}}, 0.0, rng);
    const auto fb = simulate_frame(Hp, DecisionVector{{1, -1}}, 0.0, rng);
    CHECK((fa.y.head(3) - fb.y.head(3)).norm() == 0);
    CHECK((fa.y.tail(3) + fb.y.tail(3)).norm() == doctest::Approx(0));

    CHECK_THROWS_AS(simulate_frame(Hp, DecisionVector{{1}}, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(mrc_statistic(Hp, ReceivedFrame{Eigen::VectorXcd::Zero(2)}), std::invalid_argument);

    // noise power
    const int n = 100000;
    double acc = 0, acc2 = 0;
    for (int i = 0; i < n; ++i) {
        const auto fr = simulate_frame(Hc, DecisionVector{{1, 1, 1}}, 0.3, rng);
        const double e = (fr.y - Hc.H * Eigen::VectorXcd::Ones(3)).squaredNorm() / fr.y.size();
        acc += e;
        acc2 += e * e;
    }
    const double m = acc / n, v = acc2 / n - m * m;
    CHECK(std::abs(m - 0.3) <= 5 * std::sqrt(v / n));
}

TEST_CASE("exceedance counting")
{
    const std::vector<double> s = {3, 1, 2, 2, 5};
    CHECK(exceedance(s, {0, 2, 4.9, 5}) == std::vector<double>{1.0, 0.4, 0.2, 0.0});
    CHECK_THROWS_AS(exceedance(s, {}), std::invalid_argument);
    CHECK_THROWS_AS(exceedance({}, {1.0}), std::invalid_argument);
}

TEST_CASE("Monte Carlo CROC: limits, monotonicity, shared randomness")
{
    const auto sc = make_scenario(ProtocolKind::PAC, PowerConstraint::UnitPower, 2, 2, 10);
    McOptions opts;
    opts.trials = 5000;
    const std::vector<double> grid = {-1e6, -1, 0, 1, 2, 3, 1e6};
    const auto c = estimate_croc(sc, grid, opts);
    CHECK(c.q_f.front() == 1);
    CHECK(c.q_d.front() == 1);
    CHECK(c.q_f.back() == 0);
    CHECK(c.q_d.back() == 0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(c.q_f[i] <= c.q_f[i - 1]);
        CHECK(c.q_d[i] <= c.q_d[i - 1]);
    }
    CHECK(c.trials == 5000);
    CHECK(c.engine == EngineTag::MonteCarlo);

    LocalSensor same;
    same.p_f = same.p_d = 0.2;
    auto sc2 = make_scenario(ProtocolKind::CPAC, PowerConstraint::UnitEnergy, 3, 2, 1, same);
    opts.common_random_numbers = true;
    const auto eq = estimate_croc(sc2, linspace(-5, 5, 21), opts);
    CHECK(eq.q_f == eq.q_d);

    opts.trials = 0;
    CHECK_THROWS_AS(estimate_croc(sc, grid, opts), std::invalid_argument);
    opts.trials = 10;
    CHECK_THROWS_AS(estimate_croc(sc, {}, opts), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count")
{
    const auto sc = make_scenario(ProtocolKind::CMAC, PowerConstraint::UnitPower, 3, 2, 1);
    McOptions one, many;
    one.trials = many.trials = 20000;
    many.workers = 4;
    CHECK(sample_statistic(sc, Hypothesis::H1, one) == sample_statistic(sc, Hypothesis::H1, many));
    const auto grid = default_threshold_grid(sc);
    CHECK(grid.size() == 101);
    CHECK(grid == default_threshold_grid(sc));
    const auto a = estimate_croc(sc, grid, one), b = estimate_croc(sc, grid, many);
    CHECK(a.q_f == b.q_f);
    CHECK(a.q_d == b.q_d);
    SeedSpec other{42};
    many.seed = other;
    CHECK(sample_statistic(sc, Hypothesis::H1, one) != sample_statistic(sc, Hypothesis::H1, many));
}

TEST_CASE("scaled and normalized models give the same CROC")
{
    for (auto kind : {ProtocolKind::PAC, ProtocolKind::CMAC, ProtocolKind::CPAC}) {
        const auto sc = make_scenario(kind, PowerConstraint::UnitPower, 2, 2, 3);
        REQUIRE(sc.alpha != 1.0);
        McOptions norm, scaled;
        norm.trials = scaled.trials = 100000;
        scaled.scaled_model = true;
        scaled.seed = SeedSpec{77};
        const auto grid = default_threshold_grid(sc, 31);
        std::vector<double> grid_scaled;
        for (double g : grid) grid_scaled.push_back(g * sc.alpha);
        const auto a = estimate_croc(sc, grid, norm);
        const auto b = estimate_croc(sc, grid_scaled, scaled);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double tf = 4 * std::sqrt(a.q_f[i] * (1 - a.q_f[i]) / 1e5) + 1e-4;
            const double td = 4 * std::sqrt(a.q_d[i] * (1 - a.q_d[i]) / 1e5) + 1e-4;
            CHECK(std::abs(a.q_f[i] - b.q_f[i]) <= 2 * tf);
            CHECK(std::abs(a.q_d[i] - b.q_d[i]) <= 2 * td);
        }
    }
}

TEST_CASE("sign symmetry: Lambda|H0 matches -Lambda|H1 with mirrored sensors")
{
    const LocalSensor s{0.1, 0.6, 0.5, 0.5};
    const LocalSensor mirrored{1 - s.p_d, 1 - s.p_f, 0.5, 0.5};
    McOptions opts;
    opts.trials = 100000;
    for (auto kind : {ProtocolKind::MAC, ProtocolKind::PAC, ProtocolKind::CMAC, ProtocolKind::CPAC}) {
        auto a = sample_statistic(make_scenario(kind, PowerConstraint::UnitPower, 2, 2, 2, s), Hypothesis::H0, opts);
        opts.seed = SeedSpec{991};
        auto b = sample_statistic(make_scenario(kind, PowerConstraint::UnitPower, 2, 2, 2, mirrored), Hypothesis::H1, opts);
        opts.seed = SeedSpec{};
        for (double& v : b) v = -v;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        // two-sample Kolmogorov-Smirnov distance
        double ks = 0;
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            const double x = std::min(a[i], b[j]);
            while (i < a.size() && a[i] <= x) ++i;
            while (j < b.size() && b[j] <= x) ++j;
            ks = std::max(ks, std::abs(double(i) / a.size() - double(j) / b.size()));
        }
        CHECK(ks < 0.01);
    }
}
