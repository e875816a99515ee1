#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "dcsched/errors.hpp"
#include "dcsched/thermal.hpp"
#include "test_util.hpp"

using namespace dcsched;

namespace {

// The two-server room from the worked placement example.
HeatMatrix example_matrix() { return HeatMatrix(2, {0.002, 0.004, 0.001, 0.002}); }

HeatMatrix random_matrix(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> entry(0.0, 0.01);
    std::vector<double> d(m * m);
    for (double& v : d)
        v = entry(rng);
    return HeatMatrix(m, std::move(d));
}

std::vector<double> random_powers(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> power(0.0, 500.0);
    std::vector<double> u(m);
    for (double& v : u)
        v = power(rng);
    return u;
}

} // namespace

TEST_CASE("server compute power sums base and running draws") {
    CHECK(server_compute_power(130.0, {}) == 130.0);
    const std::vector<double> one{62.27};
    CHECK(near_abs(server_compute_power(130.0, one), 192.27, 1e-9));
    CHECK(server_compute_power(0.0, {}) == 0.0);
}

TEST_CASE("max inlet increase matches the worked example") {
    const HeatMatrix d = example_matrix();
    const std::vector<double> u1{100.0, 200.0};
    const std::vector<double> u2{200.0, 100.0};
    CHECK(near_abs(max_inlet_increase(d, u1), 1.0, 1e-9));
    CHECK(near_abs(max_inlet_increase(d, u2), 0.8, 1e-9));
    const std::vector<double> zero{0.0, 0.0};
    CHECK(max_inlet_increase(d, zero) == 0.0);
}

TEST_CASE("max inlet increase rejects mismatched dimensions") {
    const HeatMatrix d = example_matrix();
    const std::vector<double> u{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)max_inlet_increase(d, u), ModelError);
    CHECK_THROWS_AS((void)inlet_temperatures(d, u, 20.0), ModelError);
}

TEST_CASE("inlet temperatures add recirculation to the supply") {
    const HeatMatrix d = example_matrix();
    const std::vector<double> u1{100.0, 200.0};
    const auto t1 = inlet_temperatures(d, u1, 24.0);
    REQUIRE(t1.size() == 2);
    CHECK(near_abs(t1[0], 25.0, 1e-9));
    CHECK(near_abs(t1[1], 24.5, 1e-9));

    const std::vector<double> u2{200.0, 100.0};
    const auto t2 = inlet_temperatures(d, u2, 24.2);
    CHECK(near_abs(t2[0], 25.0, 1e-9));
    CHECK(near_abs(t2[1], 24.6, 1e-9));

    const HeatMatrix zero(2, {0, 0, 0, 0});
    const auto t3 = inlet_temperatures(zero, u1, 21.5);
    CHECK(t3[0] == 21.5);
    CHECK(t3[1] == 21.5);
}

TEST_CASE("supply temperature hits the redline exactly") {
    const HeatMatrix d = example_matrix();
    const std::vector<double> u1{100.0, 200.0};
    const std::vector<double> u2{200.0, 100.0};
    CHECK(near_abs(supply_temperature(d, u1, 25.0), 24.0, 1e-9));
    CHECK(near_abs(supply_temperature(d, u2, 25.0), 24.2, 1e-9));
    const std::vector<double> zero{0.0, 0.0};
    CHECK(supply_temperature(d, zero, 25.0) == 25.0);
}

TEST_CASE("cop polynomial and failure mode") {
    const CoolingConfig cfg;
    CHECK(near_abs(cop(24.0, cfg), 4.394, 1e-9));
    CHECK(near_abs(cop(0.0, cfg), 0.458, 1e-12));
    CHECK(near_abs(cop(24.2, cfg), 4.459712, 1e-9));

    CoolingConfig broken = cfg;
    broken.cop_c2 = 0.0;
    broken.cop_c1 = 0.0;
    broken.cop_c0 = -1.0;
    CHECK_THROWS_AS((void)cop(10.0, broken), ModelError);
}

TEST_CASE("cooling power reproduces the worked example to 1e-3") {
    const CoolingConfig cfg;
    CHECK(near_abs(cooling_power(300.0, 24.0, cfg), 68.275, 1e-3));
    CHECK(near_abs(cooling_power(300.0, 24.2, cfg), 67.269, 1e-3));
    CHECK(cooling_power(0.0, 18.0, cfg) == 0.0);
}

TEST_CASE("outlet temperature uses the air stream constant") {
    const CoolingConfig cfg; // p*f*c = 1.168 * 0.1 * 1004 = 117.2672 W/C
    CHECK(outlet_temperature(25.0, 0.0, cfg) == 25.0);
    CHECK(near_abs(outlet_temperature(25.0, 117.2672, cfg), 26.0, 1e-9));
    CHECK(near_abs(outlet_temperature(20.0, 234.5344, cfg), 22.0, 1e-9));
}

TEST_CASE("algebraic identities over random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> red(18.0, 30.0);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t m = 1 + rng() % 8;
        const HeatMatrix d = random_matrix(rng, m);
        const std::vector<double> u = random_powers(rng, m);
        const double t_red = red(rng);

        const double inc = max_inlet_increase(d, u);
        const double t_sup = supply_temperature(d, u, t_red);
        CHECK(near_abs(t_sup + inc, t_red, 1e-9));

        // Composing the supply rule with the inlet equation peaks at the redline.
        const auto inlets = inlet_temperatures(d, u, t_sup);
        double peak = inlets[0];
        for (double t : inlets)
            peak = std::max(peak, t);
        CHECK(near_abs(peak, t_red, 1e-9));

        // Monotone in every component of u.
        std::vector<double> bumped = u;
        bumped[rng() % m] += 50.0;
        CHECK(max_inlet_increase(d, bumped) >= inc - 1e-12);

        // Positively homogeneous.
        std::vector<double> scaled = u;
        const double alpha = 2.5;
        for (double& v : scaled)
            v *= alpha;
        CHECK(near_rel(max_inlet_increase(d, scaled), alpha * inc, 1e-12));
    }
}

TEST_CASE("cooling power strictly decreases in supply temperature") {
    const CoolingConfig cfg;
    double prev = cooling_power(1000.0, 10.0, cfg);
    for (double t = 10.5; t <= 30.0; t += 0.5) {
        const double cur = cooling_power(1000.0, t, cfg);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("matrix file round trip and validation") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dcsched_thermal_test";
    fs::create_directories(dir);

    const HeatMatrix d = example_matrix();
    const fs::path file = dir / "matrix.txt";
    d.save(file);
    const HeatMatrix back = HeatMatrix::load(file);
    REQUIRE(back.size() == d.size());
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k)
            CHECK(back.at(j, k) == d.at(j, k));

    {
        std::ofstream bad(dir / "negative.txt");
        bad << "2\n0.001 0.002\n-0.5 0.001\n";
    }
    CHECK_THROWS_AS((void)HeatMatrix::load(dir / "negative.txt"), IoError);

    {
        std::ofstream bad(dir / "short.txt");
        bad << "3\n0.001 0.002 0.003\n";
    }
    CHECK_THROWS_AS((void)HeatMatrix::load(dir / "short.txt"), IoError);

    CHECK_THROWS_AS((void)HeatMatrix::load(dir / "missing.txt"), IoError);
    CHECK_THROWS_AS(HeatMatrix(2, {1.0, 2.0, 3.0}), ModelError);

    fs::remove_all(dir);
}
