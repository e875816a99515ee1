#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "dcsched/errors.hpp"
#include "dcsched/placement.hpp"
#include "test_instances.hpp"
#include "test_util.hpp"

using namespace dcsched;

namespace {

PlacementInstance example_instance() {
    PlacementInstance inst;
    inst.matrix = HeatMatrix(2, {0.002, 0.004, 0.001, 0.002});
    inst.ref_powers = {100.0, 200.0};
    return inst;
}

} // namespace

TEST_CASE("evaluate_placement on the worked two-server instance") {
    const PlacementInstance inst = example_instance();
    CHECK(near_abs(evaluate_placement(inst, identity_placement(2)), 1.0, 1e-9));
    Placement swapped;
    swapped.sigma = {1, 0};
    CHECK(near_abs(evaluate_placement(inst, swapped), 0.8, 1e-9));

    PlacementInstance zero = inst;
    zero.ref_powers = {0.0, 0.0};
    CHECK(evaluate_placement(zero, identity_placement(2)) == 0.0);
    CHECK(evaluate_placement(zero, swapped) == 0.0);
}

TEST_CASE("evaluate_placement rejects non-permutations") {
    const PlacementInstance inst = example_instance();
    Placement bad;
    bad.sigma = {0, 0};
    CHECK_THROWS_AS((void)evaluate_placement(inst, bad), ModelError);
    bad.sigma = {0, 2};
    CHECK_THROWS_AS((void)evaluate_placement(inst, bad), ModelError);
}

TEST_CASE("evaluate_placement is invariant under relabeling equal-power servers") {
    std::mt19937_64 rng(5150);
    const PlacementInstance base = random_room_instance(rng, 6);
    PlacementInstance twin = base;
    twin.ref_powers[2] = twin.ref_powers[5]; // make two servers identical

    PlacementInstance swapped_labels = twin;
    std::swap(swapped_labels.ref_powers[2], swapped_labels.ref_powers[5]);
    const Placement p = identity_placement(6);
    CHECK(evaluate_placement(twin, p) == evaluate_placement(swapped_labels, p));
}

TEST_CASE("gsp places the hot server away from the sensitive inlet") {
    const PlacementInstance inst = example_instance();
    const Placement p = gsp(inst);
    REQUIRE(p.sigma.size() == 2);
    CHECK(p.sigma[0] == 1); // the 200 W server goes to slot 1
    CHECK(p.sigma[1] == 0);
    CHECK(near_abs(evaluate_placement(inst, p), 0.8, 1e-9));
}

TEST_CASE("gsp on a single slot") {
    PlacementInstance inst;
    inst.matrix = HeatMatrix(1, {0.003});
    inst.ref_powers = {400.0};
    const Placement p = gsp(inst);
    REQUIRE(p.sigma.size() == 1);
    CHECK(p.sigma[0] == 0);
}

TEST_CASE("gsp_variant corners") {
    const PlacementInstance inst = example_instance();

    // (Descending, Minimize) is definitionally gsp.
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 20; ++iter) {
        const PlacementInstance r = random_room_instance(rng, 2 + rng() % 5);
        CHECK(gsp_variant(r, SortOrder::Descending, SlotRule::Minimize).sigma ==
              gsp(r).sigma);
    }

    // Hand trace of (Descending, Maximize) on the worked instance: the 200 W
    // server lands in slot 2 (peak 0.8) and the 100 W server takes the only
    // remaining slot 1, ending at inlet increases (1.0, 0.5).
    const Placement counter =
        gsp_variant(inst, SortOrder::Descending, SlotRule::Maximize);
    CHECK(counter.sigma == std::vector<int>{0, 1});
    CHECK(near_abs(evaluate_placement(inst, counter), 1.0, 1e-9));

    // Hand trace of (Ascending, Minimize): the 100 W server picks slot 1
    // (peak 0.2), the 200 W server is forced into slot 2.
    const Placement ascending =
        gsp_variant(inst, SortOrder::Ascending, SlotRule::Minimize);
    CHECK(ascending.sigma == std::vector<int>{0, 1});
    CHECK(near_abs(evaluate_placement(inst, ascending), 1.0, 1e-9));
}

TEST_CASE("identity placement") {
    CHECK(identity_placement(3).sigma == std::vector<int>{0, 1, 2});
    CHECK(identity_placement(1).sigma == std::vector<int>{0});
    CHECK(near_abs(evaluate_placement(example_instance(), identity_placement(2)), 1.0,
                   1e-9));
}

TEST_CASE("brute force oracle on the worked instance") {
    const OracleResult o = brute_force_optimal(example_instance());
    CHECK(o.placement.sigma == std::vector<int>{1, 0});
    CHECK(near_abs(o.objective, 0.8, 1e-9));
}

TEST_CASE("brute force ties resolve to the lexicographically smallest permutation") {
    PlacementInstance flat;
    flat.matrix = HeatMatrix(4, std::vector<double>(16, 0.002));
    flat.ref_powers = {10.0, 10.0, 10.0, 10.0}; // every placement optimal
    CHECK(brute_force_optimal(flat).placement.sigma == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("brute force refuses instances above the cap") {
    PlacementInstance big;
    big.matrix = HeatMatrix(12, std::vector<double>(144, 0.001));
    big.ref_powers.assign(12, 100.0);
    CHECK_THROWS_AS((void)brute_force_optimal(big, 9), ModelError);
}

TEST_CASE("gsp output is always a permutation") {
    std::mt19937_64 rng(31337);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t m = 1 + rng() % 12;
        const PlacementInstance inst = (iter % 2) ? random_room_instance(rng, m)
                                                  : random_iid_instance(rng, m);
        CHECK(gsp(inst).is_permutation());
        CHECK(gsp_variant(inst, SortOrder::Ascending, SlotRule::Maximize)
                  .is_permutation());
    }
}

TEST_CASE("gsp never beats the oracle and matches it on small room instances") {
    std::mt19937_64 rng(4242);
    double gsp_sum = 0.0;
    double counter_sum = 0.0;
    for (int iter = 0; iter < 120; ++iter) {
        const std::size_t m = 2 + rng() % 7; // 2..8
        const bool room = iter % 2 == 0;
        const PlacementInstance inst =
            room ? random_room_instance(rng, m) : random_iid_instance(rng, m);

        const double greedy = evaluate_placement(inst, gsp(inst));
        const double optimum = brute_force_optimal(inst).objective;
        CHECK(greedy >= optimum - 1e-12);

        // On room-structured instances the greedy is exact up to m = 3.
        if (room && m <= 3)
            CHECK(near_abs(greedy, optimum, 1e-9));

        const double counter = evaluate_placement(
            inst, gsp_variant(inst, SortOrder::Descending, SlotRule::Maximize));
        gsp_sum += greedy;
        counter_sum += counter;
    }
    CHECK(gsp_sum <= counter_sum); // the counter-heuristic is worse on average
}

TEST_CASE("gsp handles m = 200 well under a second") {
    std::mt19937_64 rng(7);
    PlacementInstance inst;
    inst.matrix = generate_matrix(RoomLayout{2, 20, 5}, 1.0, 7);
    std::uniform_real_distribution<double> power(100.0, 2000.0);
    inst.ref_powers.resize(200);
    for (double& p : inst.ref_powers)
        p = power(rng);

    const auto start = std::chrono::steady_clock::now();
    const Placement p = gsp(inst);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(p.is_permutation());
    CHECK(std::chrono::duration<double>(elapsed).count() < 1.0);
}

TEST_CASE("three partition construction") {
    const std::vector<long long> a{33, 33, 34, 30, 35, 35};
    const PlacementInstance inst = three_partition_instance(a, 2, 100);
    REQUIRE(inst.matrix.size() == 6);
    REQUIRE(inst.ref_powers.size() == 6);

    // Only rows 3l (1-based) carry coefficients, one unit per triple slot.
    for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t k = 0; k < 6; ++k) {
            const bool in_band = (j == 2 && k <= 2) || (j == 5 && k >= 3);
            CHECK(inst.matrix.at(j, k) == (in_band ? 1.0 : 0.0));
        }

    const OracleResult o = brute_force_optimal(inst);
    CHECK(o.objective == 100.0); // {33,33,34} and {30,35,35}

    const std::vector<long long> single{26, 37, 37};
    const OracleResult oh1 = brute_force_optimal(three_partition_instance(single, 1, 100));
    CHECK(oh1.objective == 100.0);
}

TEST_CASE("three partition preconditions are named") {
    const std::vector<long long> wrong_sum{33, 33, 34, 30, 35, 36};
    CHECK_THROWS_WITH_AS((void)three_partition_instance(wrong_sum, 2, 100),
                         doctest::Contains("sum"), ModelError);
    const std::vector<long long> out_of_band{20, 40, 40};
    CHECK_THROWS_WITH_AS((void)three_partition_instance(out_of_band, 1, 100),
                         doctest::Contains("between"), ModelError);
    const std::vector<long long> wrong_count{26, 37, 37, 26};
    CHECK_THROWS_AS((void)three_partition_instance(wrong_count, 1, 100), ModelError);
}

TEST_CASE("partitionable instances optimize to exactly the target") {
    std::mt19937_64 rng(777);
    for (int iter = 0; iter < 10; ++iter) {
        const int h = 1 + static_cast<int>(rng() % 2);
        const std::vector<long long> values = random_partitionable_set(rng, h, 100);
        const PlacementInstance inst = three_partition_instance(values, h, 100);
        CHECK(brute_force_optimal(inst).objective == 100.0);
    }
}

TEST_CASE("placement file round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dcsched_placement_test";
    fs::create_directories(dir);
    const fs::path file = dir / "sigma.txt";

    Placement p;
    p.sigma = {2, 0, 1};
    save_placement(file, p);
    CHECK(load_placement(file).sigma == p.sigma);

    {
        std::ofstream bad(dir / "bad.txt");
        bad << "0 0 1\n";
    }
    CHECK_THROWS_AS((void)load_placement(dir / "bad.txt"), IoError);
    fs::remove_all(dir);
}
