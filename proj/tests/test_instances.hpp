#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "dcsched/matrix_gen.hpp"
#include "dcsched/placement.hpp"

// Shared generators for randomized placement tests. Room-structured matrices
// come from the synthetic generator, so the instances carry the recirculation
// asymmetry of real rooms rather than iid noise.

inline dcsched::PlacementInstance random_room_instance(std::mt19937_64& rng,
                                                       std::size_t m) {
    dcsched::RoomLayout layout{1, 1, static_cast<int>(m)};
    dcsched::MatrixGenParams params;
    std::uniform_real_distribution<double> intensity(0.5, 2.0);
    params.intensity = intensity(rng);
    dcsched::PlacementInstance inst;
    inst.matrix = dcsched::generate_matrix(layout, params, rng());
    std::uniform_real_distribution<double> power(50.0, 2000.0);
    inst.ref_powers.resize(m);
    for (double& p : inst.ref_powers)
        p = power(rng);
    return inst;
}

inline dcsched::PlacementInstance random_iid_instance(std::mt19937_64& rng,
                                                      std::size_t m) {
    std::uniform_real_distribution<double> entry(0.0, 0.01);
    std::vector<double> d(m * m);
    for (double& v : d)
        v = entry(rng);
    dcsched::PlacementInstance inst;
    inst.matrix = dcsched::HeatMatrix(m, std::move(d));
    std::uniform_real_distribution<double> power(50.0, 2000.0);
    inst.ref_powers.resize(m);
    for (double& p : inst.ref_powers)
        p = power(rng);
    return inst;
}

/// h shuffled triples that each sum to `target`, every element strictly
/// between target/4 and target/2.
inline std::vector<long long> random_partitionable_set(std::mt19937_64& rng, int h,
                                                       long long target) {
    std::uniform_int_distribution<long long> pick(target / 4 + 1, target / 2 - 1);
    std::vector<long long> values;
    for (int l = 0; l < h; ++l) {
        for (;;) {
            const long long a = pick(rng);
            const long long b = pick(rng);
            const long long c = target - a - b;
            if (4 * c > target && 2 * c < target) {
                values.push_back(a);
                values.push_back(b);
                values.push_back(c);
                break;
            }
        }
    }
    std::shuffle(values.begin(), values.end(), rng);
    return values;
}
