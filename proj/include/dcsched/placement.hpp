#pragma once

#include <span>
#include <vector>

#include "dcsched/thermal.hpp"

namespace dcsched {

/// Static server placement instance: the room's heat matrix and a reference
/// power per server.
struct PlacementInstance {
    HeatMatrix matrix;
    std::vector<double> ref_powers;
};

/// A bijection from rack slots to servers: sigma[slot] = server index.
struct Placement {
    std::vector<int> sigma;
    bool is_permutation() const;
};

Placement identity_placement(std::size_t m);

/// Loose text format: '#' comments, then m server indices in slot order.
Placement load_placement(const std::filesystem::path& file);
void save_placement(const std::filesystem::path& file, const Placement& placement);

/// Per-slot inlet temperature increases under the placed reference powers.
std::vector<double> inlet_increases(const PlacementInstance& inst,
                                    const Placement& placement);

/// The placement objective: the maximum inlet temperature increase over all
/// slots when every server draws its reference power.
double evaluate_placement(const PlacementInstance& inst, const Placement& placement);

enum class SortOrder { Descending, Ascending };
enum class SlotRule { Minimize, Maximize };

/// Greedy server placement: servers in descending reference power order,
/// each placed in the free slot that minimizes the resulting maximum
/// cumulative inlet increase. Ties take the lowest slot index; the sort is
/// stable on server index, so the result is deterministic.
Placement gsp(const PlacementInstance& inst);

/// The GSP loop with a configurable sort order and slot selection rule.
/// (Descending, Minimize) is gsp itself; the inverted rules reproduce the
/// counter-heuristics used to probe placement impact.
Placement gsp_variant(const PlacementInstance& inst, SortOrder order, SlotRule rule);

struct OracleResult {
    Placement placement; // lexicographically smallest optimal permutation
    double objective;
};

/// Exhaustive search over all m! placements. Refuses instances above the
/// cap; the default keeps the enumeration sub-second.
OracleResult brute_force_optimal(const PlacementInstance& inst, std::size_t max_m = 9);

/// Placement instance encoding a 3-partition question: 3h servers whose
/// reference powers are the given integers, and a matrix in which inlet 3l
/// collects exactly the powers placed in slots 3l-2..3l. The brute-force
/// optimum equals the target sum exactly when the integers can be split
/// into h triples of that sum.
PlacementInstance three_partition_instance(std::span<const long long> values, int h,
                                           long long target);

} // namespace dcsched
