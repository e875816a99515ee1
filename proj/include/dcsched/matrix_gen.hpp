#pragma once

#include <cstdint>

#include "dcsched/thermal.hpp"

namespace dcsched {

/// Physical arrangement of the rack slots. Slots are numbered rack by rack,
/// bottom to top: slot = (row * racks_per_row + rack) * servers_per_rack + height.
struct RoomLayout {
    int rows = 2;
    int racks_per_row = 5;
    int servers_per_rack = 5;
    // Racks within a row sit side by side at unit pitch; the two rows face a
    // shared cold aisle.
    std::size_t slots() const {
        return static_cast<std::size_t>(rows) * racks_per_row * servers_per_rack;
    }
};

struct MatrixGenParams {
    double intensity = 1.0;     // overall scale; 0 yields the zero matrix
    double max_entry = 0.004;   // C/W of the largest entry at intensity 1
    double height_gain = 1.25;  // per-level growth of what an upper slot inhales
    double contrib_gain = 1.25; // per-level growth of what a lower slot emits
    double distance_decay = 1.5; // e-folding distance between racks, pitch units
    double row_gap = 1.5;       // aisle width between the two rows, pitch units
    double jitter = 0.05;       // relative per-entry perturbation
};

/// Synthetic heat distribution matrix with the recirculation asymmetry seen
/// in instrumented rooms: slots high in a rack inhale more recirculated hot
/// air (larger row sums), slots low in a rack contribute more of it (larger
/// column sums), and coupling decays with rack distance. Deterministic per
/// seed. The jitter is kept small against the height gains so the row/column
/// monotonicity holds for every same-rack slot pair.
HeatMatrix generate_matrix(const RoomLayout& layout, const MatrixGenParams& params,
                           std::uint64_t seed);

HeatMatrix generate_matrix(const RoomLayout& layout, double intensity,
                           std::uint64_t seed);

} // namespace dcsched
