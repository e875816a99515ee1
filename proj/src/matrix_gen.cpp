#include "dcsched/matrix_gen.hpp"

#include <cmath>
#include <random>

#include "dcsched/errors.hpp"

namespace dcsched {

namespace {

struct SlotPos {
    int height;
    double x; // rack position along the row
    double y; // across the aisle
};

SlotPos slot_pos(const RoomLayout& layout, std::size_t slot) {
    const int per_rack = layout.servers_per_rack;
    const int rack_global = static_cast<int>(slot) / per_rack;
    const int row = rack_global / layout.racks_per_row;
    const int rack = rack_global % layout.racks_per_row;
    return {static_cast<int>(slot) % per_rack, static_cast<double>(rack),
            static_cast<double>(row)};
}

} // namespace

HeatMatrix generate_matrix(const RoomLayout& layout, const MatrixGenParams& params,
                           std::uint64_t seed) {
    if (layout.rows < 1 || layout.racks_per_row < 1 || layout.servers_per_rack < 1)
        throw ConfigError("room layout counts must be positive");
    if (!(params.intensity >= 0.0))
        throw ConfigError("matrix intensity must be nonnegative");
    if (!(params.jitter >= 0.0 && params.jitter < 1.0))
        throw ConfigError("matrix jitter must lie in [0, 1)");

    const std::size_t m = layout.slots();
    const int top = layout.servers_per_rack - 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jit(1.0 - params.jitter,
                                               1.0 + params.jitter);

    std::vector<double> d(m * m, 0.0);
    double raw_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const SlotPos rcv = slot_pos(layout, j);
        const double inhale = std::pow(params.height_gain, rcv.height);
        for (std::size_t k = 0; k < m; ++k) {
            const SlotPos src = slot_pos(layout, k);
            const double emit = std::pow(params.contrib_gain, top - src.height);
            const double dist = std::hypot((rcv.x - src.x),
                                           (rcv.y - src.y) * params.row_gap);
            const double v =
                inhale * emit * std::exp(-dist / params.distance_decay) * jit(rng);
            d[j * m + k] = v;
            raw_max = std::max(raw_max, v);
        }
    }
    const double scale =
        raw_max > 0.0 ? params.intensity * params.max_entry / raw_max : 0.0;
    for (double& v : d)
        v *= scale;
    return HeatMatrix(m, std::move(d));
}

HeatMatrix generate_matrix(const RoomLayout& layout, double intensity,
                           std::uint64_t seed) {
    MatrixGenParams params;
    params.intensity = intensity;
    return generate_matrix(layout, params, seed);
}

} // namespace dcsched
