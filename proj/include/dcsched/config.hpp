#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dcsched/engine.hpp"
#include "dcsched/matrix_gen.hpp"

namespace dcsched {

enum class PlacementStrategy { Loc, Gsp1, Gsp2, Gsp3, File };

/// Declarative description of one experiment, read from a versioned JSON
/// document. Unknown keys anywhere in the document are hard errors.
struct ExperimentConfig {
    int version = 1;
    std::uint64_t seed = 1;
    int replications = 10;

    // matrix: exactly one source
    std::optional<std::filesystem::path> matrix_file;
    std::optional<RoomLayout> matrix_layout;
    MatrixGenParams matrix_params;
    std::uint64_t matrix_seed = 1;

    int servers_per_type = 10;
    int procs_per_server = 18;
    double base_power_w = 130.0;

    CoolingConfig cooling;

    PlacementStrategy placement = PlacementStrategy::Loc;
    std::optional<std::filesystem::path> placement_file;
    std::optional<std::vector<double>> reference_powers_override;

    std::string policy = "perf";

    std::optional<double> rho; // mapped to an arrival rate via the system load
    double arrival_rate_per_hour = 20.0;
    double arrival_duration_h = 8.0;
    int demand_min = 1;
    int demand_max = 8;
    std::vector<double> benchmark_weights; // empty = uniform mix
    double mean_seq_time_h = 4.5;
    std::optional<std::filesystem::path> workload_file;

    DispatchOptions dispatch;

    static ExperimentConfig load(const std::filesystem::path& file);
    static ExperimentConfig parse(const std::string& json_text,
                                  const std::filesystem::path& base_dir = ".");

    /// Canonical JSON of the effective configuration.
    std::string canonical() const;
    /// FNV-1a hash of the canonical form, as fixed-width hex.
    std::string digest() const;

    double effective_arrival_rate(int total_procs) const;
    double effective_load(int total_procs) const;

    /// Resolves files and strategies into a runnable scenario.
    SimScenario build_scenario() const;
};

} // namespace dcsched
