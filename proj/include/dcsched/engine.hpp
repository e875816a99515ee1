#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcsched/scheduler.hpp"

namespace dcsched {

/// Energy accounting over the observation window [t1, t2]. Computing and
/// cooling energy are each split into a static part (base powers only) and
/// a dynamic part attributable to the jobs.
struct EnergyLedger {
    double e_comp_j = 0.0;
    double e_comp_stat_j = 0.0;
    double e_comp_dync_j = 0.0;
    double e_cool_j = 0.0;
    double e_cool_stat_j = 0.0;
    double e_cool_dync_j = 0.0;
    double t1_s = 0.0;
    double t2_s = 0.0;
};

struct MetricsReport {
    std::size_t n_jobs = 0;
    std::optional<double> r_ave_s; // absent when the workload was empty
    double makespan_s = 0.0;
    double utilization = 0.0;
    EnergyLedger energy;
    double avg_supply_temp_c = 0.0;
    /// Closed-form sum of per-job processing time times power; equals the
    /// integrated dynamic computing energy independent of interleaving.
    double per_job_dynamic_energy_j = 0.0;
    /// The same sum split by server, for historical-power profiling.
    std::vector<double> per_server_dynamic_energy_j;
    std::uint64_t seed = 0;
    bool supply_below_freezing = false; // warning: supply temperature went below 0 C
};

inline double joules_to_kwh(double j) { return j / 3.6e6; }

struct IntervalState {
    double t_sup_c;
    double total_power_w;
    double cooling_power_w;
};

/// Accounts one interval of length dt during which every power is constant,
/// so each energy integral is exactly power times dt. The caller supplies the
/// total power so its summation order is its own choice; the per-slot powers
/// drive the supply temperature. Returns the room state it used; dt = 0 adds
/// nothing and just reports the state.
IntervalState integrate_interval(EnergyLedger& ledger, const HeatMatrix& matrix,
                                 const CoolingConfig& cooling,
                                 std::span<const double> slot_powers,
                                 double total_power_w, double total_base_w,
                                 double static_cooling_w, double dt_s);

/// One sample per processed event: state after the event was applied.
struct TimePoint {
    double t_s;
    double t_sup_c;
    double total_power_w;
    double cooling_power_w;
};

/// Everything a run needs except the seed.
struct SimScenario {
    HeatMatrix matrix;
    CoolingConfig cooling;
    std::vector<Server> fleet;
    Catalog catalog;
    Placement placement;
    FuzzyChain policy;
    WorkloadSpec workload;
    /// When set, these jobs are used verbatim and the seed only drives the
    /// scheduler's tie-breaking.
    std::optional<std::vector<Job>> fixed_jobs;
    DispatchOptions dispatch;
};

/// One full discrete-event run: processes every arrival and completion,
/// integrating power exactly over the piecewise-constant intervals between
/// events. Deterministic given the seed.
MetricsReport run_simulation(const SimScenario& scenario, std::uint64_t seed,
                             std::vector<TimePoint>* timeseries = nullptr);

struct ReplicationResult {
    MetricsReport mean;
    std::vector<MetricsReport> runs;
};

/// Runs seeds base_seed .. base_seed + n_runs - 1 and averages each scalar
/// metric. Workers > 1 dispatches runs concurrently; results do not depend
/// on the worker count. A failing run aborts the batch with its index.
ReplicationResult replicate(const SimScenario& scenario, int n_runs,
                            std::uint64_t base_seed, int workers = 1);

/// Multi-line human-readable rendering of one report.
std::string format_report(const MetricsReport& report);

} // namespace dcsched
