#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dcsched/catalog.hpp"

namespace dcsched {

/// One rigid parallel job. Per-server processing time and power draw follow
/// from the benchmark profile and the server's processor type.
struct Job {
    int id = 0;
    double release_s = 0.0;
    int demand = 1;    // processors required, all on one server
    int benchmark = 0; // index into Catalog::benchmarks
};

double exec_time_s(const Catalog& catalog, const Job& job, const Server& server);
double job_power_w(const Catalog& catalog, const Job& job, const Server& server);

struct WorkloadSpec {
    double arrival_rate_per_hour = 20.0;
    double arrival_duration_h = 8.0;
    int demand_min = 1;
    int demand_max = 8;
    /// Relative weights per catalog benchmark; empty means uniform.
    std::vector<double> benchmark_weights;
    std::uint64_t seed = 1;
};

/// Poisson arrivals truncated at the arrival duration; processor demand
/// uniform over the configured range; benchmark uniform over the catalog.
/// Arrivals, demands and benchmark picks use independent sub-streams of the
/// seed, so narrowing the demand range does not shift arrival times.
std::vector<Job> generate_workload(const WorkloadSpec& spec, const Catalog& catalog);

/// System load rho = lambda * E[P] / total processors, with lambda in jobs
/// per hour and E[P] in hours.
double system_load(double arrival_rate_per_hour, double mean_seq_time_h,
                   int total_procs);

/// Inverse of system_load: the arrival rate that produces the given load.
double arrival_rate_for_load(double rho, double mean_seq_time_h, int total_procs);

/// Line-oriented format "id release demand benchmark", one job per line,
/// releases printed with enough digits to round-trip bit exactly.
void save_workload(const std::filesystem::path& file, std::span<const Job> jobs,
                   const Catalog& catalog);
std::vector<Job> load_workload(const std::filesystem::path& file,
                               const Catalog& catalog);

} // namespace dcsched
