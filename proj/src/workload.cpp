#include "dcsched/workload.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "dcsched/errors.hpp"

namespace dcsched {

double exec_time_s(const Catalog& catalog, const Job& job, const Server& server) {
    return catalog.benchmarks.at(job.benchmark)
        .exec_time_s.at(static_cast<std::size_t>(server.proc_type));
}

double job_power_w(const Catalog& catalog, const Job& job, const Server& server) {
    return catalog.benchmarks.at(job.benchmark)
        .power_w.at(static_cast<std::size_t>(server.proc_type));
}

std::vector<Job> generate_workload(const WorkloadSpec& spec, const Catalog& catalog) {
    if (!(spec.arrival_rate_per_hour > 0.0))
        throw ConfigError("arrival rate must be positive");
    if (!(spec.arrival_duration_h > 0.0))
        throw ConfigError("arrival duration must be positive");
    if (spec.demand_min < 1 || spec.demand_max < spec.demand_min)
        throw ConfigError("demand range is empty or starts below 1");
    if (catalog.benchmarks.empty())
        throw ConfigError("catalog has no benchmarks");

    // Independent sub-streams per quantity.
    std::seed_seq arrival_seq{spec.seed, std::uint64_t{1}};
    std::seed_seq demand_seq{spec.seed, std::uint64_t{2}};
    std::seed_seq bench_seq{spec.seed, std::uint64_t{3}};
    std::mt19937_64 arrival_rng(arrival_seq);
    std::mt19937_64 demand_rng(demand_seq);
    std::mt19937_64 bench_rng(bench_seq);

    std::exponential_distribution<double> gap(spec.arrival_rate_per_hour / 3600.0);
    std::uniform_int_distribution<int> demand(spec.demand_min, spec.demand_max);
    std::uniform_int_distribution<int> uniform_bench(
        0, static_cast<int>(catalog.benchmarks.size()) - 1);
    if (!spec.benchmark_weights.empty() &&
        spec.benchmark_weights.size() != catalog.benchmarks.size())
        throw ConfigError("benchmark_weights length does not match the catalog");
    std::discrete_distribution<int> weighted_bench(spec.benchmark_weights.begin(),
                                                   spec.benchmark_weights.end());
    const bool weighted = !spec.benchmark_weights.empty();

    const double horizon_s = spec.arrival_duration_h * 3600.0;
    std::vector<Job> jobs;
    double t = 0.0;
    for (;;) {
        t += gap(arrival_rng);
        if (t > horizon_s)
            break;
        jobs.push_back({static_cast<int>(jobs.size()), t, demand(demand_rng),
                        weighted ? weighted_bench(bench_rng)
                                 : uniform_bench(bench_rng)});
    }
    return jobs;
}

double system_load(double arrival_rate_per_hour, double mean_seq_time_h,
                   int total_procs) {
    if (!(arrival_rate_per_hour > 0.0) || !(mean_seq_time_h > 0.0) || total_procs <= 0)
        throw ConfigError("system load inputs must be positive");
    return arrival_rate_per_hour * mean_seq_time_h / total_procs;
}

double arrival_rate_for_load(double rho, double mean_seq_time_h, int total_procs) {
    if (!(rho > 0.0) || !(mean_seq_time_h > 0.0) || total_procs <= 0)
        throw ConfigError("system load inputs must be positive");
    return rho * total_procs / mean_seq_time_h;
}

void save_workload(const std::filesystem::path& file, std::span<const Job> jobs,
                   const Catalog& catalog) {
    std::ofstream out(file);
    if (!out)
        throw IoError("cannot write workload file: " + file.string());
    out << "# id release_s demand benchmark\n";
    char buf[64];
    for (const Job& j : jobs) {
        std::snprintf(buf, sizeof buf, "%.17g", j.release_s);
        out << j.id << ' ' << buf << ' ' << j.demand << ' '
            << catalog.benchmarks.at(j.benchmark).name << '\n';
    }
    if (!out)
        throw IoError("write failed: " + file.string());
}

std::vector<Job> load_workload(const std::filesystem::path& file,
                               const Catalog& catalog) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open workload file: " + file.string());
    std::vector<Job> jobs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        Job j;
        std::string bench_name;
        if (!(ls >> j.id))
            continue; // blank line
        if (!(ls >> j.release_s >> j.demand >> bench_name))
            throw IoError(file.string() + ":" + std::to_string(lineno) +
                          ": malformed job record");
        j.benchmark = catalog.benchmark_index(bench_name);
        if (j.benchmark < 0)
            throw IoError(file.string() + ":" + std::to_string(lineno) +
                          ": unknown benchmark '" + bench_name + "'");
        if (j.release_s < 0.0 || j.demand < 1)
            throw IoError(file.string() + ":" + std::to_string(lineno) +
                          ": release time or demand out of range");
        jobs.push_back(j);
    }
    return jobs;
}

} // namespace dcsched
