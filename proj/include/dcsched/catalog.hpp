#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcsched {

struct ProcessorType {
    std::string name;
    double passmark;
    double tdp_w;
};

/// Measured behaviour of one benchmark: execution time and power draw,
/// indexed by processor type in catalog order.
struct BenchmarkProfile {
    std::string name;
    std::vector<double> exec_time_s;
    std::vector<double> power_w;
};

struct Catalog {
    std::vector<ProcessorType> processors;
    std::vector<BenchmarkProfile> benchmarks;

    int processor_index(std::string_view name) const; // -1 when absent
    int benchmark_index(std::string_view name) const; // -1 when absent
};

/// The five nondominated Intel processors and five profiled HPC benchmarks
/// used in the simulation experiments, with the measured execution times
/// and power draws.
const Catalog& builtin_catalog();

/// A physical server: a multi-node enclosure of identical processors.
struct Server {
    int id = 0;
    int proc_type = 0; // index into Catalog::processors
    int num_procs = 0;
    double base_power_w = 0.0;
};

/// One group of servers per catalog processor type, in catalog order.
/// Defaults model the reference room: 10 enclosures of 18 processors per
/// type, 130 W base power each, 900 processors in total.
std::vector<Server> default_fleet(const Catalog& catalog, int servers_per_type = 10,
                                  int procs_per_server = 18,
                                  double base_power_w = 130.0);

int total_processors(std::span<const Server> fleet);

/// Mean over the benchmark catalog of the per-job power draw on the given
/// processor type.
double mean_benchmark_power(const Catalog& catalog, int proc_type);

/// Static per-server estimate of typical draw, used by the placement
/// heuristics: base power plus the catalog-average benchmark power on the
/// server's processor type, scaled by its processor count.
std::vector<double> reference_powers(std::span<const Server> fleet,
                                     const Catalog& catalog);

/// Expected sequential execution time of a random catalog job, in hours:
/// the time to run the benchmark once on each processor type, averaged over
/// the benchmark mix.
double mean_sequential_time_hours(const Catalog& catalog);

/// Coarse translation of a measurement taken on `ref` to a processor outside
/// the catalog: time scales inversely with the passmark ratio and power
/// scales the target TDP by the reference duty fraction. An estimate only;
/// nothing in the simulation applies it unless asked.
std::pair<double, double> translate_measurement(const ProcessorType& ref,
                                                const ProcessorType& target,
                                                double time_s, double power_w);

} // namespace dcsched
