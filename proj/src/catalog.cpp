#include "dcsched/catalog.hpp"

#include "dcsched/errors.hpp"

namespace dcsched {

int Catalog::processor_index(std::string_view name) const {
    for (std::size_t i = 0; i < processors.size(); ++i)
        if (processors[i].name == name)
            return static_cast<int>(i);
    return -1;
}

int Catalog::benchmark_index(std::string_view name) const {
    for (std::size_t i = 0; i < benchmarks.size(); ++i)
        if (benchmarks[i].name == name)
            return static_cast<int>(i);
    return -1;
}

const Catalog& builtin_catalog() {
    static const Catalog catalog = [] {
        Catalog c;
        c.processors = {
            {"CoreI7_4770R", 10381, 65},
            {"CoreI7_4960HQ", 10310, 47},
            {"CoreI7_4600U", 4498, 15},
            {"XeonE5_2697v2", 19125, 130},
            {"XeonE3_1230Lv3", 7344, 25},
        };
        c.benchmarks = {
            {"fft", {3400, 3450, 7850, 1850, 4800}, {62.27, 45.03, 14.37, 124.54, 23.95}},
            {"c-ray", {1150, 1200, 2700, 650, 1650}, {33.70, 24.37, 7.78, 67.41, 12.96}},
            {"abinit", {1700, 1750, 3950, 950, 2450}, {36.11, 26.11, 8.33, 72.22, 13.89}},
            {"linpack", {3350, 3400, 7700, 1850, 4750}, {53.81, 38.91, 12.42, 107.61, 20.69}},
            {"tar", {2000, 2050, 4600, 1100, 2800}, {50.92, 36.82, 11.75, 101.83, 19.58}},
        };
        return c;
    }();
    return catalog;
}

std::vector<Server> default_fleet(const Catalog& catalog, int servers_per_type,
                                  int procs_per_server, double base_power_w) {
    if (servers_per_type < 1 || procs_per_server < 1)
        throw ConfigError("fleet counts must be positive");
    std::vector<Server> fleet;
    fleet.reserve(catalog.processors.size() * servers_per_type);
    int id = 0;
    for (std::size_t type = 0; type < catalog.processors.size(); ++type)
        for (int i = 0; i < servers_per_type; ++i)
            fleet.push_back({id++, static_cast<int>(type), procs_per_server, base_power_w});
    return fleet;
}

int total_processors(std::span<const Server> fleet) {
    int total = 0;
    for (const Server& s : fleet)
        total += s.num_procs;
    return total;
}

double mean_benchmark_power(const Catalog& catalog, int proc_type) {
    if (catalog.benchmarks.empty())
        throw ConfigError("catalog has no benchmarks");
    double sum = 0.0;
    for (const BenchmarkProfile& b : catalog.benchmarks)
        sum += b.power_w.at(static_cast<std::size_t>(proc_type));
    return sum / static_cast<double>(catalog.benchmarks.size());
}

std::vector<double> reference_powers(std::span<const Server> fleet,
                                     const Catalog& catalog) {
    std::vector<double> ref;
    ref.reserve(fleet.size());
    for (const Server& s : fleet)
        ref.push_back(s.base_power_w +
                      mean_benchmark_power(catalog, s.proc_type) * s.num_procs);
    return ref;
}

double mean_sequential_time_hours(const Catalog& catalog) {
    if (catalog.benchmarks.empty())
        throw ConfigError("catalog has no benchmarks");
    double sum_s = 0.0;
    for (const BenchmarkProfile& b : catalog.benchmarks)
        for (double t : b.exec_time_s)
            sum_s += t;
    return sum_s / static_cast<double>(catalog.benchmarks.size()) / 3600.0;
}

std::pair<double, double> translate_measurement(const ProcessorType& ref,
                                                const ProcessorType& target,
                                                double time_s, double power_w) {
    const double time = time_s * ref.passmark / target.passmark;
    const double power = target.tdp_w * (power_w / ref.tdp_w);
    return {time, power};
}

} // namespace dcsched
