#include "dcsched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <queue>
#include <sstream>
#include <thread>

#include "dcsched/errors.hpp"

namespace dcsched {

namespace {

struct Event {
    double t_s;
    bool completion; // completions run before arrivals at equal timestamps
    int job_id;
    int server_id; // completions only
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t_s != b.t_s)
            return a.t_s > b.t_s;
        if (a.completion != b.completion)
            return b.completion;
        return a.job_id > b.job_id;
    }
};

} // namespace

IntervalState integrate_interval(EnergyLedger& ledger, const HeatMatrix& matrix,
                                 const CoolingConfig& cooling,
                                 std::span<const double> slot_powers,
                                 double total_power_w, double total_base_w,
                                 double static_cooling_w, double dt_s) {
    if (dt_s < 0.0)
        throw ModelError("integration interval must be nonnegative");
    IntervalState state{};
    state.total_power_w = total_power_w;
    state.t_sup_c = supply_temperature(matrix, slot_powers, cooling.t_red_c);
    state.cooling_power_w = cooling_power(state.total_power_w, state.t_sup_c, cooling);
    if (dt_s > 0.0) {
        ledger.e_comp_j += state.total_power_w * dt_s;
        ledger.e_comp_stat_j += total_base_w * dt_s;
        ledger.e_comp_dync_j += (state.total_power_w - total_base_w) * dt_s;
        ledger.e_cool_j += state.cooling_power_w * dt_s;
        ledger.e_cool_stat_j += static_cooling_w * dt_s;
        ledger.e_cool_dync_j += (state.cooling_power_w - static_cooling_w) * dt_s;
    }
    return state;
}

MetricsReport run_simulation(const SimScenario& scenario, std::uint64_t seed,
                             std::vector<TimePoint>* timeseries) {
    const std::vector<Job> jobs = [&] {
        if (scenario.fixed_jobs)
            return *scenario.fixed_jobs;
        WorkloadSpec spec = scenario.workload;
        spec.seed = seed;
        return generate_workload(spec, scenario.catalog);
    }();

    int max_procs = 0;
    for (const Server& s : scenario.fleet)
        max_procs = std::max(max_procs, s.num_procs);
    for (const Job& j : jobs)
        if (j.demand > max_procs)
            throw ModelError("job " + std::to_string(j.id) + " demands " +
                             std::to_string(j.demand) +
                             " processors, more than any server has; it would wait forever");

    Dispatcher dispatcher(scenario.matrix, scenario.cooling, scenario.fleet,
                          scenario.catalog, scenario.placement, scenario.policy,
                          scenario.dispatch);
    std::seed_seq rng_seq{seed, std::uint64_t{0x5eed}};
    std::mt19937_64 rng(rng_seq);

    std::priority_queue<Event, std::vector<Event>, EventAfter> events;
    std::vector<const Job*> job_by_id(jobs.size());
    for (const Job& j : jobs) {
        if (j.id < 0 || static_cast<std::size_t>(j.id) >= jobs.size())
            throw ModelError("job ids must be contiguous from 0");
        job_by_id[j.id] = &j;
        events.push({j.release_s, false, j.id, -1});
    }

    MetricsReport report;
    report.seed = seed;
    report.n_jobs = jobs.size();

    EnergyLedger& ledger = report.energy;
    const double total_base = [&] {
        double b = 0.0;
        for (const Server& s : scenario.fleet)
            b += s.base_power_w;
        return b;
    }();
    const double static_cool_w = dispatcher.static_cooling_power();

    double t_prev = 0.0;
    double tsup_integral = 0.0;
    double response_sum = 0.0;
    double busy_proc_seconds = 0.0;
    std::size_t completed = 0;

    report.per_server_dynamic_energy_j.assign(scenario.fleet.size(), 0.0);
    const auto handle_assignment = [&](const Assignment& a) {
        events.push({a.start_s + a.exec_s, true, a.job_id, a.server_id});
        report.per_job_dynamic_energy_j += a.exec_s * a.power_w;
        report.per_server_dynamic_energy_j[a.server_id] += a.exec_s * a.power_w;
        busy_proc_seconds += static_cast<double>(a.demand) * a.exec_s;
    };

    IntervalState cur = integrate_interval(ledger, scenario.matrix, scenario.cooling,
                                           dispatcher.slot_powers(),
                                           dispatcher.total_power(), total_base,
                                           static_cool_w, 0.0);
    if (timeseries)
        timeseries->push_back({0.0, cur.t_sup_c, cur.total_power_w, cur.cooling_power_w});

    while (!events.empty()) {
        const Event ev = events.top();
        events.pop();
        const double dt = ev.t_s - t_prev;
        if (dt > 0.0) {
            integrate_interval(ledger, scenario.matrix, scenario.cooling,
                               dispatcher.slot_powers(), dispatcher.total_power(),
                               total_base, static_cool_w, dt);
            tsup_integral += cur.t_sup_c * dt;
            t_prev = ev.t_s;
        }

        if (ev.completion) {
            ++completed;
            const Job& job = *job_by_id[ev.job_id];
            response_sum += ev.t_s - job.release_s;
            report.makespan_s = std::max(report.makespan_s, ev.t_s);
            for (const Assignment& a :
                 dispatcher.on_completion(ev.job_id, ev.server_id, ev.t_s, rng))
                handle_assignment(a);
        } else {
            if (auto a = dispatcher.on_arrival(*job_by_id[ev.job_id], ev.t_s, rng))
                handle_assignment(*a);
        }
        cur = integrate_interval(ledger, scenario.matrix, scenario.cooling,
                                 dispatcher.slot_powers(), dispatcher.total_power(),
                                 total_base, static_cool_w, 0.0);
        if (cur.t_sup_c < 0.0)
            report.supply_below_freezing = true;
        if (timeseries)
            timeseries->push_back(
                {ev.t_s, cur.t_sup_c, cur.total_power_w, cur.cooling_power_w});
    }

    if (completed != jobs.size() || dispatcher.queue_size() != 0)
        throw ModelError("simulation ended with jobs still waiting");

    ledger.t1_s = 0.0;
    ledger.t2_s = report.makespan_s;
    if (!jobs.empty())
        report.r_ave_s = response_sum / static_cast<double>(jobs.size());
    const double window = report.makespan_s;
    const int procs = total_processors(scenario.fleet);
    report.utilization = window > 0.0 ? busy_proc_seconds / (procs * window) : 0.0;
    report.avg_supply_temp_c = window > 0.0 ? tsup_integral / window : cur.t_sup_c;
    return report;
}

ReplicationResult replicate(const SimScenario& scenario, int n_runs,
                            std::uint64_t base_seed, int workers) {
    if (n_runs < 1)
        throw ConfigError("replication count must be at least 1");
    ReplicationResult result;
    result.runs.resize(n_runs);

    const auto one_run = [&](int i) {
        try {
            result.runs[i] = run_simulation(scenario, base_seed + i);
        } catch (const std::exception& e) {
            throw ModelError("run " + std::to_string(i) + " (seed " +
                             std::to_string(base_seed + i) + ") failed: " + e.what());
        }
    };
    const int threads = std::clamp(workers, 1, n_runs);
    if (threads == 1) {
        for (int i = 0; i < n_runs; ++i)
            one_run(i);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (int tid = 0; tid < threads; ++tid) {
            pool.emplace_back([&, tid] {
                try {
                    for (int i = tid; i < n_runs; i += threads)
                        one_run(i);
                } catch (...) {
                    errors[tid] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool)
            t.join();
        for (const std::exception_ptr& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    MetricsReport& mean = result.mean;
    mean.seed = base_seed;
    double r_sum = 0.0;
    std::size_t r_count = 0;
    for (const MetricsReport& r : result.runs) {
        mean.n_jobs += r.n_jobs;
        if (r.r_ave_s) {
            r_sum += *r.r_ave_s;
            ++r_count;
        }
        mean.makespan_s += r.makespan_s;
        mean.utilization += r.utilization;
        mean.energy.e_comp_j += r.energy.e_comp_j;
        mean.energy.e_comp_stat_j += r.energy.e_comp_stat_j;
        mean.energy.e_comp_dync_j += r.energy.e_comp_dync_j;
        mean.energy.e_cool_j += r.energy.e_cool_j;
        mean.energy.e_cool_stat_j += r.energy.e_cool_stat_j;
        mean.energy.e_cool_dync_j += r.energy.e_cool_dync_j;
        mean.energy.t2_s = std::max(mean.energy.t2_s, r.energy.t2_s);
        mean.avg_supply_temp_c += r.avg_supply_temp_c;
        mean.per_job_dynamic_energy_j += r.per_job_dynamic_energy_j;
        if (mean.per_server_dynamic_energy_j.size() < r.per_server_dynamic_energy_j.size())
            mean.per_server_dynamic_energy_j.resize(r.per_server_dynamic_energy_j.size(), 0.0);
        for (std::size_t j = 0; j < r.per_server_dynamic_energy_j.size(); ++j)
            mean.per_server_dynamic_energy_j[j] += r.per_server_dynamic_energy_j[j];
        mean.supply_below_freezing |= r.supply_below_freezing;
    }
    const double n = static_cast<double>(n_runs);
    mean.n_jobs = static_cast<std::size_t>(
        std::llround(static_cast<double>(mean.n_jobs) / n));
    if (r_count > 0)
        mean.r_ave_s = r_sum / static_cast<double>(r_count);
    mean.makespan_s /= n;
    mean.utilization /= n;
    mean.energy.e_comp_j /= n;
    mean.energy.e_comp_stat_j /= n;
    mean.energy.e_comp_dync_j /= n;
    mean.energy.e_cool_j /= n;
    mean.energy.e_cool_stat_j /= n;
    mean.energy.e_cool_dync_j /= n;
    mean.avg_supply_temp_c /= n;
    mean.per_job_dynamic_energy_j /= n;
    for (double& e : mean.per_server_dynamic_energy_j)
        e /= n;
    return result;
}

std::string format_report(const MetricsReport& report) {
    std::ostringstream out;
    char buf[64];
    const auto line = [&](const char* label, double v, const char* unit) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        out << label << ": " << buf << ' ' << unit << '\n';
    };
    out << "jobs: " << report.n_jobs << '\n';
    if (report.r_ave_s)
        line("avg response", *report.r_ave_s, "s");
    else
        out << "avg response: n/a\n";
    line("makespan", report.makespan_s, "s");
    line("utilization", report.utilization, "");
    line("E_comp", report.energy.e_comp_j, "J");
    line("E_comp static", report.energy.e_comp_stat_j, "J");
    line("E_comp dynamic", report.energy.e_comp_dync_j, "J");
    line("E_cool", report.energy.e_cool_j, "J");
    line("E_cool static", report.energy.e_cool_stat_j, "J");
    line("E_cool dynamic", report.energy.e_cool_dync_j, "J");
    line("E_total dynamic",
         joules_to_kwh(report.energy.e_comp_dync_j + report.energy.e_cool_dync_j),
         "kWh");
    line("avg supply temperature", report.avg_supply_temp_c, "C");
    out << "seed: " << report.seed << '\n';
    if (report.supply_below_freezing)
        out << "warning: supply temperature went below 0 C\n";
    return out.str();
}

} // namespace dcsched
