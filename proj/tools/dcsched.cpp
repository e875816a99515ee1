// Command-line front end: placement, simulation, sweeps, the exhaustive
// placement oracle and the synthetic matrix generator.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "dcsched/config.hpp"
#include "dcsched/errors.hpp"

namespace {

using namespace dcsched;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

constexpr const char* kCsvHeader =
    "load,policy,f,R_ave_s,makespan_s,utilization,E_comp_dync_kWh,E_cool_dync_kWh,"
    "E_total_dync_kWh,avg_Tsup_C,seed,digest";

std::string csv_row(const ExperimentConfig& cfg, double load,
                    const MetricsReport& report, const std::string& seed_field) {
    const FuzzyChain chain = FuzzyChain::parse(cfg.policy);
    std::string f_field;
    if (auto f = chain.lead_fuzzy())
        f_field = fmt(*f);
    const double comp = joules_to_kwh(report.energy.e_comp_dync_j);
    const double cool = joules_to_kwh(report.energy.e_cool_dync_j);
    std::string row;
    row += fmt(load) + ',' + cfg.policy + ',' + f_field + ',';
    row += (report.r_ave_s ? fmt(*report.r_ave_s) : std::string()) + ',';
    row += fmt(report.makespan_s) + ',' + fmt(report.utilization) + ',';
    row += fmt(comp) + ',' + fmt(cool) + ',' + fmt(comp + cool) + ',';
    row += fmt(report.avg_supply_temp_c) + ',' + seed_field + ',' + cfg.digest();
    return row;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write output file: " + path);
    return out;
}

PlacementInstance instance_from(const ExperimentConfig& cfg, const SimScenario& scn) {
    PlacementInstance inst;
    inst.matrix = scn.matrix;
    inst.ref_powers = cfg.reference_powers_override
                          ? *cfg.reference_powers_override
                          : reference_powers(scn.fleet, scn.catalog);
    return inst;
}

int cmd_place(const ExperimentConfig& cfg, const std::string& out_path) {
    const SimScenario scn = cfg.build_scenario();
    const PlacementInstance inst = instance_from(cfg, scn);
    const Placement& placement = scn.placement;
    const std::vector<double> increase = inlet_increases(inst, placement);

    std::cout << "slot,server,inlet_increase_c\n";
    for (std::size_t k = 0; k < placement.sigma.size(); ++k)
        std::cout << k << ',' << placement.sigma[k] << ',' << fmt(increase[k]) << '\n';
    std::cout << "objective," << fmt(evaluate_placement(inst, placement)) << "\n";
    if (!out_path.empty())
        save_placement(out_path, placement);
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path, int workers,
                 const std::string& timeseries_path) {
    const SimScenario scn = cfg.build_scenario();
    const double load = cfg.effective_load(total_processors(scn.fleet));
    const ReplicationResult res = replicate(scn, cfg.replications, cfg.seed, workers);

    std::ofstream file;
    const bool to_file = !out_path.empty();
    if (to_file)
        file = open_out(out_path);
    std::ostream& out = to_file ? file : std::cout;
    out << kCsvHeader << '\n';
    for (const MetricsReport& r : res.runs)
        out << csv_row(cfg, load, r, std::to_string(r.seed)) << '\n';
    out << csv_row(cfg, load, res.mean, "mean") << '\n';
    if (to_file) // the CSV went to the file; summarize the mean on stdout
        std::cout << format_report(res.mean);

    if (!timeseries_path.empty()) {
        std::vector<TimePoint> points;
        run_simulation(scn, cfg.seed, &points);
        std::ofstream ts = open_out(timeseries_path);
        ts << "t_s,T_sup_C,total_power_W,cooling_power_W\n";
        for (const TimePoint& p : points)
            ts << fmt(p.t_s) << ',' << fmt(p.t_sup_c) << ',' << fmt(p.total_power_w)
               << ',' << fmt(p.cooling_power_w) << '\n';
    }
    if (res.mean.supply_below_freezing)
        std::cerr << "warning: supply temperature dropped below 0 C during some runs\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& base, const std::vector<double>& fuzzy_grid,
              const std::vector<double>& rho_grid, const std::string& out_path,
              int workers) {
    if (fuzzy_grid.empty() && rho_grid.empty())
        throw ConfigError("sweep needs --fuzzy and/or --rho grid points");

    const FuzzyChain chain = FuzzyChain::parse(base.policy);
    if (!fuzzy_grid.empty() && chain.stages.size() != 2)
        throw ConfigError("--fuzzy sweeps need a two-objective policy chain");

    std::vector<ExperimentConfig> grid;
    const std::vector<double> rhos =
        rho_grid.empty() ? std::vector<double>{-1.0} : rho_grid;
    for (double rho : rhos) {
        ExperimentConfig cfg = base;
        if (!rho_grid.empty())
            cfg.rho = rho;
        if (fuzzy_grid.empty()) {
            grid.push_back(cfg);
        } else {
            for (double f : fuzzy_grid) {
                ExperimentConfig pt = cfg;
                FuzzyChain c = chain;
                c.stages.front().fuzzy = f;
                pt.policy = c.to_string();
                FuzzyChain::parse(pt.policy); // validates sentinels and range
                grid.push_back(pt);
            }
        }
    }

    std::vector<std::string> rows(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    const int threads =
        std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int tid = 0; tid < threads; ++tid) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= grid.size())
                    return;
                try {
                    const SimScenario scn = grid[i].build_scenario();
                    const double load =
                        grid[i].effective_load(total_processors(scn.fleet));
                    const ReplicationResult res =
                        replicate(scn, grid[i].replications, grid[i].seed, 1);
                    rows[i] = csv_row(grid[i], load, res.mean, "mean");
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool)
        t.join();
    for (const std::exception_ptr& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::ofstream file;
    const bool to_file = !out_path.empty();
    if (to_file)
        file = open_out(out_path);
    std::ostream& out = to_file ? file : std::cout;
    out << kCsvHeader << '\n';
    for (const std::string& row : rows)
        out << row << '\n';
    return 0;
}

int cmd_oracle(const ExperimentConfig& cfg, std::size_t cap) {
    const SimScenario scn = cfg.build_scenario();
    const PlacementInstance inst = instance_from(cfg, scn);
    const OracleResult oracle = brute_force_optimal(inst, cap);
    const Placement greedy = gsp(inst);
    const double greedy_value = evaluate_placement(inst, greedy);

    std::cout << "optimal_sigma,";
    for (std::size_t k = 0; k < oracle.placement.sigma.size(); ++k)
        std::cout << oracle.placement.sigma[k]
                  << (k + 1 < oracle.placement.sigma.size() ? ' ' : '\n');
    std::cout << "optimal_objective," << fmt(oracle.objective) << '\n';
    std::cout << "gsp_objective," << fmt(greedy_value) << '\n';
    std::cout << "gsp_gap," << fmt(greedy_value - oracle.objective) << '\n';
    return 0;
}

int cmd_genmatrix(const RoomLayout& layout, double intensity, double max_entry,
                  std::uint64_t seed, const std::string& out_path) {
    MatrixGenParams params;
    params.intensity = intensity;
    params.max_entry = max_entry;
    const HeatMatrix matrix = generate_matrix(layout, params, seed);
    if (out_path.empty()) {
        std::cout << matrix.size() << "\n";
        for (std::size_t j = 0; j < matrix.size(); ++j)
            for (std::size_t k = 0; k < matrix.size(); ++k)
                std::cout << fmt(matrix.at(j, k)) << (k + 1 == matrix.size() ? '\n' : ' ');
    } else {
        matrix.save(out_path);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal-aware datacenter placement and scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    if (const char* env = std::getenv("DCSCHED_CONFIG"))
        config_path = env;
    std::string out_path;
    std::string timeseries_path;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1)
        workers = 1;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    int reps_override = 0;

    const auto add_common = [&](CLI::App* cmd) {
        auto* opt = cmd->add_option("--config", config_path,
                                    "experiment config (JSON); defaults to $DCSCHED_CONFIG");
        if (config_path.empty())
            opt->required();
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--reps", reps_override, "override the replication count");
        cmd->add_option("--workers", workers, "concurrent workers");
    };

    CLI::App* place = app.add_subcommand("place", "compute a server placement");
    add_common(place);

    CLI::App* simulate = app.add_subcommand("simulate", "run replicated simulations");
    add_common(simulate);
    simulate->add_option("--timeseries", timeseries_path,
                         "also dump per-event (t, T_sup, power, cooling) samples");

    CLI::App* sweep = app.add_subcommand("sweep", "grid of simulations over f or rho");
    add_common(sweep);
    std::vector<double> fuzzy_grid, rho_grid;
    sweep->add_option("--fuzzy", fuzzy_grid,
                      "fuzzy factors (sentinels -1 and 2 allowed)");
    sweep->add_option("--rho", rho_grid, "system loads");

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive optimal placement");
    add_common(oracle);
    std::size_t cap = 9;
    oracle->add_option("--cap", cap, "largest instance the enumeration accepts");

    CLI::App* genmatrix =
        app.add_subcommand("genmatrix", "emit a synthetic heat distribution matrix");
    RoomLayout layout;
    double intensity = 1.0;
    double max_entry = 0.004;
    std::uint64_t gen_seed = 1;
    genmatrix->add_option("--rows", layout.rows, "rack rows");
    genmatrix->add_option("--racks", layout.racks_per_row, "racks per row");
    genmatrix->add_option("--servers-per-rack", layout.servers_per_rack,
                          "slots per rack");
    genmatrix->add_option("--intensity", intensity, "recirculation scale factor");
    genmatrix->add_option("--max-entry", max_entry, "largest entry at intensity 1, C/W");
    genmatrix->add_option("--seed", gen_seed, "generator seed");
    genmatrix->add_option("--out", out_path, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (genmatrix->parsed())
            return cmd_genmatrix(layout, intensity, max_entry, gen_seed, out_path);

        ExperimentConfig cfg = ExperimentConfig::load(config_path);
        if (seed_given)
            cfg.seed = seed_override;
        if (reps_override > 0)
            cfg.replications = reps_override;

        if (place->parsed())
            return cmd_place(cfg, out_path);
        if (simulate->parsed())
            return cmd_simulate(cfg, out_path, workers, timeseries_path);
        if (sweep->parsed())
            return cmd_sweep(cfg, fuzzy_grid, rho_grid, out_path, workers);
        if (oracle->parsed())
            return cmd_oracle(cfg, cap);
    } catch (const ConfigError& e) {
        std::cerr << "error[config]: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error[io]: " << e.what() << '\n';
        return 3;
    } catch (const ModelError& e) {
        std::cerr << "error[model]: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error[runtime]: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
