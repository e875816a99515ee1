#include "dcsched/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "dcsched/errors.hpp"

namespace dcsched {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + where + key + "' in config");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("bad value type for config key '") + key + "'");
        }
    }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open config file: " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse(text, file.parent_path());
}

namespace {

ExperimentConfig parse_document(const json& doc,
                                const std::filesystem::path& base_dir) {
    require_keys(doc, "", {"version", "seed", "replications", "matrix", "fleet",
                           "cooling", "placement", "reference_powers", "policy",
                           "workload", "scheduler"});

    ExperimentConfig cfg;
    read(doc, "version", cfg.version);
    if (cfg.version != 1)
        throw ConfigError("unsupported config version " + std::to_string(cfg.version));
    read(doc, "seed", cfg.seed);
    read(doc, "replications", cfg.replications);
    if (cfg.replications < 1)
        throw ConfigError("replications must be at least 1");

    if (doc.contains("matrix")) {
        const json& m = doc.at("matrix");
        require_keys(m, "matrix.", {"file", "generator"});
        if (m.contains("file") == m.contains("generator"))
            throw ConfigError("matrix needs exactly one of 'file' or 'generator'");
        if (m.contains("file"))
            cfg.matrix_file = resolve(base_dir, m.at("file").get<std::string>());
        else {
            const json& g = m.at("generator");
            require_keys(g, "matrix.generator.",
                         {"rows", "racks_per_row", "servers_per_rack", "intensity",
                          "max_entry", "jitter", "seed"});
            RoomLayout layout;
            read(g, "rows", layout.rows);
            read(g, "racks_per_row", layout.racks_per_row);
            read(g, "servers_per_rack", layout.servers_per_rack);
            cfg.matrix_layout = layout;
            read(g, "intensity", cfg.matrix_params.intensity);
            read(g, "max_entry", cfg.matrix_params.max_entry);
            read(g, "jitter", cfg.matrix_params.jitter);
            read(g, "seed", cfg.matrix_seed);
        }
    } else {
        cfg.matrix_layout = RoomLayout{};
    }

    if (doc.contains("fleet")) {
        const json& f = doc.at("fleet");
        require_keys(f, "fleet.", {"servers_per_type", "procs_per_server", "base_power_w"});
        read(f, "servers_per_type", cfg.servers_per_type);
        read(f, "procs_per_server", cfg.procs_per_server);
        read(f, "base_power_w", cfg.base_power_w);
    }

    if (doc.contains("cooling")) {
        const json& c = doc.at("cooling");
        require_keys(c, "cooling.",
                     {"cop", "t_red_c", "air_density", "airflow_rate",
                      "air_heat_capacity"});
        if (c.contains("cop")) {
            const auto cop = c.at("cop").get<std::vector<double>>();
            if (cop.size() != 3)
                throw ConfigError("cooling.cop must list [c2, c1, c0]");
            cfg.cooling.cop_c2 = cop[0];
            cfg.cooling.cop_c1 = cop[1];
            cfg.cooling.cop_c0 = cop[2];
        }
        read(c, "t_red_c", cfg.cooling.t_red_c);
        read(c, "air_density", cfg.cooling.air_density);
        read(c, "airflow_rate", cfg.cooling.airflow_rate);
        read(c, "air_heat_capacity", cfg.cooling.air_heat_capacity);
    }

    if (doc.contains("placement")) {
        const json& p = doc.at("placement");
        if (p.is_string()) {
            const std::string name = p.get<std::string>();
            if (name == "loc")
                cfg.placement = PlacementStrategy::Loc;
            else if (name == "gsp1")
                cfg.placement = PlacementStrategy::Gsp1;
            else if (name == "gsp2")
                cfg.placement = PlacementStrategy::Gsp2;
            else if (name == "gsp3")
                cfg.placement = PlacementStrategy::Gsp3;
            else
                throw ConfigError("unknown placement '" + name +
                                  "' (expected loc, gsp1, gsp2, gsp3 or {file})");
        } else if (p.is_object()) {
            require_keys(p, "placement.", {"file"});
            cfg.placement = PlacementStrategy::File;
            cfg.placement_file = resolve(base_dir, p.at("file").get<std::string>());
        } else {
            throw ConfigError("placement must be a name or a {file} object");
        }
    }

    if (doc.contains("reference_powers"))
        cfg.reference_powers_override =
            doc.at("reference_powers").get<std::vector<double>>();

    read(doc, "policy", cfg.policy);
    FuzzyChain::parse(cfg.policy); // validate now

    if (doc.contains("workload")) {
        const json& w = doc.at("workload");
        require_keys(w, "workload.",
                     {"rho", "arrival_rate_per_hour", "duration_hours", "demand_min",
                      "demand_max", "benchmark_weights", "mean_seq_time_hours",
                      "file"});
        if (w.contains("rho") && w.contains("arrival_rate_per_hour"))
            throw ConfigError("workload: give either rho or arrival_rate_per_hour");
        if (w.contains("rho"))
            cfg.rho = w.at("rho").get<double>();
        read(w, "arrival_rate_per_hour", cfg.arrival_rate_per_hour);
        read(w, "duration_hours", cfg.arrival_duration_h);
        read(w, "demand_min", cfg.demand_min);
        read(w, "demand_max", cfg.demand_max);
        read(w, "benchmark_weights", cfg.benchmark_weights);
        read(w, "mean_seq_time_hours", cfg.mean_seq_time_h);
        if (w.contains("file"))
            cfg.workload_file = resolve(base_dir, w.at("file").get<std::string>());
    }

    if (doc.contains("scheduler")) {
        const json& s = doc.at("scheduler");
        require_keys(s, "scheduler.", {"requeue_all_servers", "thermal_cost_reading"});
        read(s, "requeue_all_servers", cfg.dispatch.requeue_all_servers);
        if (s.contains("thermal_cost_reading")) {
            const std::string r = s.at("thermal_cost_reading").get<std::string>();
            if (r == "per_inlet")
                cfg.dispatch.thermal_reading = ThermalCostReading::PerInlet;
            else if (r == "column_sum")
                cfg.dispatch.thermal_reading = ThermalCostReading::ColumnSum;
            else
                throw ConfigError("thermal_cost_reading must be per_inlet or column_sum");
        }
    }
    return cfg;
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& json_text,
                                         const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config root must be a JSON object");
    try {
        return parse_document(doc, base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value type: ") + e.what());
    }
}

std::string ExperimentConfig::canonical() const {
    json doc;
    doc["version"] = version;
    doc["seed"] = seed;
    doc["replications"] = replications;
    if (matrix_file)
        doc["matrix"]["file"] = matrix_file->string();
    else {
        json g;
        g["rows"] = matrix_layout->rows;
        g["racks_per_row"] = matrix_layout->racks_per_row;
        g["servers_per_rack"] = matrix_layout->servers_per_rack;
        g["intensity"] = matrix_params.intensity;
        g["max_entry"] = matrix_params.max_entry;
        g["jitter"] = matrix_params.jitter;
        g["seed"] = matrix_seed;
        doc["matrix"]["generator"] = g;
    }
    doc["fleet"] = {{"servers_per_type", servers_per_type},
                    {"procs_per_server", procs_per_server},
                    {"base_power_w", base_power_w}};
    doc["cooling"] = {{"cop", {cooling.cop_c2, cooling.cop_c1, cooling.cop_c0}},
                      {"t_red_c", cooling.t_red_c},
                      {"air_density", cooling.air_density},
                      {"airflow_rate", cooling.airflow_rate},
                      {"air_heat_capacity", cooling.air_heat_capacity}};
    switch (placement) {
    case PlacementStrategy::Loc: doc["placement"] = "loc"; break;
    case PlacementStrategy::Gsp1: doc["placement"] = "gsp1"; break;
    case PlacementStrategy::Gsp2: doc["placement"] = "gsp2"; break;
    case PlacementStrategy::Gsp3: doc["placement"] = "gsp3"; break;
    case PlacementStrategy::File: doc["placement"]["file"] = placement_file->string(); break;
    }
    if (reference_powers_override)
        doc["reference_powers"] = *reference_powers_override;
    doc["policy"] = policy;
    json w;
    if (rho)
        w["rho"] = *rho;
    else
        w["arrival_rate_per_hour"] = arrival_rate_per_hour;
    w["duration_hours"] = arrival_duration_h;
    w["demand_min"] = demand_min;
    w["demand_max"] = demand_max;
    if (!benchmark_weights.empty())
        w["benchmark_weights"] = benchmark_weights;
    w["mean_seq_time_hours"] = mean_seq_time_h;
    if (workload_file)
        w["file"] = workload_file->string();
    doc["workload"] = w;
    doc["scheduler"] = {
        {"requeue_all_servers", dispatch.requeue_all_servers},
        {"thermal_cost_reading",
         dispatch.thermal_reading == ThermalCostReading::PerInlet ? "per_inlet"
                                                                  : "column_sum"}};
    return doc.dump();
}

std::string ExperimentConfig::digest() const {
    const std::string text = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double ExperimentConfig::effective_arrival_rate(int total_procs) const {
    if (rho)
        return arrival_rate_for_load(*rho, mean_seq_time_h, total_procs);
    return arrival_rate_per_hour;
}

double ExperimentConfig::effective_load(int total_procs) const {
    if (rho)
        return *rho;
    return system_load(arrival_rate_per_hour, mean_seq_time_h, total_procs);
}

SimScenario ExperimentConfig::build_scenario() const {
    SimScenario scn;
    scn.catalog = builtin_catalog();
    scn.cooling = cooling;
    scn.fleet = default_fleet(scn.catalog, servers_per_type, procs_per_server,
                              base_power_w);
    scn.matrix = matrix_file ? HeatMatrix::load(*matrix_file)
                             : generate_matrix(*matrix_layout, matrix_params,
                                               matrix_seed);
    if (scn.matrix.size() != scn.fleet.size())
        throw ConfigError("matrix dimension " + std::to_string(scn.matrix.size()) +
                          " does not match fleet size " +
                          std::to_string(scn.fleet.size()));

    PlacementInstance inst;
    inst.matrix = scn.matrix;
    inst.ref_powers = reference_powers_override
                          ? *reference_powers_override
                          : reference_powers(scn.fleet, scn.catalog);
    if (inst.ref_powers.size() != scn.fleet.size())
        throw ConfigError("reference_powers length does not match fleet size");
    switch (placement) {
    case PlacementStrategy::Loc:
        scn.placement = identity_placement(scn.fleet.size());
        break;
    case PlacementStrategy::Gsp1:
        scn.placement = gsp_variant(inst, SortOrder::Descending, SlotRule::Minimize);
        break;
    case PlacementStrategy::Gsp2:
        scn.placement = gsp_variant(inst, SortOrder::Ascending, SlotRule::Minimize);
        break;
    case PlacementStrategy::Gsp3:
        scn.placement = gsp_variant(inst, SortOrder::Descending, SlotRule::Maximize);
        break;
    case PlacementStrategy::File:
        scn.placement = load_placement(*placement_file);
        if (scn.placement.sigma.size() != scn.fleet.size())
            throw ConfigError("placement file size does not match fleet size");
        break;
    }

    scn.policy = FuzzyChain::parse(policy);
    scn.workload.arrival_rate_per_hour =
        effective_arrival_rate(total_processors(scn.fleet));
    scn.workload.arrival_duration_h = arrival_duration_h;
    scn.workload.demand_min = demand_min;
    scn.workload.demand_max = demand_max;
    scn.workload.benchmark_weights = benchmark_weights;
    if (workload_file)
        scn.fixed_jobs = load_workload(*workload_file, scn.catalog);
    scn.dispatch = dispatch;
    return scn;
}

} // namespace dcsched
