#include "dcsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dcsched/errors.hpp"

namespace dcsched {

const char* cost_kind_name(CostKind kind) {
    switch (kind) {
    case CostKind::Uniform: return "uniform";
    case CostKind::MinHR: return "minhr";
    case CostKind::CoolestInlet: return "coolest";
    case CostKind::PerfAware: return "perf";
    case CostKind::EnergyAware: return "energy";
    case CostKind::ThermalAware: return "thermal";
    }
    return "?";
}

namespace {

CostKind parse_kind(std::string_view name) {
    for (CostKind kind : {CostKind::Uniform, CostKind::MinHR, CostKind::CoolestInlet,
                          CostKind::PerfAware, CostKind::EnergyAware,
                          CostKind::ThermalAware})
        if (name == cost_kind_name(kind))
            return kind;
    throw ConfigError("unknown cost function '" + std::string(name) + "'");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

FuzzyChain FuzzyChain::single(CostKind kind) { return FuzzyChain{{{kind, 0.0}}}; }

FuzzyChain FuzzyChain::parse(std::string_view text) {
    FuzzyChain chain;
    std::size_t start = 0;
    const std::string s(text);
    while (start <= s.size()) {
        std::size_t sep = s.find('>', start);
        std::string part(trim(std::string_view(s).substr(
            start, sep == std::string::npos ? std::string::npos : sep - start)));
        if (part.empty())
            throw ConfigError("empty stage in policy '" + s + "'");
        ChainStage stage{};
        const std::size_t paren = part.find('(');
        if (paren == std::string::npos) {
            stage.kind = parse_kind(trim(part));
        } else {
            stage.kind = parse_kind(trim(std::string_view(part).substr(0, paren)));
            if (part.back() != ')')
                throw ConfigError("missing ')' in policy stage '" + part + "'");
            std::string inner(
                trim(std::string_view(part).substr(paren + 1, part.size() - paren - 2)));
            if (inner.rfind("f=", 0) != 0)
                throw ConfigError("expected 'f=<value>' in policy stage '" + part + "'");
            std::size_t used = 0;
            try {
                stage.fuzzy = std::stod(inner.substr(2), &used);
            } catch (const std::exception&) {
                throw ConfigError("malformed fuzzy factor in '" + part + "'");
            }
            if (used != inner.size() - 2)
                throw ConfigError("malformed fuzzy factor in '" + part + "'");
        }
        chain.stages.push_back(stage);
        if (sep == std::string::npos)
            break;
        start = sep + 1;
    }
    if (chain.stages.empty())
        throw ConfigError("empty policy string");
    chain.resolved(); // validate factors eagerly
    return chain;
}

FuzzyChain FuzzyChain::resolved() const {
    if (stages.empty())
        throw ConfigError("policy chain has no objectives");
    FuzzyChain out = *this;
    if (out.stages.size() == 2) {
        const double f = out.stages.front().fuzzy;
        if (f == -1.0)
            out.stages = {ChainStage{out.stages.front().kind, 0.0}};
        else if (f == 2.0)
            out.stages = {ChainStage{out.stages.back().kind, 0.0}};
    }
    for (std::size_t i = 0; i + 1 < out.stages.size(); ++i) {
        const double f = out.stages[i].fuzzy;
        if (!(f >= 0.0 && f <= 1.0))
            throw ConfigError("fuzzy factor " + std::to_string(f) +
                              " outside [0, 1] (sentinels -1/2 apply to "
                              "two-objective chains only)");
    }
    return out;
}

std::string FuzzyChain::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (i)
            out << '>';
        out << cost_kind_name(stages[i].kind);
        if (i + 1 < stages.size()) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", stages[i].fuzzy);
            out << "(f=" << buf << ")";
        }
    }
    return out.str();
}

std::optional<double> FuzzyChain::lead_fuzzy() const {
    if (stages.size() < 2)
        return std::nullopt;
    return stages.front().fuzzy;
}

std::vector<double> normalize_costs(std::span<const double> costs) {
    if (costs.empty())
        throw ModelError("normalize_costs: no eligible servers");
    const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
    std::vector<double> out(costs.size(), 0.0);
    if (*hi > *lo) {
        const double span = *hi - *lo;
        for (std::size_t i = 0; i < costs.size(); ++i)
            out[i] = (costs[i] - *lo) / span;
    }
    return out;
}

bool fuzzy_less(const BiCost& a, const BiCost& b, double f) {
    const bool a_in = a.norm_first <= f;
    const bool b_in = b.norm_first <= f;
    if (a_in != b_in)
        return a_in; // condition 1
    if (a_in) {      // both within the acceptance band
        if (a.second != b.second)
            return a.second < b.second; // condition 2
        return a.norm_first < b.norm_first; // condition 3
    }
    if (a.norm_first != b.norm_first)
        return a.norm_first < b.norm_first; // condition 4
    return a.second < b.second;             // condition 5
}

Dispatcher::Dispatcher(const HeatMatrix& matrix, const CoolingConfig& cooling,
                       std::span<const Server> fleet, const Catalog& catalog,
                       const Placement& placement, const FuzzyChain& chain,
                       DispatchOptions opts)
    : matrix_(matrix), cooling_(cooling), catalog_(catalog),
      fleet_(fleet.begin(), fleet.end()), chain_(chain.resolved()), opts_(opts) {
    const std::size_t m = matrix_.size();
    if (fleet_.size() != m)
        throw ModelError("fleet size does not match the heat matrix dimension");
    if (placement.sigma.size() != m || !placement.is_permutation())
        throw ModelError("placement is not a permutation over the fleet");
    for (std::size_t i = 0; i < fleet_.size(); ++i)
        if (fleet_[i].id != static_cast<int>(i))
            throw ModelError("fleet must be indexed by contiguous server ids");

    servers_.resize(m);
    slot_power_.assign(m, 0.0);
    for (std::size_t slot = 0; slot < m; ++slot) {
        const int server_id = placement.sigma[slot];
        const Server& hw = fleet_[server_id];
        servers_[server_id] =
            ServerState{server_id, static_cast<int>(slot), hw.num_procs, hw.num_procs, {}};
        slot_power_[slot] = hw.base_power_w;
    }
    slot_col_sum_.resize(m);
    for (std::size_t k = 0; k < m; ++k)
        slot_col_sum_[k] = matrix_.col_sum(k);
    for (const Server& hw : fleet_)
        total_base_power_ += hw.base_power_w;
    static_cooling_power_ =
        cooling_power(std::accumulate(slot_power_.begin(), slot_power_.end(), 0.0),
                      supply_temperature(matrix_, slot_power_, cooling_.t_red_c),
                      cooling_);
}

double Dispatcher::supply_temp() const {
    return supply_temperature(matrix_, slot_power_, cooling_.t_red_c);
}

int Dispatcher::running_jobs() const {
    int n = 0;
    for (const ServerState& s : servers_)
        n += static_cast<int>(s.running.size());
    return n;
}

std::vector<int> Dispatcher::queued_job_ids() const {
    std::vector<int> ids;
    ids.reserve(queue_.size());
    for (const QueuedJob& q : queue_)
        ids.push_back(q.job.id);
    return ids;
}

Dispatcher::RoomView Dispatcher::room_view() const {
    const std::size_t m = matrix_.size();
    RoomView view;
    view.row_heat.assign(m, 0.0);
    double peak = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        auto row = matrix_.row(j);
        double heat = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            heat += row[k] * slot_power_[k];
        view.row_heat[j] = heat;
        peak = std::max(peak, heat);
    }
    view.t_sup_c = cooling_.t_red_c - peak;
    view.total_power_w = total_power();
    return view;
}

double Dispatcher::peak_increase_with(const RoomView& view, int slot,
                                      double power_w) const {
    const std::size_t m = matrix_.size();
    double peak = 0.0;
    for (std::size_t l = 0; l < m; ++l)
        peak = std::max(peak, view.row_heat[l] +
                                  matrix_.at(l, static_cast<std::size_t>(slot)) * power_w);
    return peak;
}

double Dispatcher::cost_in_view(CostKind kind, const Job& job,
                                const ServerState& server, const RoomView& view) const {
    switch (kind) {
    case CostKind::Uniform:
        return 0.0;
    case CostKind::MinHR:
        return slot_col_sum_[server.slot];
    case CostKind::CoolestInlet:
        return view.t_sup_c + view.row_heat[server.slot];
    case CostKind::PerfAware:
        return exec_time_s(catalog_, job, fleet_[server.server_id]);
    case CostKind::EnergyAware: {
        // Dynamic energy attributable to the assignment: the job's computing
        // energy plus the cooling power it adds at this instant, held for its
        // duration. The delta is against the room as it currently runs;
        // against the static baseline the room's whole dynamic cooling load
        // would be charged to the candidate in proportion to its processing
        // time, reducing this cost to a response-time proxy.
        const double exec = exec_time_s(catalog_, job, fleet_[server.server_id]);
        const double power = job_power_w(catalog_, job, fleet_[server.server_id]);
        const double peak = peak_increase_with(view, server.slot, power);
        const double with_job = cooling_power(view.total_power_w + power,
                                              cooling_.t_red_c - peak, cooling_);
        const double without_job =
            cooling_power(view.total_power_w, view.t_sup_c, cooling_);
        return exec * power + (with_job - without_job) * exec;
    }
    case CostKind::ThermalAware: {
        const double power = job_power_w(catalog_, job, fleet_[server.server_id]);
        if (opts_.thermal_reading == ThermalCostReading::ColumnSum) {
            const double cur_max =
                *std::max_element(view.row_heat.begin(), view.row_heat.end());
            return view.t_sup_c + cur_max + slot_col_sum_[server.slot] * power;
        }
        return view.t_sup_c + peak_increase_with(view, server.slot, power);
    }
    }
    throw ModelError("unhandled cost kind");
}

double Dispatcher::cost(CostKind kind, const Job& job, int server_id) const {
    return cost_in_view(kind, job, servers_.at(server_id), room_view());
}

int Dispatcher::select_server(const Job& job, std::span<const int> eligible,
                              std::mt19937_64& rng) const {
    if (eligible.empty())
        throw ModelError("select_server called with no eligible servers");

    const RoomView view = room_view();
    std::vector<int> survivors(eligible.begin(), eligible.end());
    const auto stage_costs = [&](CostKind kind) {
        std::vector<double> costs;
        costs.reserve(survivors.size());
        for (int id : survivors)
            costs.push_back(cost_in_view(kind, job, servers_[id], view));
        return costs;
    };

    // Threshold stages leave the final selection to the last two objectives
    // (or the single objective), compared with the fuzzy rule below.
    for (std::size_t i = 0; i + 2 < chain_.stages.size(); ++i) {
        const std::vector<double> norm = normalize_costs(stage_costs(chain_.stages[i].kind));
        std::vector<int> kept;
        for (std::size_t s = 0; s < survivors.size(); ++s)
            if (norm[s] <= chain_.stages[i].fuzzy)
                kept.push_back(survivors[s]);
        survivors = std::move(kept);
    }

    std::vector<int> ties;
    if (chain_.stages.size() == 1) {
        const std::vector<double> costs = stage_costs(chain_.stages[0].kind);
        double best = costs[0];
        ties.push_back(survivors[0]);
        for (std::size_t s = 1; s < survivors.size(); ++s) {
            if (costs[s] < best) {
                best = costs[s];
                ties.assign(1, survivors[s]);
            } else if (costs[s] == best) {
                ties.push_back(survivors[s]);
            }
        }
    } else {
        const ChainStage& first = chain_.stages[chain_.stages.size() - 2];
        const CostKind last_kind = chain_.stages.back().kind;
        const std::vector<double> norm = normalize_costs(stage_costs(first.kind));
        const std::vector<double> last = stage_costs(last_kind);
        BiCost best{norm[0], last[0]};
        ties.push_back(survivors[0]);
        for (std::size_t s = 1; s < survivors.size(); ++s) {
            const BiCost c{norm[s], last[s]};
            if (fuzzy_less(c, best, first.fuzzy)) {
                best = c;
                ties.assign(1, survivors[s]);
            } else if (!fuzzy_less(best, c, first.fuzzy)) {
                ties.push_back(survivors[s]);
            }
        }
    }
    if (ties.size() == 1)
        return ties.front();
    std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
    return ties[pick(rng)];
}

Assignment Dispatcher::commit(const Job& job, ServerState& server, double now_s) {
    const Server& hw = fleet_[server.server_id];
    const double exec = exec_time_s(catalog_, job, hw);
    const double power = job_power_w(catalog_, job, hw);
    server.avail_procs -= job.demand;
    server.running.push_back({job.id, job.demand, power, now_s + exec});
    slot_power_[server.slot] += power;
    dynamic_power_ += power;
    return {job.id, server.server_id, now_s, exec, power, job.demand};
}

void Dispatcher::enqueue(const Job& job) {
    QueuedJob q{job, catalog_.benchmarks.at(job.benchmark).exec_time_s.at(0),
                next_seq_++};
    auto pos = std::upper_bound(queue_.begin(), queue_.end(), q,
                                [](const QueuedJob& a, const QueuedJob& b) {
                                    return a.ref_time_s < b.ref_time_s;
                                });
    queue_.insert(pos, std::move(q));
}

std::optional<Assignment> Dispatcher::on_arrival(const Job& job, double now_s,
                                                 std::mt19937_64& rng) {
    std::vector<int> eligible;
    for (const ServerState& s : servers_) {
        ++servers_scanned_;
        if (s.avail_procs >= job.demand)
            eligible.push_back(s.server_id);
    }
    if (eligible.empty()) {
        enqueue(job);
        return std::nullopt;
    }
    const int winner = select_server(job, eligible, rng);
    return commit(job, servers_[winner], now_s);
}

std::vector<Assignment> Dispatcher::on_completion(int job_id, int server_id,
                                                  double now_s, std::mt19937_64& rng) {
    ServerState& server = servers_.at(server_id);
    auto it = std::find_if(server.running.begin(), server.running.end(),
                           [&](const RunningJob& r) { return r.job_id == job_id; });
    if (it == server.running.end())
        throw ModelError("completion for a job not running on server " +
                         std::to_string(server_id));
    server.avail_procs += it->demand;
    slot_power_[server.slot] -= it->power_w;
    dynamic_power_ -= it->power_w;
    server.running.erase(it);

    std::vector<Assignment> assigned;
    for (auto q = queue_.begin(); q != queue_.end();) {
        if (opts_.requeue_all_servers) {
            std::vector<int> eligible;
            for (const ServerState& s : servers_)
                if (s.avail_procs >= q->job.demand)
                    eligible.push_back(s.server_id);
            if (!eligible.empty()) {
                const int winner = select_server(q->job, eligible, rng);
                assigned.push_back(commit(q->job, servers_[winner], now_s));
                q = queue_.erase(q);
                continue;
            }
        } else if (server.avail_procs >= q->job.demand) {
            assigned.push_back(commit(q->job, server, now_s));
            q = queue_.erase(q);
            continue;
        }
        ++q;
    }
    return assigned;
}

} // namespace dcsched
