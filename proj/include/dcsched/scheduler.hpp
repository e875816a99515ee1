#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcsched/catalog.hpp"
#include "dcsched/placement.hpp"
#include "dcsched/thermal.hpp"
#include "dcsched/workload.hpp"

namespace dcsched {

enum class CostKind {
    Uniform,      // no preference; the random tie-break picks the server
    MinHR,        // column sum of the heat matrix at the server's slot
    CoolestInlet, // current inlet temperature
    PerfAware,    // processing time of the job on the server
    EnergyAware,  // dynamic computing plus cooling energy of the assignment
    ThermalAware, // maximum inlet temperature after adding the job's heat
};

const char* cost_kind_name(CostKind kind);

struct ChainStage {
    CostKind kind;
    double fuzzy = 0.0; // ignored on the last stage
};

/// Ordered objectives of a composite cost function. Every stage but the last
/// carries a fuzzy factor in [0, 1]. Two-objective chains also accept the
/// sentinel factors -1 (decide solely by the first objective) and 2 (solely
/// by the last); resolved() collapses those to single-stage chains.
struct FuzzyChain {
    std::vector<ChainStage> stages;

    /// Chain notation: single names ("perf") or 'x(f=0.6)>y' compositions.
    /// Names: uniform, minhr, coolest, perf, energy, thermal.
    static FuzzyChain parse(std::string_view text);
    static FuzzyChain single(CostKind kind);

    FuzzyChain resolved() const;
    std::string to_string() const;
    std::optional<double> lead_fuzzy() const;
};

/// Affine rescaling of costs onto [0, 1] over the candidate set. All-equal
/// inputs (including a single candidate) normalize to all zeros so that the
/// next objective decides.
std::vector<double> normalize_costs(std::span<const double> costs);

struct BiCost {
    double norm_first; // normalized first-objective cost, in [0, 1]
    double second;     // raw second-objective cost
};

/// The fuzzy-based priority rule for two objectives: a precedes b when a is
/// within the acceptance band f and b is not, or, within the same band, when
/// the appropriate objective breaks the tie. A strict weak ordering.
bool fuzzy_less(const BiCost& a, const BiCost& b, double f);

struct RunningJob {
    int job_id;
    int demand;
    double power_w;
    double end_s;
};

struct ServerState {
    int server_id = 0;
    int slot = 0;
    int total_procs = 0;
    int avail_procs = 0;
    std::vector<RunningJob> running;
};

/// Which reading of the thermal-aware cost to use: the resulting maximum
/// inlet temperature after adding the job's heat from the server's slot
/// (default), or the current maximum inlet plus the slot's column sum times
/// the job power.
enum class ThermalCostReading { PerInlet, ColumnSum };

struct DispatchOptions {
    /// When true, jobs leaving the wait queue on a completion are re-routed
    /// through the full cost chain over all servers instead of going to the
    /// freeing server.
    bool requeue_all_servers = false;
    ThermalCostReading thermal_reading = ThermalCostReading::PerInlet;
};

struct Assignment {
    int job_id;
    int server_id;
    double start_s;
    double exec_s;
    double power_w;
    int demand;
};

/// Online greedy dispatch: jobs are assigned on arrival to the best eligible
/// server under the cost chain, or queued in shortest-job-first order when no
/// server has enough idle processors; completions free processors and drain
/// the queue. Single-threaded; all randomness comes from the caller's engine.
class Dispatcher {
  public:
    Dispatcher(const HeatMatrix& matrix, const CoolingConfig& cooling,
               std::span<const Server> fleet, const Catalog& catalog,
               const Placement& placement, const FuzzyChain& chain,
               DispatchOptions opts = {});

    std::optional<Assignment> on_arrival(const Job& job, double now_s,
                                         std::mt19937_64& rng);
    std::vector<Assignment> on_completion(int job_id, int server_id, double now_s,
                                          std::mt19937_64& rng);

    /// The cost-chain winner among the eligible servers. Exposed for tests;
    /// on_arrival is the normal entry point.
    int select_server(const Job& job, std::span<const int> eligible,
                      std::mt19937_64& rng) const;

    /// Raw cost of assigning the job to one server under a single objective.
    double cost(CostKind kind, const Job& job, int server_id) const;

    const std::vector<ServerState>& servers() const { return servers_; }
    std::span<const double> slot_powers() const { return slot_power_; }
    /// Base-plus-jobs total, accumulated in assignment order so that runs
    /// with identical schedules agree bit for bit regardless of placement.
    double total_power() const { return total_base_power_ + dynamic_power_; }
    double supply_temp() const;
    double static_cooling_power() const { return static_cooling_power_; }
    std::size_t queue_size() const { return queue_.size(); }
    std::vector<int> queued_job_ids() const;
    int running_jobs() const;

    /// Servers examined by arrival handling so far; grows by the fleet size
    /// per arrival event.
    std::uint64_t servers_scanned() const { return servers_scanned_; }

  private:
    struct QueuedJob {
        Job job;
        double ref_time_s;
        std::uint64_t seq;
    };

    struct RoomView {
        std::vector<double> row_heat; // recirculation heat per inlet, C
        double t_sup_c;
        double total_power_w;
    };

    RoomView room_view() const;
    double peak_increase_with(const RoomView& view, int slot, double power_w) const;
    double cost_in_view(CostKind kind, const Job& job, const ServerState& server,
                        const RoomView& view) const;
    Assignment commit(const Job& job, ServerState& server, double now_s);
    void enqueue(const Job& job);

    const HeatMatrix& matrix_;
    const CoolingConfig& cooling_;
    const Catalog& catalog_;
    std::vector<Server> fleet_;
    std::vector<ServerState> servers_;
    std::vector<double> slot_power_;
    std::vector<double> slot_col_sum_;
    FuzzyChain chain_;
    DispatchOptions opts_;
    double static_cooling_power_ = 0.0;
    double total_base_power_ = 0.0;
    double dynamic_power_ = 0.0;
    std::vector<QueuedJob> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t servers_scanned_ = 0;
};

} // namespace dcsched
