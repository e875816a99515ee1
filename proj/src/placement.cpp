#include "dcsched/placement.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dcsched/errors.hpp"

namespace dcsched {

bool Placement::is_permutation() const {
    std::vector<char> seen(sigma.size(), 0);
    for (int s : sigma) {
        if (s < 0 || static_cast<std::size_t>(s) >= sigma.size() || seen[s])
            return false;
        seen[s] = 1;
    }
    return true;
}

Placement identity_placement(std::size_t m) {
    Placement p;
    p.sigma.resize(m);
    std::iota(p.sigma.begin(), p.sigma.end(), 0);
    return p;
}

Placement load_placement(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open placement file: " + file.string());
    Placement p;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        int v;
        while (ls >> v)
            p.sigma.push_back(v);
        if (!ls.eof())
            throw IoError(file.string() + ": malformed server index");
    }
    if (!p.is_permutation())
        throw IoError(file.string() + ": entries are not a permutation of 0.." +
                      std::to_string(p.sigma.size() ? p.sigma.size() - 1 : 0));
    return p;
}

void save_placement(const std::filesystem::path& file, const Placement& placement) {
    std::ofstream out(file);
    if (!out)
        throw IoError("cannot write placement file: " + file.string());
    out << "# server index per rack slot, slot order\n";
    for (std::size_t k = 0; k < placement.sigma.size(); ++k)
        out << placement.sigma[k] << '\n';
    if (!out)
        throw IoError("write failed: " + file.string());
}

namespace {

void check_instance(const PlacementInstance& inst) {
    if (inst.ref_powers.size() != inst.matrix.size())
        throw ModelError("reference power vector length does not match matrix dimension");
    for (double p : inst.ref_powers)
        if (!(p >= 0.0))
            throw ModelError("reference powers must be nonnegative");
}

std::vector<double> placed_powers(const PlacementInstance& inst,
                                  const Placement& placement) {
    check_instance(inst);
    if (placement.sigma.size() != inst.matrix.size() || !placement.is_permutation())
        throw ModelError("placement is not a permutation of the instance's servers");
    std::vector<double> u(placement.sigma.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = inst.ref_powers[placement.sigma[k]];
    return u;
}

} // namespace

std::vector<double> inlet_increases(const PlacementInstance& inst,
                                    const Placement& placement) {
    const std::vector<double> u = placed_powers(inst, placement);
    std::vector<double> incr = inlet_temperatures(inst.matrix, u, 0.0);
    return incr;
}

double evaluate_placement(const PlacementInstance& inst, const Placement& placement) {
    const std::vector<double> u = placed_powers(inst, placement);
    return max_inlet_increase(inst.matrix, u);
}

Placement gsp(const PlacementInstance& inst) {
    return gsp_variant(inst, SortOrder::Descending, SlotRule::Minimize);
}

Placement gsp_variant(const PlacementInstance& inst, SortOrder order, SlotRule rule) {
    check_instance(inst);
    const std::size_t m = inst.matrix.size();

    std::vector<int> servers(m);
    std::iota(servers.begin(), servers.end(), 0);
    std::stable_sort(servers.begin(), servers.end(), [&](int a, int b) {
        return order == SortOrder::Descending
                   ? inst.ref_powers[a] > inst.ref_powers[b]
                   : inst.ref_powers[a] < inst.ref_powers[b];
    });

    Placement placement;
    placement.sigma.assign(m, -1);
    std::vector<double> incr(m, 0.0); // cumulative inlet increase per slot
    std::vector<char> taken(m, 0);

    for (int server : servers) {
        const double power = inst.ref_powers[server];
        std::size_t best_slot = m;
        double best_peak = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (taken[k])
                continue;
            double peak = 0.0;
            for (std::size_t l = 0; l < m; ++l)
                peak = std::max(peak, incr[l] + inst.matrix.at(l, k) * power);
            const bool better = rule == SlotRule::Minimize ? peak < best_peak
                                                           : peak > best_peak;
            if (best_slot == m || better) {
                best_slot = k;
                best_peak = peak;
            }
        }
        placement.sigma[best_slot] = server;
        taken[best_slot] = 1;
        for (std::size_t l = 0; l < m; ++l)
            incr[l] += inst.matrix.at(l, best_slot) * power;
    }
    return placement;
}

OracleResult brute_force_optimal(const PlacementInstance& inst, std::size_t max_m) {
    check_instance(inst);
    const std::size_t m = inst.matrix.size();
    if (m > max_m)
        throw ModelError("instance dimension " + std::to_string(m) +
                         " exceeds the enumeration cap " + std::to_string(max_m));

    Placement current = identity_placement(m);
    OracleResult best{current, evaluate_placement(inst, current)};
    // next_permutation walks lexicographically, so keeping strict improvements
    // leaves the lexicographically smallest optimal permutation.
    while (std::next_permutation(current.sigma.begin(), current.sigma.end())) {
        const double value = evaluate_placement(inst, current);
        if (value < best.objective) {
            best.placement = current;
            best.objective = value;
        }
    }
    return best;
}

PlacementInstance three_partition_instance(std::span<const long long> values, int h,
                                           long long target) {
    if (h < 1)
        throw ModelError("3-partition: h must be at least 1");
    if (values.size() != static_cast<std::size_t>(3 * h))
        throw ModelError("3-partition: expected " + std::to_string(3 * h) +
                         " integers, got " + std::to_string(values.size()));
    long long sum = 0;
    for (long long a : values) {
        if (a <= 0)
            throw ModelError("3-partition: integers must be positive");
        if (!(4 * a > target && 2 * a < target))
            throw ModelError("3-partition: value " + std::to_string(a) +
                             " is not strictly between B/4 and B/2 for B = " +
                             std::to_string(target));
        sum += a;
    }
    if (sum != static_cast<long long>(h) * target)
        throw ModelError("3-partition: sum " + std::to_string(sum) + " is not h*B = " +
                         std::to_string(static_cast<long long>(h) * target));

    const std::size_t m = values.size();
    std::vector<double> d(m * m, 0.0);
    for (int l = 1; l <= h; ++l) {
        const std::size_t row = static_cast<std::size_t>(3 * l - 1);
        d[row * m + (3 * l - 3)] = 1.0;
        d[row * m + (3 * l - 2)] = 1.0;
        d[row * m + (3 * l - 1)] = 1.0;
    }
    PlacementInstance inst;
    inst.matrix = HeatMatrix(m, std::move(d));
    inst.ref_powers.assign(values.begin(), values.end());
    return inst;
}

} // namespace dcsched
