#include "dcsched/thermal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dcsched/errors.hpp"

namespace dcsched {

HeatMatrix::HeatMatrix(std::size_t m, std::vector<double> row_major)
    : m_(m), d_(std::move(row_major)) {
    if (d_.size() != m_ * m_)
        throw ModelError("heat matrix is not square: " + std::to_string(d_.size()) +
                         " entries for dimension " + std::to_string(m_));
    for (std::size_t i = 0; i < d_.size(); ++i) {
        if (!(d_[i] >= 0.0))
            throw ModelError("heat matrix entry (" + std::to_string(i / m_) + "," +
                             std::to_string(i % m_) + ") is negative or NaN");
    }
}

double HeatMatrix::row_sum(std::size_t j) const {
    auto r = row(j);
    return std::accumulate(r.begin(), r.end(), 0.0);
}

double HeatMatrix::col_sum(std::size_t k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < m_; ++j)
        s += at(j, k);
    return s;
}

double HeatMatrix::max_entry() const {
    double mx = 0.0;
    for (double v : d_)
        mx = std::max(mx, v);
    return mx;
}

HeatMatrix HeatMatrix::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open heat matrix file: " + file.string());
    std::string line;
    std::vector<double> entries;
    long long m = -1;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        if (m < 0) {
            if (ls >> m) {
                if (m <= 0)
                    throw IoError(file.string() + ":" + std::to_string(lineno) +
                                  ": matrix dimension must be positive");
            } else {
                continue; // blank or comment-only line before the header
            }
        }
        double v;
        while (ls >> v)
            entries.push_back(v);
        if (!ls.eof())
            throw IoError(file.string() + ":" + std::to_string(lineno) +
                          ": malformed numeric value");
    }
    if (m < 0)
        throw IoError(file.string() + ": missing dimension header");
    if (entries.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m))
        throw IoError(file.string() + ": expected " + std::to_string(m * m) +
                      " entries, found " + std::to_string(entries.size()));
    try {
        return HeatMatrix(static_cast<std::size_t>(m), std::move(entries));
    } catch (const ModelError& e) {
        throw IoError(file.string() + ": " + e.what());
    }
}

void HeatMatrix::save(const std::filesystem::path& file) const {
    std::ofstream out(file);
    if (!out)
        throw IoError("cannot write heat matrix file: " + file.string());
    out << "# heat distribution matrix, C per W\n" << m_ << "\n";
    char buf[64];
    for (std::size_t j = 0; j < m_; ++j) {
        for (std::size_t k = 0; k < m_; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", at(j, k));
            out << buf << (k + 1 == m_ ? '\n' : ' ');
        }
    }
    if (!out)
        throw IoError("write failed: " + file.string());
}

double server_compute_power(double base_w, std::span<const double> running_w) {
    return std::accumulate(running_w.begin(), running_w.end(), base_w);
}

double max_inlet_increase(const HeatMatrix& d, std::span<const double> power_w) {
    const std::size_t m = d.size();
    if (power_w.size() != m)
        throw ModelError("power vector length " + std::to_string(power_w.size()) +
                         " does not match matrix dimension " + std::to_string(m));
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        auto r = d.row(j);
        double inc = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            inc += r[k] * power_w[k];
        worst = std::max(worst, inc);
    }
    return worst;
}

std::vector<double> inlet_temperatures(const HeatMatrix& d,
                                       std::span<const double> power_w,
                                       double t_sup_c) {
    const std::size_t m = d.size();
    if (power_w.size() != m)
        throw ModelError("power vector length " + std::to_string(power_w.size()) +
                         " does not match matrix dimension " + std::to_string(m));
    std::vector<double> t(m, t_sup_c);
    for (std::size_t j = 0; j < m; ++j) {
        auto r = d.row(j);
        for (std::size_t k = 0; k < m; ++k)
            t[j] += r[k] * power_w[k];
    }
    return t;
}

double supply_temperature(const HeatMatrix& d, std::span<const double> power_w,
                          double t_red_c) {
    return t_red_c - max_inlet_increase(d, power_w);
}

double cop(double t_c, const CoolingConfig& cfg) {
    const double value = cfg.cop_c2 * t_c * t_c + cfg.cop_c1 * t_c + cfg.cop_c0;
    if (!(value > 0.0))
        throw ModelError("CoP(" + std::to_string(t_c) +
                         " C) is not positive; cooling model invalid at this temperature");
    return value;
}

double cooling_power(double total_compute_w, double t_sup_c,
                     const CoolingConfig& cfg) {
    return total_compute_w / cop(t_sup_c, cfg);
}

double outlet_temperature(double t_in_c, double u_comp_w,
                          const CoolingConfig& cfg) {
    const double watts_per_degree =
        cfg.air_density * cfg.airflow_rate * cfg.air_heat_capacity;
    return t_in_c + u_comp_w / watts_per_degree;
}

} // namespace dcsched
