#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace dcsched {

/// Heat distribution matrix of a computer room. Entry (j, k) is the steady
/// state inlet temperature rise at rack slot j, in degrees Celsius, per watt
/// of computing power drawn by the server in slot k. Square and nonnegative.
class HeatMatrix {
  public:
    HeatMatrix() = default;
    HeatMatrix(std::size_t m, std::vector<double> row_major);

    std::size_t size() const { return m_; }
    double at(std::size_t j, std::size_t k) const { return d_[j * m_ + k]; }
    std::span<const double> row(std::size_t j) const {
        return {d_.data() + j * m_, m_};
    }
    double row_sum(std::size_t j) const;
    double col_sum(std::size_t k) const;
    double max_entry() const;

    /// Text format: '#' comment lines, then the dimension m, then m*m
    /// whitespace-separated entries in row-major order.
    static HeatMatrix load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

  private:
    std::size_t m_ = 0;
    std::vector<double> d_;
};

/// CRAC and air-stream parameters. Defaults are the water-chilled unit
/// polynomial CoP(T) = 0.0068 T^2 + 0.0008 T + 0.458 and the room constants
/// used throughout the simulation experiments.
struct CoolingConfig {
    double cop_c2 = 0.0068;            // 1/C^2
    double cop_c1 = 0.0008;            // 1/C
    double cop_c0 = 0.458;             // dimensionless
    double t_red_c = 25.0;             // redline inlet temperature, C
    double air_density = 1.168;        // kg/m^3
    double airflow_rate = 0.1;         // m^3/s per server
    double air_heat_capacity = 1004.0; // J/(C*kg)
};

/// Base power plus the power of every job currently running on the server.
double server_compute_power(double base_w, std::span<const double> running_w);

/// max_j sum_k d(j,k) * u(k): the largest inlet temperature rise caused by
/// the per-slot computing powers u.
double max_inlet_increase(const HeatMatrix& d, std::span<const double> power_w);

/// Per-slot inlet temperatures: supply temperature plus recirculated heat.
std::vector<double> inlet_temperatures(const HeatMatrix& d,
                                       std::span<const double> power_w,
                                       double t_sup_c);

/// Highest supply temperature that keeps every inlet at or below the
/// redline: t_red minus the maximum inlet increase.
double supply_temperature(const HeatMatrix& d, std::span<const double> power_w,
                          double t_red_c);

/// Coefficient of performance of the CRAC unit at supply temperature t.
/// Throws ModelError when the polynomial is non-positive there.
double cop(double t_c, const CoolingConfig& cfg);

/// Power drawn by the CRAC to extract `total_compute_w` of heat while
/// supplying air at `t_sup_c`.
double cooling_power(double total_compute_w, double t_sup_c,
                     const CoolingConfig& cfg);

/// Outlet temperature of one server: inlet plus the temperature rise of the
/// air stream carrying u_comp watts of heat at the configured flow rate.
double outlet_temperature(double t_in_c, double u_comp_w,
                          const CoolingConfig& cfg);

} // namespace dcsched
