#include "gnnsim/perf_model.hpp"

#include <cmath>
#include <stdexcept>

namespace gnnsim {

void HardwareConfig::validate() const {
    if (num_alu_arrays < 1 || p < 1 || q < 1 || num_aie_ccs < 1 || tiles_per_cc < 1 ||
        beta < 1)
        throw std::invalid_argument("HardwareConfig: counts must be >= 1");
    if (f_pl <= 0 || f_aie <= 0 || ddr_bandwidth <= 0)
        throw std::invalid_argument("HardwareConfig: rates must be positive");
    if (mode_switch_cycles < 0)
        throw std::invalid_argument("HardwareConfig: mode_switch_cycles must be >= 0");
}

HardwareConfig HardwareConfig::preset(const std::string& name) {
    HardwareConfig cfg;
    if (name == "vck5000") return cfg;
    if (name == "vck5000-scaled") {
        cfg.num_aie_ccs *= 2;
        return cfg;
    }
    throw std::invalid_argument("unknown hardware preset: " + name);
}

namespace {

count_t ceil_cycles(double work, count_t rate) {
    if (work <= 0.0) return 0;
    return static_cast<count_t>(std::ceil(work / static_cast<double>(rate)));
}

}  // namespace

count_t estimate_aie_cycles(count_t m, count_t n, count_t d, const HardwareConfig& cfg) {
    const count_t macs = m * n * d;
    const count_t rate = cfg.aie_macs_per_cycle();
    return (macs + rate - 1) / rate;
}

std::pair<count_t, PrimitiveKind> estimate_alu_cycles(count_t m, count_t n, count_t d,
                                                      double alpha_x, double alpha_y,
                                                      const HardwareConfig& cfg) {
    const double mnd = static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(d);
    const double alpha_min = std::min(alpha_x, alpha_y);
    const count_t spdmm = ceil_cycles(alpha_min * mnd, cfg.alu_spdmm_macs_per_cycle());
    const count_t spmm = ceil_cycles(alpha_x * alpha_y * mnd, cfg.alu_spmm_macs_per_cycle());
    if (spdmm <= spmm) return {spdmm, PrimitiveKind::Spdmm};
    return {spmm, PrimitiveKind::Spmm};
}

TaskEstimate compare_devices(count_t m, count_t n, count_t d,
                             double alpha_x, double alpha_y,
                             const HardwareConfig& cfg) {
    TaskEstimate est;
    est.cycles_aie = estimate_aie_cycles(m, n, d, cfg);
    est.t_aie = static_cast<double>(est.cycles_aie) / cfg.f_aie;
    auto [cycles, kind] = estimate_alu_cycles(m, n, d, alpha_x, alpha_y, cfg);
    est.cycles_alu = cycles;
    est.t_alu = static_cast<double>(cycles) / cfg.f_pl;
    est.alu_primitive = kind;
    return est;
}

}  // namespace gnnsim
