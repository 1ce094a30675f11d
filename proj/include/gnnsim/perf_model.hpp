#pragma once

#include <cstdint>
#include <string>

#include "gnnsim/matrices.hpp"
#include "gnnsim/primitives.hpp"

namespace gnnsim {

/// VCK5000-style device description. n_aie() is the total number of AIE
/// tiles across the Computation Cores.
struct HardwareConfig {
    int num_alu_arrays = 8;
    int p = 8;                       // pipelines per ALU array
    int q = 4;                       // multipliers per pipeline
    int num_aie_ccs = 32;
    int tiles_per_cc = 4;
    int beta = 8;                    // FP32 MACs per AIE tile per cycle
    double f_pl = 297e6;             // Hz
    double f_aie = 1e9;              // Hz
    double ddr_bandwidth = 102.4e9;  // bytes/s
    int mode_switch_cycles = 1;

    count_t n_aie() const { return static_cast<count_t>(num_aie_ccs) * tiles_per_cc; }
    count_t aie_macs_per_cycle() const { return n_aie() * beta; }
    count_t alu_spdmm_macs_per_cycle() const { return static_cast<count_t>(p) * q; }
    count_t alu_spmm_macs_per_cycle() const { return p; }

    void validate() const;

    /// "vck5000" (defaults) or "vck5000-scaled" (num_aie_ccs doubled).
    static HardwareConfig preset(const std::string& name);
};

struct TaskEstimate {
    count_t cycles_aie = 0;
    double t_aie = 0.0;              // seconds
    count_t cycles_alu = 0;
    double t_alu = 0.0;              // seconds
    PrimitiveKind alu_primitive = PrimitiveKind::Spdmm;
};

/// GEMM on the full AIE array: ceil(m*n*d / (N_AIE * beta)) cycles.
count_t estimate_aie_cycles(count_t m, count_t n, count_t d, const HardwareConfig& cfg);

/// Cheaper of SpDMM (ceil(a_min*m*n*d / pq)) and SpMM (ceil(ax*ay*m*n*d / p));
/// ties choose SpDMM.
std::pair<count_t, PrimitiveKind> estimate_alu_cycles(count_t m, count_t n, count_t d,
                                                      double alpha_x, double alpha_y,
                                                      const HardwareConfig& cfg);

/// Both device estimates for one task; queue routing happens in the runtime.
TaskEstimate compare_devices(count_t m, count_t n, count_t d,
                             double alpha_x, double alpha_y,
                             const HardwareConfig& cfg);

}  // namespace gnnsim
