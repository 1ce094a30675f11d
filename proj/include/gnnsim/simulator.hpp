#pragma once

#include <vector>

#include "gnnsim/runtime.hpp"

namespace gnnsim {

struct SimReport {
    double makespan_s = 0.0;
    std::vector<DeviceStats> devices;
    std::vector<double> device_utilization;  // busy_s / makespan
    count_t total_macs = 0;
    count_t total_flops = 0;  // 1 MAC = 1 FLOP here
    count_t total_data_elements = 0;
    std::vector<TraceEvent> timeline;
    QueueReport queues;
};

/// Runs the scheduler and folds the trace into aggregate report fields.
SimReport simulate(const TaskGraph& graph, const HardwareConfig& cfg,
                   const ScheduleOptions& opts = {});

/// Transfer time for one task's data at an exclusive share of DDR bandwidth:
/// 4 bytes per value moved. The scheduler itself splits bandwidth among
/// concurrent transfers; this is the sole-user figure.
double memory_model(const Task& task, PrimitiveKind primitive, const HardwareConfig& cfg,
                    MemoryPolicy policy);

/// Option helpers for the PL-only / PL+AIE comparison.
ScheduleOptions pl_only(ScheduleOptions opts = {});
ScheduleOptions aie_only(ScheduleOptions opts = {});

}  // namespace gnnsim
