#include "gnnsim/simulator.hpp"

namespace gnnsim {

SimReport simulate(const TaskGraph& graph, const HardwareConfig& cfg,
                   const ScheduleOptions& opts) {
    ScheduleResult sched = schedule(graph, cfg, opts);

    SimReport report;
    report.makespan_s = sched.makespan_s;
    report.devices = sched.devices;
    for (const TraceEvent& ev : sched.trace) {
        report.total_macs += ev.macs;
        report.total_data_elements += ev.data_elements;
    }
    report.total_flops = report.total_macs;
    report.queues = queue_residency_report(sched);
    report.device_utilization = report.queues.device_utilization;
    report.timeline = std::move(sched.trace);
    return report;
}

double memory_model(const Task& task, PrimitiveKind primitive, const HardwareConfig& cfg,
                    MemoryPolicy policy) {
    if (policy == MemoryPolicy::ComputeOnly) return 0.0;
    const count_t bytes = 4 * task_data_elements(task, primitive);
    return static_cast<double>(bytes) / cfg.ddr_bandwidth;
}

ScheduleOptions pl_only(ScheduleOptions opts) {
    opts.force = ForceDevice::PlOnly;
    return opts;
}

ScheduleOptions aie_only(ScheduleOptions opts) {
    opts.force = ForceDevice::AieOnly;
    return opts;
}

}  // namespace gnnsim
