#pragma once

#include <vector>

#include "gnnsim/gnn.hpp"
#include "gnnsim/matrices.hpp"
#include "gnnsim/perf_model.hpp"

namespace gnnsim {

enum class QueueKind { Stq, Dtq };
enum class TaskState { Pending, Ready, Running, Done };

/// Whether estimates see feature-matrix sparsity. AmOnly treats every
/// non-adjacency operand as fully dense (adjacency-only sparsity);
/// AmFm uses measured strip densities everywhere.
enum class SparsityMode { AmFm, AmOnly };

enum class ForceDevice { None, PlOnly, AieOnly };
enum class MemoryPolicy { Overlap, Serial, ComputeOnly };

struct AnalyzerOptions {
    SparsityMode sparsity_mode = SparsityMode::AmFm;
    bool inverted_routing = false;   // flip the rule: STQ when t_ALU > t_AIE
    bool layer_barrier = false;  // kernel-level barriers instead of block deps
    // Estimate AIE time at one CC's rate instead of the whole array's. Pair
    // this with ScheduleOptions::per_cc_scheduling, where a task occupies a
    // single CC; routing then stays stable as the CC count scales.
    bool per_cc_estimates = false;
};

/// One lowered matmul together with its partitioned operands.
/// producer_of_{x,y} is the index of the kernel whose output this operand
/// reads, or -1 for graph inputs (adjacency, input features, weights).
struct KernelWorkload {
    KernelRole role;
    index_t layer;
    PartitionGrid x;
    PartitionGrid y;
    int producer_of_x = -1;
    int producer_of_y = -1;
};

/// One output-block computation Z_ij = X_{i,:} * Y_{:,j}.
struct Task {
    int id;
    index_t kernel;
    index_t bi, bj;
    count_t m, n, d;
    double alpha_x, alpha_y;
    count_t nnz_x, nnz_y;        // strip nonzero counts (actual, not mode-adjusted)
    TaskEstimate estimate;
    QueueKind queue;
    std::vector<int> deps;
};

struct TaskGraph {
    std::vector<Task> tasks;
    count_t elided_zero_tasks = 0;
    count_t total_output_blocks = 0;
};

/// Decomposes each kernel into per-output-block tasks (skipping zero strips),
/// attaches device estimates and the queue destination, and wires block-level
/// dependencies between producing and consuming kernels.
TaskGraph analyze(const std::vector<KernelWorkload>& kernels, const HardwareConfig& cfg,
                  const AnalyzerOptions& opts = {});

/// MAC count the chosen primitive actually performs on this task
/// (GEMM ignores sparsity; SpMM uses the expected pair count).
count_t task_effective_macs(const Task& task, PrimitiveKind primitive);

/// Values moved (loads + stores) by the chosen primitive on this task.
count_t task_data_elements(const Task& task, PrimitiveKind primitive);

struct DeviceId {
    enum class Kind { Alu, Aie };
    Kind kind;
    int index;
};

struct TraceEvent {
    int task_id;
    index_t kernel;
    index_t bi, bj;
    DeviceId device;
    PrimitiveKind primitive;
    QueueKind queue;
    count_t start_cycle, end_cycle;  // device clock domain
    double ready_s, start_s, end_s;  // common virtual time base
    count_t macs;                    // effective MACs of the executed primitive
    count_t data_elements;           // values moved by the memory model
};

struct DeviceStats {
    DeviceId device;
    double busy_s = 0.0;
    count_t busy_cycles = 0;
    count_t tasks_run = 0;
    count_t mode_switches = 0;
};

struct ScheduleOptions {
    bool per_cc_scheduling = false;  // split the AIE into per-CC resources
    bool work_stealing = false;
    ForceDevice force = ForceDevice::None;
    MemoryPolicy memory = MemoryPolicy::ComputeOnly;
};

struct ScheduleResult {
    std::vector<TraceEvent> trace;   // completion order
    double makespan_s = 0.0;
    std::vector<DeviceStats> devices;
};

/// Deterministic event-driven dispatch: idle ALU arrays pop the STQ, the AIE
/// resource(s) pop the DTQ; tasks enter their queue when all deps are done.
/// Raises on cyclic dependencies.
ScheduleResult schedule(const TaskGraph& graph, const HardwareConfig& cfg,
                        const ScheduleOptions& opts = {});

struct QueueStats {
    count_t tasks = 0;
    double total_wait_s = 0.0;
    double max_wait_s = 0.0;
    count_t max_length = 0;
};

struct QueueReport {
    QueueStats stq;
    QueueStats dtq;
    std::vector<double> device_utilization;  // indexed like ScheduleResult::devices
};

/// Wait times, peak queue lengths and per-device utilization, recomputed
/// from the trace alone.
QueueReport queue_residency_report(const ScheduleResult& result);

}  // namespace gnnsim
