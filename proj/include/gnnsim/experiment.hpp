#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnnsim/gnn.hpp"
#include "gnnsim/ingest.hpp"
#include "gnnsim/runtime.hpp"
#include "gnnsim/simulator.hpp"

namespace gnnsim {

/// Configuration problems carry the offending field path.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_path(field) {}
    std::string field_path;
};

struct DatasetConfig {
    std::string name = "synthetic";
    // File-backed datasets; empty paths select the synthetic generator.
    std::string adjacency_path;
    std::string adjacency_format = "auto";  // "edgelist" | "matrixmarket" | "auto"
    std::string features_path;
    index_t num_classes = 2;
    // Synthetic parameters.
    std::string graph_kind = "er";  // "er" | "powerlaw"
    index_t n = 0;
    double density = 0.0;
    index_t edges_per_vertex = 4;
    index_t feature_dim = 0;
    double feature_density = 1.0;
};

struct ModelConfig {
    std::string kind = "gcn";
    std::vector<index_t> hidden = {16};  // output dim is dataset num_classes
    int sgc_hops = 2;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    ModelConfig model;
    std::string hardware_preset = "vck5000";
    HardwareConfig hardware_overrides;  // applied when fields differ from preset
    bool has_overrides = false;
    index_t n1 = 512;  // adjacency block dim
    index_t n2 = 128;  // feature/weight block width
    SparsityMode sparsity_mode = SparsityMode::AmFm;
    bool inverted_routing = false;
    bool layer_barrier = false;
    bool per_cc_scheduling = false;
    bool work_stealing = false;
    MemoryPolicy memory_policy = MemoryPolicy::ComputeOnly;
    std::uint64_t seed = 1;
    std::string output_dir;

    void validate() const;  // throws ConfigError
};

std::string to_string(SparsityMode m);
std::string to_string(MemoryPolicy p);
SparsityMode sparsity_mode_from_string(const std::string& s);
MemoryPolicy memory_policy_from_string(const std::string& s);

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig config_from_json_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

HardwareConfig resolve_hardware(const ExperimentConfig& cfg);
DatasetBundle load_dataset(const DatasetConfig& cfg, std::uint64_t seed);

/// Partitions every kernel's realized operands (adjacency N1xN1, everything
/// else N1xN2) and wires producer links from intermediate slots.
std::vector<KernelWorkload> build_workloads(const LoweredModel& lowered,
                                            const Matrix& h0, const ForwardResult& fwd,
                                            index_t n1, index_t n2);

struct KernelFlops {
    index_t kernel;
    KernelRole role;
    count_t macs_adjacency_only;   // features treated dense
    count_t macs_full_sparsity;    // measured intermediate densities
    count_t data_adjacency_only;
    count_t data_full_sparsity;
};

struct FlopsReport {
    std::vector<KernelFlops> kernels;
    count_t total_macs_adjacency_only = 0;
    count_t total_macs_full_sparsity = 0;
    count_t total_data_adjacency_only = 0;
    count_t total_data_full_sparsity = 0;
    double flops_reduction_factor = 0.0;  // adjacency-only / full-sparsity
    double data_reduction_factor = 0.0;
};

/// Exact MAC / element counts per kernel under the two sparsity scenarios.
FlopsReport count_flops(const LoweredModel& lowered, const Matrix& h0,
                        const ForwardResult& fwd);

struct RunResult {
    ExperimentConfig config;
    std::string dataset_name;
    index_t num_vertices = 0;
    DensityInfo adjacency_density;
    DensityInfo feature_density;
    count_t num_tasks = 0;
    count_t elided_zero_tasks = 0;
    count_t total_output_blocks = 0;
    double preprocessing_s = 0.0;
    double analysis_s = 0.0;  // analyzer wall clock
    SimReport report;
    FlopsReport flops;
};

RunResult run_experiment(const ExperimentConfig& cfg);

/// summary.json, counters.csv and trace.csv under cfg.output_dir (if set).
void write_reports(const RunResult& result);

std::string trace_csv(const std::vector<TraceEvent>& timeline);
std::string counters_csv(const RunResult& result);
std::string summary_json(const RunResult& result);

struct CompareResult {
    RunResult heterogeneous;
    SimReport pl_only;
    SimReport aie_only;
    double speedup_vs_pl = 0.0;   // pl makespan / heterogeneous makespan
    double speedup_vs_aie = 0.0;
};

CompareResult compare_experiment(const ExperimentConfig& cfg);
std::string compare_csv(const CompareResult& result);

}  // namespace gnnsim
