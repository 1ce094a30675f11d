#include "gnnsim/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gnnsim {

using nlohmann::json;

std::string to_string(SparsityMode m) {
    return m == SparsityMode::AmFm ? "am-fm" : "am-only";
}

std::string to_string(MemoryPolicy p) {
    switch (p) {
        case MemoryPolicy::Overlap: return "overlap";
        case MemoryPolicy::Serial: return "serial";
        case MemoryPolicy::ComputeOnly: return "compute-only";
    }
    return "compute-only";
}

SparsityMode sparsity_mode_from_string(const std::string& s) {
    if (s == "am-fm" || s == "amfm") return SparsityMode::AmFm;
    if (s == "am-only" || s == "am") return SparsityMode::AmOnly;
    throw ConfigError("sparsity_mode", "expected am-fm or am-only, got '" + s + "'");
}

MemoryPolicy memory_policy_from_string(const std::string& s) {
    if (s == "overlap") return MemoryPolicy::Overlap;
    if (s == "serial") return MemoryPolicy::Serial;
    if (s == "compute-only" || s == "compute_only") return MemoryPolicy::ComputeOnly;
    throw ConfigError("memory_policy", "expected overlap, serial or compute-only, got '" +
                                           s + "'");
}

void ExperimentConfig::validate() const {
    if (dataset.adjacency_path.empty()) {
        if (dataset.n <= 0) throw ConfigError("dataset.n", "synthetic graphs need n > 0");
        if (dataset.feature_dim <= 0)
            throw ConfigError("dataset.feature_dim", "synthetic features need a dimension");
        if (dataset.density < 0.0 || dataset.density > 1.0)
            throw ConfigError("dataset.density", "must be in [0,1]");
        if (dataset.feature_density < 0.0 || dataset.feature_density > 1.0)
            throw ConfigError("dataset.feature_density", "must be in [0,1]");
        graph_kind_from_string(dataset.graph_kind);  // validates
    }
    if (dataset.num_classes <= 0) throw ConfigError("dataset.num_classes", "must be > 0");
    model_kind_from_string(model.kind);  // validates
    if (model.kind == "sgc" && model.sgc_hops <= 0)
        throw ConfigError("model.sgc_hops", "must be > 0");
    for (index_t h : model.hidden)
        if (h <= 0) throw ConfigError("model.hidden", "dims must be > 0");
    if (n1 <= 0) throw ConfigError("n1", "block dim must be > 0");
    if (n2 <= 0) throw ConfigError("n2", "block dim must be > 0");
    try {
        resolve_hardware(*this).validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("hardware", e.what());
    }
}

HardwareConfig resolve_hardware(const ExperimentConfig& cfg) {
    if (cfg.has_overrides) return cfg.hardware_overrides;
    return HardwareConfig::preset(cfg.hardware_preset);
}

namespace {

json hardware_to_json(const HardwareConfig& hw) {
    return json{{"num_alu_arrays", hw.num_alu_arrays},
                {"p", hw.p},
                {"q", hw.q},
                {"num_aie_ccs", hw.num_aie_ccs},
                {"tiles_per_cc", hw.tiles_per_cc},
                {"beta", hw.beta},
                {"f_pl", hw.f_pl},
                {"f_aie", hw.f_aie},
                {"ddr_bandwidth", hw.ddr_bandwidth},
                {"mode_switch_cycles", hw.mode_switch_cycles}};
}

void hardware_from_json(const json& j, HardwareConfig& hw) {
    hw.num_alu_arrays = j.value("num_alu_arrays", hw.num_alu_arrays);
    hw.p = j.value("p", hw.p);
    hw.q = j.value("q", hw.q);
    hw.num_aie_ccs = j.value("num_aie_ccs", hw.num_aie_ccs);
    hw.tiles_per_cc = j.value("tiles_per_cc", hw.tiles_per_cc);
    hw.beta = j.value("beta", hw.beta);
    hw.f_pl = j.value("f_pl", hw.f_pl);
    hw.f_aie = j.value("f_aie", hw.f_aie);
    hw.ddr_bandwidth = j.value("ddr_bandwidth", hw.ddr_bandwidth);
    hw.mode_switch_cycles = j.value("mode_switch_cycles", hw.mode_switch_cycles);
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("(root)", e.what());
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("dataset")) {
            const json& d = j["dataset"];
            cfg.dataset.name = d.value("name", cfg.dataset.name);
            cfg.dataset.adjacency_path = d.value("adjacency_path", "");
            cfg.dataset.adjacency_format = d.value("adjacency_format", "auto");
            cfg.dataset.features_path = d.value("features_path", "");
            cfg.dataset.num_classes = d.value("num_classes", cfg.dataset.num_classes);
            cfg.dataset.graph_kind = d.value("graph_kind", cfg.dataset.graph_kind);
            cfg.dataset.n = d.value("n", cfg.dataset.n);
            cfg.dataset.density = d.value("density", cfg.dataset.density);
            cfg.dataset.edges_per_vertex =
                d.value("edges_per_vertex", cfg.dataset.edges_per_vertex);
            cfg.dataset.feature_dim = d.value("feature_dim", cfg.dataset.feature_dim);
            cfg.dataset.feature_density =
                d.value("feature_density", cfg.dataset.feature_density);
        }
        if (j.contains("model")) {
            const json& m = j["model"];
            cfg.model.kind = m.value("kind", cfg.model.kind);
            if (m.contains("hidden"))
                cfg.model.hidden = m["hidden"].get<std::vector<index_t>>();
            cfg.model.sgc_hops = m.value("sgc_hops", cfg.model.sgc_hops);
        }
        cfg.hardware_preset = j.value("hardware_preset", cfg.hardware_preset);
        cfg.hardware_overrides = HardwareConfig::preset(cfg.hardware_preset);
        if (j.contains("hardware")) {
            hardware_from_json(j["hardware"], cfg.hardware_overrides);
            cfg.has_overrides = true;
        }
        cfg.n1 = j.value("n1", cfg.n1);
        cfg.n2 = j.value("n2", cfg.n2);
        cfg.sparsity_mode =
            sparsity_mode_from_string(j.value("sparsity_mode", to_string(cfg.sparsity_mode)));
        cfg.inverted_routing = j.value("inverted_routing", cfg.inverted_routing);
        cfg.layer_barrier = j.value("layer_barrier", cfg.layer_barrier);
        cfg.per_cc_scheduling = j.value("per_cc_scheduling", cfg.per_cc_scheduling);
        cfg.work_stealing = j.value("work_stealing", cfg.work_stealing);
        cfg.memory_policy =
            memory_policy_from_string(j.value("memory_policy", to_string(cfg.memory_policy)));
        cfg.seed = j.value("seed", cfg.seed);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError("(config)", e.what());
    }
    return cfg;
}

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("(file)", "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["dataset"] = {{"name", cfg.dataset.name},
                    {"adjacency_path", cfg.dataset.adjacency_path},
                    {"adjacency_format", cfg.dataset.adjacency_format},
                    {"features_path", cfg.dataset.features_path},
                    {"num_classes", cfg.dataset.num_classes},
                    {"graph_kind", cfg.dataset.graph_kind},
                    {"n", cfg.dataset.n},
                    {"density", cfg.dataset.density},
                    {"edges_per_vertex", cfg.dataset.edges_per_vertex},
                    {"feature_dim", cfg.dataset.feature_dim},
                    {"feature_density", cfg.dataset.feature_density}};
    j["model"] = {{"kind", cfg.model.kind},
                  {"hidden", cfg.model.hidden},
                  {"sgc_hops", cfg.model.sgc_hops}};
    j["hardware_preset"] = cfg.hardware_preset;
    j["hardware"] = hardware_to_json(resolve_hardware(cfg));
    j["n1"] = cfg.n1;
    j["n2"] = cfg.n2;
    j["sparsity_mode"] = to_string(cfg.sparsity_mode);
    j["inverted_routing"] = cfg.inverted_routing;
    j["layer_barrier"] = cfg.layer_barrier;
    j["per_cc_scheduling"] = cfg.per_cc_scheduling;
    j["work_stealing"] = cfg.work_stealing;
    j["memory_policy"] = to_string(cfg.memory_policy);
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

DatasetBundle load_dataset(const DatasetConfig& cfg, std::uint64_t seed) {
    if (cfg.adjacency_path.empty()) {
        SynthDatasetParams p;
        p.name = cfg.name;
        p.graph_kind = graph_kind_from_string(cfg.graph_kind);
        p.graph.n = cfg.n;
        p.graph.density = cfg.density;
        p.graph.edges_per_vertex = cfg.edges_per_vertex;
        p.feature_dim = cfg.feature_dim;
        p.feature_density = cfg.feature_density;
        p.num_classes = cfg.num_classes;
        return make_synthetic(p, seed);
    }
    std::string fmt = cfg.adjacency_format;
    if (fmt == "auto")
        fmt = cfg.adjacency_path.ends_with(".mtx") ? "matrixmarket" : "edgelist";
    SparseMatrix a = fmt == "matrixmarket" ? load_matrix_market(cfg.adjacency_path)
                                           : load_edge_list(cfg.adjacency_path);
    Matrix h = cfg.features_path.empty()
                   ? synth_features(a.rows(), cfg.feature_dim, cfg.feature_density,
                                    seed + 1)
                   : load_features(cfg.features_path);
    return make_bundle(cfg.name, std::move(a), std::move(h), cfg.num_classes);
}

namespace {

Matrix operand_matrix(const LoweredModel& lowered, const Matrix& h0,
                      const ForwardResult& fwd, const OperandRef& ref) {
    switch (ref.kind) {
        case OperandRef::Kind::Adjacency: return Matrix(lowered.normalized_adjacency);
        case OperandRef::Kind::InputFeatures: return h0;
        case OperandRef::Kind::Weight: return Matrix(lowered.weights[ref.index]);
        case OperandRef::Kind::Intermediate: return Matrix(fwd.slots[ref.index]);
    }
    throw std::logic_error("unreachable operand kind");
}

}  // namespace

std::vector<KernelWorkload> build_workloads(const LoweredModel& lowered,
                                            const Matrix& h0, const ForwardResult& fwd,
                                            index_t n1, index_t n2) {
    // out_slot -> producing kernel index
    std::vector<int> producer(static_cast<std::size_t>(lowered.num_slots), -1);
    for (std::size_t k = 0; k < lowered.kernels.size(); ++k)
        producer[lowered.kernels[k].out_slot] = static_cast<int>(k);

    std::vector<KernelWorkload> out;
    out.reserve(lowered.kernels.size());
    for (const KernelInstance& ki : lowered.kernels) {
        Matrix x = operand_matrix(lowered, h0, fwd, ki.left);
        Matrix y = operand_matrix(lowered, h0, fwd, ki.right);
        const bool x_is_adjacency = ki.left.kind == OperandRef::Kind::Adjacency;
        KernelWorkload kw{ki.role,
                          ki.layer,
                          partition(x, n1, x_is_adjacency ? n1 : n2),
                          partition(y, n1, n2),
                          -1,
                          -1};
        if (ki.left.kind == OperandRef::Kind::Intermediate)
            kw.producer_of_x = producer[ki.left.index];
        if (ki.right.kind == OperandRef::Kind::Intermediate)
            kw.producer_of_y = producer[ki.right.index];
        out.push_back(std::move(kw));
    }
    return out;
}

FlopsReport count_flops(const LoweredModel& lowered, const Matrix& h0,
                        const ForwardResult& fwd) {
    FlopsReport report;
    for (std::size_t k = 0; k < lowered.kernels.size(); ++k) {
        const KernelInstance& ki = lowered.kernels[k];
        Matrix x = operand_matrix(lowered, h0, fwd, ki.left);
        Matrix y = operand_matrix(lowered, h0, fwd, ki.right);
        const count_t m = rows(x), n = cols(x), d = cols(y);
        const count_t nnz_x = density(x).nnz;

        KernelFlops kf{};
        kf.kernel = static_cast<index_t>(k);
        kf.role = ki.role;
        if (ki.role == KernelRole::FeatureAggregation) {
            // adjacency sparsity always counts: SpDMM against a dense operand
            kf.macs_adjacency_only = nnz_x * d;
            kf.data_adjacency_only = nnz_x + nnz_x * d + m * d;
            // both sparse: exact SpMM pair count over the realized operand
            std::vector<count_t> row_nnz(static_cast<std::size_t>(n), 0);
            if (const auto* sy = std::get_if<SparseMatrix>(&y)) {
                for (const Entry& e : sy->entries()) ++row_nnz[e.row];
            } else {
                const auto& dy = std::get<DenseMatrix>(y);
                for (index_t r = 0; r < dy.rows(); ++r)
                    for (index_t c = 0; c < dy.cols(); ++c)
                        if (dy(r, c) != 0.0f) ++row_nnz[r];
            }
            count_t pairs = 0;
            const auto& sx = std::get<SparseMatrix>(x);
            for (const Entry& e : sx.entries()) pairs += row_nnz[e.col];
            kf.macs_full_sparsity = pairs;
            kf.data_full_sparsity = nnz_x + pairs + std::min(m * d, pairs);
        } else {
            // transform treated dense under adjacency-only sparsity
            kf.macs_adjacency_only = m * n * d;
            kf.data_adjacency_only = m * n + n * d + m * d;
            // both sparse: SpDMM over the measured-left-operand nonzeros
            kf.macs_full_sparsity = nnz_x * d;
            kf.data_full_sparsity = nnz_x + nnz_x * d + m * d;
        }
        report.total_macs_adjacency_only += kf.macs_adjacency_only;
        report.total_macs_full_sparsity += kf.macs_full_sparsity;
        report.total_data_adjacency_only += kf.data_adjacency_only;
        report.total_data_full_sparsity += kf.data_full_sparsity;
        report.kernels.push_back(kf);
    }
    if (report.total_macs_full_sparsity > 0)
        report.flops_reduction_factor =
            static_cast<double>(report.total_macs_adjacency_only) /
            static_cast<double>(report.total_macs_full_sparsity);
    if (report.total_data_full_sparsity > 0)
        report.data_reduction_factor =
            static_cast<double>(report.total_data_adjacency_only) /
            static_cast<double>(report.total_data_full_sparsity);
    return report;
}

namespace {

struct Prepared {
    DatasetBundle bundle;
    LoweredModel lowered;
    ForwardResult fwd;
    std::vector<KernelWorkload> kernels;
    TaskGraph graph;
    HardwareConfig hw;
    ScheduleOptions sched;
    double preprocessing_s = 0.0;
    double analysis_s = 0.0;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Prepared prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    DatasetBundle bundle = load_dataset(cfg.dataset, cfg.seed);

    std::vector<index_t> dims;
    dims.push_back(cols(bundle.features));
    for (index_t h : cfg.model.hidden) dims.push_back(h);
    dims.push_back(bundle.num_classes);
    ModelSpec model = make_model(model_kind_from_string(cfg.model.kind), dims, cfg.seed,
                                 cfg.model.sgc_hops);

    LoweredModel lowered = lower_model(model, bundle.adjacency, cols(bundle.features));
    ForwardResult fwd = forward(lowered, bundle.features);

    auto t0 = std::chrono::steady_clock::now();
    std::vector<KernelWorkload> kernels =
        build_workloads(lowered, bundle.features, fwd, cfg.n1, cfg.n2);
    const double preprocessing_s = seconds_since(t0);

    AnalyzerOptions aopts{cfg.sparsity_mode, cfg.inverted_routing, cfg.layer_barrier,
                          cfg.per_cc_scheduling};
    HardwareConfig hw = resolve_hardware(cfg);
    t0 = std::chrono::steady_clock::now();
    TaskGraph graph = analyze(kernels, hw, aopts);
    const double analysis_s = seconds_since(t0);

    ScheduleOptions sopts;
    sopts.per_cc_scheduling = cfg.per_cc_scheduling;
    sopts.work_stealing = cfg.work_stealing;
    sopts.memory = cfg.memory_policy;

    return Prepared{std::move(bundle), std::move(lowered), std::move(fwd),
                    std::move(kernels), std::move(graph), hw, sopts,
                    preprocessing_s, analysis_s};
}

RunResult run_prepared(const ExperimentConfig& cfg, Prepared& prep) {
    RunResult result;
    result.config = cfg;
    result.dataset_name = prep.bundle.name;
    result.num_vertices = prep.bundle.adjacency.rows();
    result.adjacency_density = prep.bundle.adjacency_density;
    result.feature_density = prep.bundle.feature_density;
    result.num_tasks = static_cast<count_t>(prep.graph.tasks.size());
    result.elided_zero_tasks = prep.graph.elided_zero_tasks;
    result.total_output_blocks = prep.graph.total_output_blocks;
    result.preprocessing_s = prep.preprocessing_s;
    result.analysis_s = prep.analysis_s;
    result.report = simulate(prep.graph, prep.hw, prep.sched);
    result.flops = count_flops(prep.lowered, prep.bundle.features, prep.fwd);
    return result;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    Prepared prep = prepare(cfg);
    return run_prepared(cfg, prep);
}

CompareResult compare_experiment(const ExperimentConfig& cfg) {
    Prepared prep = prepare(cfg);
    CompareResult result;
    result.heterogeneous = run_prepared(cfg, prep);
    result.pl_only = simulate(prep.graph, prep.hw, pl_only(prep.sched));
    result.aie_only = simulate(prep.graph, prep.hw, aie_only(prep.sched));
    const double het = result.heterogeneous.report.makespan_s;
    if (het > 0) {
        result.speedup_vs_pl = result.pl_only.makespan_s / het;
        result.speedup_vs_aie = result.aie_only.makespan_s / het;
    }
    return result;
}

namespace {

std::string device_name(const DeviceId& d) {
    return (d.kind == DeviceId::Kind::Alu ? "alu" : "aie") + std::to_string(d.index);
}

}  // namespace

std::string trace_csv(const std::vector<TraceEvent>& timeline) {
    std::ostringstream out;
    out << "task-id,kernel,block-i,block-j,device,primitive,start-cycle,end-cycle\n";
    for (const TraceEvent& ev : timeline)
        out << ev.task_id << ',' << ev.kernel << ',' << ev.bi << ',' << ev.bj << ','
            << device_name(ev.device) << ',' << to_string(ev.primitive) << ','
            << ev.start_cycle << ',' << ev.end_cycle << '\n';
    return out.str();
}

std::string counters_csv(const RunResult& result) {
    std::ostringstream out;
    out << "dataset,model,kernel,role,macs_sp_am,macs_sp_am_fm,flops_reduction_factor,"
           "data_sp_am,data_sp_am_fm,data_reduction_factor\n";
    auto ratio = [](count_t a, count_t b) {
        return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
    };
    for (const KernelFlops& kf : result.flops.kernels)
        out << result.dataset_name << ',' << result.config.model.kind << ',' << kf.kernel
            << ','
            << (kf.role == KernelRole::FeatureTransform ? "transform" : "aggregation")
            << ',' << kf.macs_adjacency_only << ',' << kf.macs_full_sparsity << ','
            << ratio(kf.macs_adjacency_only, kf.macs_full_sparsity) << ','
            << kf.data_adjacency_only << ',' << kf.data_full_sparsity << ','
            << ratio(kf.data_adjacency_only, kf.data_full_sparsity) << '\n';
    out << result.dataset_name << ',' << result.config.model.kind << ",total,,"
        << result.flops.total_macs_adjacency_only << ','
        << result.flops.total_macs_full_sparsity << ','
        << result.flops.flops_reduction_factor << ','
        << result.flops.total_data_adjacency_only << ','
        << result.flops.total_data_full_sparsity << ','
        << result.flops.data_reduction_factor << '\n';
    return out.str();
}

std::string summary_json(const RunResult& result) {
    json j;
    j["config"] = json::parse(config_to_json(result.config));
    j["dataset"] = {{"name", result.dataset_name},
                    {"vertices", result.num_vertices},
                    {"adjacency_nnz", result.adjacency_density.nnz},
                    {"adjacency_density", result.adjacency_density.density},
                    {"feature_nnz", result.feature_density.nnz},
                    {"feature_density", result.feature_density.density}};
    j["tasks"] = {{"scheduled", result.num_tasks},
                  {"elided_zero_blocks", result.elided_zero_tasks},
                  {"total_output_blocks", result.total_output_blocks}};
    j["timing"] = {{"preprocessing_s", result.preprocessing_s},
                   {"analysis_s", result.analysis_s},
                   {"makespan_s", result.report.makespan_s}};
    json devices = json::array();
    for (std::size_t i = 0; i < result.report.devices.size(); ++i) {
        const DeviceStats& d = result.report.devices[i];
        devices.push_back({{"device", device_name(d.device)},
                           {"busy_s", d.busy_s},
                           {"busy_cycles", d.busy_cycles},
                           {"tasks", d.tasks_run},
                           {"mode_switches", d.mode_switches},
                           {"utilization", result.report.device_utilization[i]}});
    }
    j["devices"] = devices;
    j["totals"] = {{"macs", result.report.total_macs},
                   {"flops", result.report.total_flops},
                   {"data_elements", result.report.total_data_elements}};
    j["queues"] = {{"stq",
                    {{"tasks", result.report.queues.stq.tasks},
                     {"total_wait_s", result.report.queues.stq.total_wait_s},
                     {"max_wait_s", result.report.queues.stq.max_wait_s},
                     {"max_length", result.report.queues.stq.max_length}}},
                   {"dtq",
                    {{"tasks", result.report.queues.dtq.tasks},
                     {"total_wait_s", result.report.queues.dtq.total_wait_s},
                     {"max_wait_s", result.report.queues.dtq.max_wait_s},
                     {"max_length", result.report.queues.dtq.max_length}}}};
    j["flops_report"] = {{"macs_sp_am", result.flops.total_macs_adjacency_only},
                         {"macs_sp_am_fm", result.flops.total_macs_full_sparsity},
                         {"flops_reduction_factor", result.flops.flops_reduction_factor},
                         {"data_sp_am", result.flops.total_data_adjacency_only},
                         {"data_sp_am_fm", result.flops.total_data_full_sparsity},
                         {"data_reduction_factor", result.flops.data_reduction_factor}};
    return j.dump(2);
}

void write_reports(const RunResult& result) {
    if (result.config.output_dir.empty()) return;
    namespace fs = std::filesystem;
    fs::create_directories(result.config.output_dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(result.config.output_dir) / name);
        if (!out) throw std::runtime_error("cannot write report file " + name);
        out << text;
    };
    write("summary.json", summary_json(result));
    write("counters.csv", counters_csv(result));
    write("trace.csv", trace_csv(result.report.timeline));
}

std::string compare_csv(const CompareResult& result) {
    std::ostringstream out;
    out << "variant,makespan_s,speedup_vs_heterogeneous\n";
    const double het = result.heterogeneous.report.makespan_s;
    out << "heterogeneous," << het << ",1\n";
    out << "pl-only," << result.pl_only.makespan_s << ',' << result.speedup_vs_pl << '\n';
    out << "aie-only," << result.aie_only.makespan_s << ',' << result.speedup_vs_aie
        << '\n';
    return out.str();
}

}  // namespace gnnsim
