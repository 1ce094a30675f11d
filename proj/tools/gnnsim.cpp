#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gnnsim/experiment.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitSimError = 4;

struct CommonFlags {
    std::string config_path;
    // dataset
    std::string dataset_name;
    std::string adjacency_path, adjacency_format, features_path;
    std::int64_t num_classes = -1;
    std::string graph_kind;
    std::int64_t n = -1;
    double density = -1.0;
    std::int64_t edges_per_vertex = -1;
    std::int64_t feature_dim = -1;
    double feature_density = -1.0;
    // model
    std::string model_kind;
    std::vector<std::int64_t> hidden;
    int sgc_hops = -1;
    // hardware / scheduling
    std::string preset;
    std::int64_t num_aie_ccs = -1;
    std::int64_t num_alu_arrays = -1;
    std::int64_t n1 = -1, n2 = -1;
    std::string sparsity_mode, memory_policy;
    bool inverted_routing = false, layer_barrier = false;
    bool per_cc = false, work_stealing = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output_dir;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON experiment config file");
    cmd->add_option("--dataset-name", f.dataset_name);
    cmd->add_option("--adjacency", f.adjacency_path, "edge list or MatrixMarket file");
    cmd->add_option("--adjacency-format", f.adjacency_format,
                    "edgelist | matrixmarket | auto");
    cmd->add_option("--features", f.features_path, "CSV or MatrixMarket feature file");
    cmd->add_option("--num-classes", f.num_classes);
    cmd->add_option("--graph-kind", f.graph_kind, "er | powerlaw (synthetic)");
    cmd->add_option("--n", f.n, "synthetic vertex count");
    cmd->add_option("--density", f.density, "synthetic adjacency density");
    cmd->add_option("--edges-per-vertex", f.edges_per_vertex, "powerlaw attachments");
    cmd->add_option("--feature-dim", f.feature_dim);
    cmd->add_option("--feature-density", f.feature_density);
    cmd->add_option("--model", f.model_kind, "gcn | graphsage | gin | sgc");
    cmd->add_option("--hidden", f.hidden, "hidden dims");
    cmd->add_option("--sgc-hops", f.sgc_hops);
    cmd->add_option("--preset", f.preset, "vck5000 | vck5000-scaled");
    cmd->add_option("--num-aie-ccs", f.num_aie_ccs);
    cmd->add_option("--num-alu-arrays", f.num_alu_arrays);
    cmd->add_option("--n1", f.n1, "adjacency block dim");
    cmd->add_option("--n2", f.n2, "feature/weight block width");
    cmd->add_option("--sparsity-mode", f.sparsity_mode, "am-fm | am-only");
    cmd->add_flag("--inverted-routing", f.inverted_routing);
    cmd->add_flag("--layer-barrier", f.layer_barrier);
    cmd->add_flag("--per-cc-scheduling", f.per_cc);
    cmd->add_flag("--work-stealing", f.work_stealing);
    cmd->add_option("--memory-policy", f.memory_policy, "overlap | serial | compute-only");
    cmd->add_option("--seed", f.seed)->each([&](const std::string&) { f.seed_set = true; });
    cmd->add_option("--output-dir", f.output_dir);
}

gnnsim::ExperimentConfig build_config(const CommonFlags& f) {
    gnnsim::ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = gnnsim::config_from_json_file(f.config_path);
    auto& d = cfg.dataset;
    if (!f.dataset_name.empty()) d.name = f.dataset_name;
    if (!f.adjacency_path.empty()) d.adjacency_path = f.adjacency_path;
    if (!f.adjacency_format.empty()) d.adjacency_format = f.adjacency_format;
    if (!f.features_path.empty()) d.features_path = f.features_path;
    if (f.num_classes >= 0) d.num_classes = f.num_classes;
    if (!f.graph_kind.empty()) d.graph_kind = f.graph_kind;
    if (f.n >= 0) d.n = f.n;
    if (f.density >= 0) d.density = f.density;
    if (f.edges_per_vertex >= 0) d.edges_per_vertex = f.edges_per_vertex;
    if (f.feature_dim >= 0) d.feature_dim = f.feature_dim;
    if (f.feature_density >= 0) d.feature_density = f.feature_density;
    if (!f.model_kind.empty()) cfg.model.kind = f.model_kind;
    if (!f.hidden.empty()) cfg.model.hidden.assign(f.hidden.begin(), f.hidden.end());
    if (f.sgc_hops >= 0) cfg.model.sgc_hops = f.sgc_hops;
    if (!f.preset.empty()) {
        cfg.hardware_preset = f.preset;
        cfg.has_overrides = false;
        cfg.hardware_overrides = gnnsim::HardwareConfig::preset(f.preset);
    }
    if (f.num_aie_ccs >= 0) {
        cfg.hardware_overrides = gnnsim::resolve_hardware(cfg);
        cfg.hardware_overrides.num_aie_ccs = static_cast<int>(f.num_aie_ccs);
        cfg.has_overrides = true;
    }
    if (f.num_alu_arrays >= 0) {
        cfg.hardware_overrides = gnnsim::resolve_hardware(cfg);
        cfg.hardware_overrides.num_alu_arrays = static_cast<int>(f.num_alu_arrays);
        cfg.has_overrides = true;
    }
    if (f.n1 >= 0) cfg.n1 = f.n1;
    if (f.n2 >= 0) cfg.n2 = f.n2;
    if (!f.sparsity_mode.empty())
        cfg.sparsity_mode = gnnsim::sparsity_mode_from_string(f.sparsity_mode);
    if (f.inverted_routing) cfg.inverted_routing = true;
    if (f.layer_barrier) cfg.layer_barrier = true;
    if (f.per_cc) cfg.per_cc_scheduling = true;
    if (f.work_stealing) cfg.work_stealing = true;
    if (!f.memory_policy.empty())
        cfg.memory_policy = gnnsim::memory_policy_from_string(f.memory_policy);
    if (f.seed_set) cfg.seed = f.seed;
    if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparsity-adaptive GNN inference on a simulated PL+AIE accelerator"};
    app.require_subcommand(1);

    CommonFlags rf, cf, ff, vf;
    CLI::App* run = app.add_subcommand("run", "Run one experiment and write reports");
    add_common_flags(run, rf);
    CLI::App* cmp = app.add_subcommand(
        "compare", "Run heterogeneous vs pl-only vs aie-only on the same task graph");
    add_common_flags(cmp, cf);
    CLI::App* flops = app.add_subcommand(
        "flops-report", "Per-kernel MAC/data counts under both sparsity scenarios");
    add_common_flags(flops, ff);
    CLI::App* valid =
        app.add_subcommand("validate-config", "Parse and validate a config, then exit");
    add_common_flags(valid, vf);

    CLI::App* synth = app.add_subcommand("synth", "Generate dataset files");
    std::string synth_kind = "er", adj_out, feat_out;
    std::int64_t synth_n = 1024, synth_epv = 4, synth_f = 128;
    double synth_density = 0.01, synth_fdensity = 1.0;
    std::uint64_t synth_seed = 1;
    synth->add_option("--graph-kind", synth_kind, "er | powerlaw");
    synth->add_option("--n", synth_n)->required();
    synth->add_option("--density", synth_density);
    synth->add_option("--edges-per-vertex", synth_epv);
    synth->add_option("--feature-dim", synth_f);
    synth->add_option("--feature-density", synth_fdensity);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--adjacency-out", adj_out)->required();
    synth->add_option("--features-out", feat_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            gnnsim::SynthGraphParams p{synth_n, synth_density, synth_epv};
            gnnsim::SparseMatrix a = gnnsim::synth_graph(
                gnnsim::graph_kind_from_string(synth_kind), p, synth_seed);
            gnnsim::write_matrix_market(adj_out, a);
            std::cout << "wrote " << adj_out << " (" << a.rows() << " vertices, "
                      << a.nnz() << " entries)\n";
            if (!feat_out.empty()) {
                gnnsim::Matrix h = gnnsim::synth_features(synth_n, synth_f,
                                                          synth_fdensity, synth_seed + 1);
                gnnsim::write_features_csv(feat_out, gnnsim::to_dense(h));
                std::cout << "wrote " << feat_out << '\n';
            }
            return 0;
        }

        if (valid->parsed()) {
            gnnsim::ExperimentConfig cfg = build_config(vf);
            cfg.validate();
            std::cout << gnnsim::config_to_json(cfg) << '\n';
            return 0;
        }

        if (run->parsed()) {
            gnnsim::ExperimentConfig cfg = build_config(rf);
            gnnsim::RunResult result = gnnsim::run_experiment(cfg);
            gnnsim::write_reports(result);
            std::cout << "dataset " << result.dataset_name << ": "
                      << result.num_vertices << " vertices, " << result.num_tasks
                      << " tasks (" << result.elided_zero_tasks << " zero blocks elided)\n"
                      << "makespan " << result.report.makespan_s * 1e6 << " us, "
                      << result.report.total_macs << " MACs executed\n"
                      << "flops reduction " << result.flops.flops_reduction_factor
                      << "x, data reduction " << result.flops.data_reduction_factor
                      << "x\n";
            if (!cfg.output_dir.empty())
                std::cout << "reports written to " << cfg.output_dir << '\n';
            return 0;
        }

        if (cmp->parsed()) {
            gnnsim::ExperimentConfig cfg = build_config(cf);
            gnnsim::CompareResult result = gnnsim::compare_experiment(cfg);
            std::cout << gnnsim::compare_csv(result);
            if (!cfg.output_dir.empty()) {
                std::filesystem::create_directories(cfg.output_dir);
                std::ofstream out(std::filesystem::path(cfg.output_dir) / "compare.csv");
                out << gnnsim::compare_csv(result);
                gnnsim::write_reports(result.heterogeneous);
            }
            return 0;
        }

        if (flops->parsed()) {
            gnnsim::ExperimentConfig cfg = build_config(ff);
            gnnsim::RunResult result = gnnsim::run_experiment(cfg);
            std::cout << gnnsim::counters_csv(result);
            if (!cfg.output_dir.empty()) {
                std::filesystem::create_directories(cfg.output_dir);
                std::ofstream out(std::filesystem::path(cfg.output_dir) / "counters.csv");
                out << gnnsim::counters_csv(result);
            }
            return 0;
        }
    } catch (const gnnsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("cyclic") != std::string::npos ||
            what.find("schedule") != std::string::npos) {
            std::cerr << "simulation error: " << what << '\n';
            return kExitSimError;
        }
        std::cerr << "data error: " << what << '\n';
        return kExitDataError;
    }
    return 0;
}
