#pragma once

#include <cstdint>
#include <string>

#include "gnnsim/matrices.hpp"

namespace gnnsim {

struct DatasetBundle {
    std::string name;
    SparseMatrix adjacency;
    Matrix features;
    index_t num_classes = 0;
    DensityInfo adjacency_density;
    DensityInfo feature_density;
};

/// Matrix Market coordinate format, 1-indexed; real / integer / pattern,
/// general / symmetric. Pattern entries become 1.0f.
SparseMatrix load_matrix_market(const std::string& path);

struct EdgeListOptions {
    bool symmetrize = true;
    bool add_self_loops = false;
    index_t num_vertices = -1;  // -1: max index + 1
};

/// Whitespace-separated "u v" pairs, '#' comments; duplicates collapse to one.
SparseMatrix load_edge_list(const std::string& path, const EdgeListOptions& opts = {});

/// CSV is dense; a %%MatrixMarket header selects the sparse path. Matrices
/// below densify_threshold stay sparse (a storage choice only).
Matrix load_features(const std::string& path, double densify_threshold = 0.25);

void write_matrix_market(const std::string& path, const SparseMatrix& m);
void write_features_csv(const std::string& path, const DenseMatrix& m);

enum class GraphKind { UniformRandom, PowerLaw };

GraphKind graph_kind_from_string(const std::string& s);

struct SynthGraphParams {
    index_t n = 0;
    double density = 0.0;       // UniformRandom: expected edge density
    index_t edges_per_vertex = 4;  // PowerLaw: attachments per new vertex
};

/// Seed-deterministic undirected graphs (both (u,v) and (v,u) stored).
SparseMatrix synth_graph(GraphKind kind, const SynthGraphParams& params,
                         std::uint64_t seed);

/// nnz is hit exactly (= round(n*f*density)); values uniform in [0.1, 1).
Matrix synth_features(index_t n, index_t f, double density, std::uint64_t seed,
                      double densify_threshold = 0.25);

struct SynthDatasetParams {
    std::string name = "synthetic";
    GraphKind graph_kind = GraphKind::UniformRandom;
    SynthGraphParams graph;
    index_t feature_dim = 0;
    double feature_density = 1.0;
    index_t num_classes = 2;
};

DatasetBundle make_synthetic(const SynthDatasetParams& params, std::uint64_t seed);

DatasetBundle make_bundle(std::string name, SparseMatrix adjacency, Matrix features,
                          index_t num_classes);

struct PreprocessResult {
    PartitionGrid adjacency;
    PartitionGrid features;
    double seconds = 0.0;
};

/// Times the 2-D partitioning step (the one-off preprocessing pass).
PreprocessResult measure_preprocessing(const DatasetBundle& bundle, index_t n1,
                                       index_t n2);

}  // namespace gnnsim
