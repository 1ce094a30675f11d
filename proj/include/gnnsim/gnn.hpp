#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnnsim/matrices.hpp"

namespace gnnsim {

enum class Activation { None, Relu };
enum class AggregateKind { NormalizedSum, Mean, SumGin, None };
enum class ModelKind { Gcn, GraphSage, Gin, Sgc };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind k);

struct LayerSpec {
    index_t in_dim;
    index_t out_dim;
    DenseMatrix weight;            // in_dim x out_dim
    Activation activation;
    AggregateKind aggregate;
};

struct ModelSpec {
    ModelKind kind;
    std::vector<LayerSpec> layers;
    int sgc_hops = 2;              // SGC only

    void validate() const;
};

/// Seed-pinned uniform weights scaled by 1/sqrt(in_dim).
/// dims = {in, hidden..., out}.
ModelSpec make_model(ModelKind kind, const std::vector<index_t>& dims,
                     std::uint64_t seed, int sgc_hops = 2);

/// GCN/SGC: D~^{-1/2} (A+I) D~^{-1/2}; Mean: D~^{-1} (A+I); SumGin: A + (1+eps) I.
SparseMatrix normalize_adjacency(const SparseMatrix& a, AggregateKind kind,
                                 double gin_eps = 0.0);

enum class KernelRole { FeatureTransform, FeatureAggregation };

/// Which matrix a kernel operand refers to in the lowered program.
struct OperandRef {
    enum class Kind { Adjacency, InputFeatures, Weight, Intermediate };
    Kind kind;
    index_t index = 0;  // weight index or intermediate slot
};

struct KernelInstance {
    index_t layer;                 // 0-based
    KernelRole role;
    OperandRef left;
    OperandRef right;
    index_t out_slot;
    Activation activation_after;   // applied to this kernel's output
};

struct LoweredModel {
    SparseMatrix normalized_adjacency;
    std::vector<DenseMatrix> weights;
    std::vector<KernelInstance> kernels;
    index_t num_slots;
};

/// Per-layer Update (H * W) then Aggregate (A^ * ...); SGC emits its hop
/// aggregations first, then a single transform.
LoweredModel lower_model(const ModelSpec& model, const SparseMatrix& a,
                         index_t feature_dim);

struct StageDensity {
    index_t kernel;                // index into LoweredModel::kernels
    DensityInfo output_density;    // after activation, if any
};

struct ForwardResult {
    DenseMatrix embeddings;
    std::vector<DenseMatrix> slots;        // realized intermediates, post-activation
    std::vector<StageDensity> trace;
    DensityInfo input_feature_density;
    DensityInfo adjacency_density;
};

/// Executes the lowered kernels with reference-matmul numeric semantics and
/// records the density of every intermediate.
ForwardResult forward(const LoweredModel& lowered, const Matrix& h0);

ForwardResult forward(const ModelSpec& model, const SparseMatrix& a, const Matrix& h0);

}  // namespace gnnsim
