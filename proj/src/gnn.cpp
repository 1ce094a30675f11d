#include "gnnsim/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gnnsim/primitives.hpp"
#include "gnnsim/rng.hpp"

namespace gnnsim {

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "gcn") return ModelKind::Gcn;
    if (s == "graphsage" || s == "sage") return ModelKind::GraphSage;
    if (s == "gin") return ModelKind::Gin;
    if (s == "sgc") return ModelKind::Sgc;
    throw std::invalid_argument("unknown model kind: " + s);
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Gcn: return "gcn";
        case ModelKind::GraphSage: return "graphsage";
        case ModelKind::Gin: return "gin";
        case ModelKind::Sgc: return "sgc";
    }
    return "?";
}

void ModelSpec::validate() const {
    if (layers.empty()) throw std::invalid_argument("ModelSpec: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerSpec& ls = layers[l];
        if (ls.weight.rows() != ls.in_dim || ls.weight.cols() != ls.out_dim)
            throw std::invalid_argument("ModelSpec: weight dims mismatch");
        if (l + 1 < layers.size() && ls.out_dim != layers[l + 1].in_dim)
            throw std::invalid_argument("ModelSpec: layer dimension chain broken");
    }
    if (kind == ModelKind::Sgc && layers.size() != 1)
        throw std::invalid_argument("ModelSpec: SGC uses a single layer");
    if (kind == ModelKind::Sgc && sgc_hops < 1)
        throw std::invalid_argument("ModelSpec: sgc_hops must be >= 1");
}

namespace {

AggregateKind aggregate_for(ModelKind kind) {
    switch (kind) {
        case ModelKind::Gcn: return AggregateKind::NormalizedSum;
        case ModelKind::GraphSage: return AggregateKind::Mean;
        case ModelKind::Gin: return AggregateKind::SumGin;
        case ModelKind::Sgc: return AggregateKind::NormalizedSum;
    }
    return AggregateKind::NormalizedSum;
}

DenseMatrix random_weight(index_t in_dim, index_t out_dim, Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
    DenseMatrix w(in_dim, out_dim);
    for (float& v : w.values()) v = static_cast<float>(rng.uniform(-scale, scale));
    return w;
}

}  // namespace

ModelSpec make_model(ModelKind kind, const std::vector<index_t>& dims,
                     std::uint64_t seed, int sgc_hops) {
    if (dims.size() < 2) throw std::invalid_argument("make_model: need at least in/out dims");
    Rng rng(seed);
    ModelSpec spec;
    spec.kind = kind;
    spec.sgc_hops = sgc_hops;
    const Activation act = kind == ModelKind::Sgc ? Activation::None : Activation::Relu;
    const std::size_t n_layers = kind == ModelKind::Sgc ? 1 : dims.size() - 1;
    if (kind == ModelKind::Sgc && dims.size() != 2)
        throw std::invalid_argument("make_model: SGC takes exactly {in, out} dims");
    for (std::size_t l = 0; l < n_layers; ++l) {
        const index_t in = dims[l], out = dims[l + 1];
        // no activation after the final layer
        const Activation layer_act = (l + 1 == n_layers) ? Activation::None : act;
        spec.layers.push_back(
            {in, out, random_weight(in, out, rng), layer_act, aggregate_for(kind)});
    }
    spec.validate();
    return spec;
}

SparseMatrix normalize_adjacency(const SparseMatrix& a, AggregateKind kind,
                                 double gin_eps) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("normalize_adjacency: matrix must be square");
    const index_t n = a.rows();
    if (kind == AggregateKind::None) return a;

    const double self_weight = kind == AggregateKind::SumGin ? 1.0 + gin_eps : 1.0;

    // A~ = A + self_weight * I, merging any existing diagonal entries.
    std::vector<Entry> entries = a.entries();
    std::vector<char> has_diag(static_cast<std::size_t>(n), 0);
    for (Entry& e : entries)
        if (e.row == e.col) {
            e.value += static_cast<float>(self_weight);
            has_diag[e.row] = 1;
        }
    for (index_t i = 0; i < n; ++i)
        if (!has_diag[i]) entries.push_back({i, i, static_cast<float>(self_weight)});

    if (kind == AggregateKind::SumGin)
        return SparseMatrix(n, n, std::move(entries));

    std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
    for (const Entry& e : entries) degree[e.row] += e.value;

    if (kind == AggregateKind::Mean) {
        for (Entry& e : entries)
            e.value = static_cast<float>(e.value / degree[e.row]);
    } else {  // NormalizedSum
        std::vector<double> inv_sqrt(static_cast<std::size_t>(n), 0.0);
        for (index_t i = 0; i < n; ++i)
            if (degree[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
        for (Entry& e : entries)
            e.value = static_cast<float>(e.value * inv_sqrt[e.row] * inv_sqrt[e.col]);
    }
    return SparseMatrix(n, n, std::move(entries));
}

LoweredModel lower_model(const ModelSpec& model, const SparseMatrix& a,
                         index_t feature_dim) {
    model.validate();
    if (model.layers.front().in_dim != feature_dim)
        throw std::invalid_argument("lower_model: feature dim does not match layer 0");

    LoweredModel out{normalize_adjacency(a, model.layers.front().aggregate), {}, {}, 0};
    for (const LayerSpec& l : model.layers) out.weights.push_back(l.weight);

    index_t slot = 0;
    auto features = OperandRef{OperandRef::Kind::InputFeatures, 0};

    if (model.kind == ModelKind::Sgc) {
        OperandRef current = features;
        for (int h = 0; h < model.sgc_hops; ++h) {
            out.kernels.push_back({0, KernelRole::FeatureAggregation,
                                   {OperandRef::Kind::Adjacency, 0}, current, slot,
                                   Activation::None});
            current = {OperandRef::Kind::Intermediate, slot++};
        }
        out.kernels.push_back({0, KernelRole::FeatureTransform, current,
                               {OperandRef::Kind::Weight, 0}, slot,
                               model.layers[0].activation});
        ++slot;
    } else {
        OperandRef current = features;
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            const index_t li = static_cast<index_t>(l);
            out.kernels.push_back({li, KernelRole::FeatureTransform, current,
                                   {OperandRef::Kind::Weight, li}, slot,
                                   Activation::None});
            OperandRef transformed{OperandRef::Kind::Intermediate, slot++};
            out.kernels.push_back({li, KernelRole::FeatureAggregation,
                                   {OperandRef::Kind::Adjacency, 0}, transformed, slot,
                                   model.layers[l].activation});
            current = {OperandRef::Kind::Intermediate, slot++};
        }
    }
    out.num_slots = slot;
    return out;
}

namespace {

DenseMatrix multiply(const Matrix& left, const DenseMatrix& right) {
    if (const auto* sp = std::get_if<SparseMatrix>(&left))
        return spdmm(*sp, right).first;
    return gemm(std::get<DenseMatrix>(left), right).first;
}

void relu_inplace(DenseMatrix& m) {
    for (float& v : m.values()) v = std::max(v, 0.0f);
}

}  // namespace

ForwardResult forward(const LoweredModel& lowered, const Matrix& h0) {
    std::vector<DenseMatrix> slots;
    slots.reserve(static_cast<std::size_t>(lowered.num_slots));

    auto resolve = [&](const OperandRef& ref) -> Matrix {
        switch (ref.kind) {
            case OperandRef::Kind::Adjacency: return lowered.normalized_adjacency;
            case OperandRef::Kind::InputFeatures: return h0;
            case OperandRef::Kind::Weight: return lowered.weights[ref.index];
            case OperandRef::Kind::Intermediate: return slots[ref.index];
        }
        throw std::logic_error("unreachable");
    };

    std::vector<StageDensity> trace;
    for (std::size_t k = 0; k < lowered.kernels.size(); ++k) {
        const KernelInstance& ker = lowered.kernels[k];
        Matrix left = resolve(ker.left);
        DenseMatrix right = to_dense(resolve(ker.right));
        if (cols(left) != right.rows())
            throw std::invalid_argument("forward: kernel operand dims mismatch");
        DenseMatrix z = multiply(left, right);
        if (ker.activation_after == Activation::Relu) relu_inplace(z);
        trace.push_back({static_cast<index_t>(k), density(z)});
        slots.push_back(std::move(z));
    }

    ForwardResult result{slots.back(), std::move(slots), std::move(trace),
                         density(h0), density(lowered.normalized_adjacency)};
    return result;
}

ForwardResult forward(const ModelSpec& model, const SparseMatrix& a, const Matrix& h0) {
    return forward(lower_model(model, a, cols(h0)), h0);
}

}  // namespace gnnsim
