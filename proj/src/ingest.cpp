#include "gnnsim/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "gnnsim/rng.hpp"

namespace gnnsim {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<Entry> dedup_sum(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Entry> out;
    for (const Entry& e : entries) {
        if (!out.empty() && out.back().row == e.row && out.back().col == e.col)
            out.back().value += e.value;
        else
            out.push_back(e);
    }
    return out;
}

}  // namespace

SparseMatrix load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
    ++line_no;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        parse_fail(path, line_no, "not a MatrixMarket matrix file");
    if (lower(format) != "coordinate")
        parse_fail(path, line_no, "only coordinate format is supported");
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer" && field != "pattern")
        parse_fail(path, line_no, "unsupported field type '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        parse_fail(path, line_no, "unsupported symmetry '" + symmetry + "'");

    index_t nrows = 0, ncols = 0;
    count_t nnz = 0;
    bool have_size = false;
    std::vector<Entry> entries;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        if (!have_size) {
            if (!(ls >> nrows >> ncols >> nnz))
                parse_fail(path, line_no, "bad size line");
            if (nrows <= 0 || ncols <= 0 || nnz < 0)
                parse_fail(path, line_no, "non-positive dimensions");
            have_size = true;
            entries.reserve(static_cast<std::size_t>(nnz));
            continue;
        }
        index_t r, c;
        if (!(ls >> r >> c)) parse_fail(path, line_no, "bad entry line");
        double v = 1.0;
        if (field != "pattern" && !(ls >> v))
            parse_fail(path, line_no, "missing value");
        if (r < 1 || r > nrows || c < 1 || c > ncols)
            parse_fail(path, line_no, "index out of declared bounds");
        entries.push_back({r - 1, c - 1, static_cast<float>(v)});
        if (symmetry == "symmetric" && r != c)
            entries.push_back({c - 1, r - 1, static_cast<float>(v)});
    }
    if (!have_size) parse_fail(path, line_no, "missing size line");
    if (symmetry == "general" && static_cast<count_t>(entries.size()) != nnz)
        parse_fail(path, line_no, "entry count does not match declared nnz");
    return SparseMatrix(nrows, ncols, std::move(entries));
}

SparseMatrix load_edge_list(const std::string& path, const EdgeListOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<Entry> entries;
    index_t max_index = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        index_t u, v;
        if (!(ls >> u)) continue;  // blank / comment-only line
        if (!(ls >> v)) parse_fail(path, line_no, "expected two vertex ids");
        if (u < 0 || v < 0) parse_fail(path, line_no, "negative vertex id");
        max_index = std::max({max_index, u, v});
        entries.push_back({u, v, 1.0f});
        if (opts.symmetrize && u != v) entries.push_back({v, u, 1.0f});
    }
    index_t n = opts.num_vertices >= 0 ? opts.num_vertices : max_index + 1;
    if (max_index >= n)
        throw std::runtime_error(path + ": vertex id " + std::to_string(max_index) +
                                 " exceeds declared vertex count");
    if (opts.add_self_loops)
        for (index_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0f});

    entries = dedup_sum(entries);
    for (Entry& e : entries) e.value = 1.0f;  // duplicates collapse, not sum
    return SparseMatrix(n, n, std::move(entries));
}

Matrix load_features(const std::string& path, double densify_threshold) {
    std::ifstream probe(path);
    if (!probe) throw std::runtime_error("cannot open " + path);
    std::string first;
    std::getline(probe, first);
    probe.close();

    if (first.rfind("%%MatrixMarket", 0) == 0) {
        SparseMatrix s = load_matrix_market(path);
        if (density(s).density >= densify_threshold) return to_dense(s);
        return s;
    }

    // CSV: one row per line.
    std::ifstream in(path);
    std::vector<float> values;
    index_t ncols = -1, nrows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        index_t c = 0;
        while (std::getline(ls, cell, ',')) {
            try {
                values.push_back(std::stof(cell));
            } catch (const std::exception&) {
                parse_fail(path, line_no, "bad numeric cell '" + cell + "'");
            }
            ++c;
        }
        if (ncols == -1) ncols = c;
        if (c != ncols) parse_fail(path, line_no, "ragged row");
        ++nrows;
    }
    if (nrows == 0) throw std::runtime_error(path + ": no feature rows");
    DenseMatrix d(nrows, ncols, std::move(values));
    DensityInfo info = density(d);
    if (info.density < densify_threshold) return to_sparse(d);
    return d;
}

void write_matrix_market(const std::string& path, const SparseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    out.precision(9);
    for (const Entry& e : m.entries())
        out << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
}

void write_features_csv(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(9);
    for (index_t r = 0; r < m.rows(); ++r) {
        for (index_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << m(r, c);
        }
        out << '\n';
    }
}

GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "er" || s == "uniform" || s == "uniform-random") return GraphKind::UniformRandom;
    if (s == "powerlaw" || s == "power-law" || s == "pa") return GraphKind::PowerLaw;
    throw std::invalid_argument("unknown graph kind '" + s + "'");
}

SparseMatrix synth_graph(GraphKind kind, const SynthGraphParams& params,
                         std::uint64_t seed) {
    const index_t n = params.n;
    if (n <= 0) throw std::invalid_argument("synth_graph: n must be positive");
    Rng rng(seed);
    std::unordered_set<std::uint64_t> seen;
    std::vector<Entry> entries;
    auto add_undirected = [&](index_t u, index_t v) {
        const std::uint64_t key = static_cast<std::uint64_t>(std::min(u, v)) *
                                      static_cast<std::uint64_t>(n) +
                                  static_cast<std::uint64_t>(std::max(u, v));
        if (!seen.insert(key).second) return false;
        entries.push_back({u, v, 1.0f});
        if (u != v) entries.push_back({v, u, 1.0f});
        return true;
    };

    if (kind == GraphKind::UniformRandom) {
        if (params.density < 0.0 || params.density > 1.0)
            throw std::invalid_argument("synth_graph: density must be in [0,1]");
        // Stored-entry target: density * n^2 off-diagonal entries, i.e.
        // half that many undirected edges.
        const count_t target_edges = static_cast<count_t>(
            std::llround(params.density * static_cast<double>(n) *
                         static_cast<double>(n) / 2.0));
        const count_t max_edges = n * (n - 1) / 2;
        if (target_edges > max_edges)
            throw std::invalid_argument("synth_graph: density infeasible without self loops");
        count_t placed = 0;
        while (placed < target_edges) {
            index_t u = static_cast<index_t>(rng.uniform_index(n));
            index_t v = static_cast<index_t>(rng.uniform_index(n));
            if (u == v) continue;
            if (add_undirected(u, v)) ++placed;
        }
    } else {
        const index_t m = params.edges_per_vertex;
        if (m <= 0 || m >= n)
            throw std::invalid_argument("synth_graph: edges_per_vertex out of range");
        // Preferential attachment; repeated-endpoint list makes the
        // degree-proportional draw O(1).
        std::vector<index_t> endpoints;
        for (index_t u = 0; u < m + 1; ++u)
            for (index_t v = u + 1; v < m + 1; ++v)
                if (add_undirected(u, v)) {
                    endpoints.push_back(u);
                    endpoints.push_back(v);
                }
        for (index_t u = m + 1; u < n; ++u) {
            index_t attached = 0;
            while (attached < m) {
                index_t v = endpoints[rng.uniform_index(endpoints.size())];
                if (v == u) continue;
                if (add_undirected(u, v)) {
                    endpoints.push_back(u);
                    endpoints.push_back(v);
                    ++attached;
                }
            }
        }
    }
    return SparseMatrix(n, n, std::move(entries));
}

Matrix synth_features(index_t n, index_t f, double density, std::uint64_t seed,
                      double densify_threshold) {
    if (n <= 0 || f <= 0) throw std::invalid_argument("synth_features: empty shape");
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("synth_features: density must be in [0,1]");
    const count_t total = n * f;
    const count_t target = static_cast<count_t>(
        std::llround(density * static_cast<double>(total)));
    Rng rng(seed);
    std::unordered_set<std::uint64_t> seen;
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(target));
    while (static_cast<count_t>(entries.size()) < target) {
        const std::uint64_t pos = rng.uniform_index(static_cast<std::uint64_t>(total));
        if (!seen.insert(pos).second) continue;
        entries.push_back({static_cast<index_t>(pos / f), static_cast<index_t>(pos % f),
                           static_cast<float>(rng.uniform(0.1, 1.0))});
    }
    SparseMatrix s(n, f, std::move(entries));
    if (density >= densify_threshold) return to_dense(s);
    return s;
}

DatasetBundle make_bundle(std::string name, SparseMatrix adjacency, Matrix features,
                          index_t num_classes) {
    if (adjacency.rows() != adjacency.cols())
        throw std::invalid_argument("dataset adjacency must be square");
    if (rows(features) != adjacency.rows())
        throw std::invalid_argument("feature rows must equal vertex count");
    DensityInfo a = density(adjacency);
    DensityInfo h = density(features);
    return DatasetBundle{std::move(name), std::move(adjacency), std::move(features),
                         num_classes, a, h};
}

DatasetBundle make_synthetic(const SynthDatasetParams& params, std::uint64_t seed) {
    SparseMatrix a = synth_graph(params.graph_kind, params.graph, seed);
    Matrix h = synth_features(params.graph.n, params.feature_dim,
                              params.feature_density, seed + 1);
    return make_bundle(params.name, std::move(a), std::move(h), params.num_classes);
}

PreprocessResult measure_preprocessing(const DatasetBundle& bundle, index_t n1,
                                       index_t n2) {
    const auto t0 = std::chrono::steady_clock::now();
    PartitionGrid a = partition(Matrix(bundle.adjacency), n1, n1);
    PartitionGrid h = partition(bundle.features, n1, n2);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    return PreprocessResult{std::move(a), std::move(h), seconds};
}

}  // namespace gnnsim
