#include "gnnsim/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gnnsim {

DenseMatrix::DenseMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows * cols), 0.0f) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("DenseMatrix: dims must be >= 1");
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("DenseMatrix: dims must be >= 1");
    if (static_cast<index_t>(values_.size()) != rows * cols)
        throw std::invalid_argument("DenseMatrix: values length != rows*cols");
}

SparseMatrix::SparseMatrix(index_t rows, index_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("SparseMatrix: dims must be >= 1");
    std::erase_if(entries_, [](const Entry& e) { return e.value == 0.0f; });
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const Entry& e = entries_[k];
        if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_)
            throw std::invalid_argument("SparseMatrix: entry index out of range");
        if (k > 0 && entries_[k - 1].row == e.row && entries_[k - 1].col == e.col)
            throw std::invalid_argument("SparseMatrix: duplicate (row, col) entry");
    }
    row_offsets_.assign(static_cast<std::size_t>(rows_) + 1, 0);
    for (const Entry& e : entries_) ++row_offsets_[e.row + 1];
    for (index_t r = 0; r < rows_; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

index_t rows(const Matrix& m) {
    return std::visit([](const auto& x) { return x.rows(); }, m);
}

index_t cols(const Matrix& m) {
    return std::visit([](const auto& x) { return x.cols(); }, m);
}

DensityInfo density(const DenseMatrix& m) {
    count_t nnz = 0;
    for (float v : m.values())
        if (v != 0.0f) ++nnz;
    return make_density(nnz, m.rows() * m.cols());
}

DensityInfo density(const SparseMatrix& m) {
    return make_density(m.nnz(), m.rows() * m.cols());
}

DensityInfo density(const Matrix& m) {
    return std::visit([](const auto& x) { return density(x); }, m);
}

SparseMatrix to_sparse(const DenseMatrix& d, float threshold) {
    std::vector<Entry> entries;
    for (index_t r = 0; r < d.rows(); ++r)
        for (index_t c = 0; c < d.cols(); ++c) {
            float v = d(r, c);
            if (v != 0.0f && std::abs(v) >= threshold) entries.push_back({r, c, v});
        }
    return SparseMatrix(d.rows(), d.cols(), std::move(entries));
}

DenseMatrix to_dense(const SparseMatrix& s) {
    DenseMatrix d(s.rows(), s.cols());
    for (const Entry& e : s.entries()) d(e.row, e.col) = e.value;
    return d;
}

DenseMatrix to_dense(const Matrix& m) {
    if (const auto* d = std::get_if<DenseMatrix>(&m)) return *d;
    return to_dense(std::get<SparseMatrix>(m));
}

PartitionGrid::PartitionGrid(index_t src_rows, index_t src_cols,
                             index_t block_rows, index_t block_cols,
                             std::vector<Matrix> blocks, std::vector<BlockInfo> info)
    : src_rows_(src_rows), src_cols_(src_cols),
      block_rows_(block_rows), block_cols_(block_cols),
      grid_rows_((src_rows + block_rows - 1) / block_rows),
      grid_cols_((src_cols + block_cols - 1) / block_cols),
      blocks_(std::move(blocks)), info_(std::move(info)) {
    if (static_cast<index_t>(blocks_.size()) != grid_rows_ * grid_cols_ ||
        blocks_.size() != info_.size())
        throw std::invalid_argument("PartitionGrid: block count mismatch");
}

index_t PartitionGrid::row_extent(index_t i) const {
    return std::min(block_rows_, src_rows_ - i * block_rows_);
}

index_t PartitionGrid::col_extent(index_t j) const {
    return std::min(block_cols_, src_cols_ - j * block_cols_);
}

DensityInfo PartitionGrid::row_strip_density(index_t i) const {
    if (i < 0 || i >= grid_rows_) throw std::out_of_range("row strip index");
    count_t nnz = 0;
    for (index_t j = 0; j < grid_cols_; ++j) nnz += info(i, j).density.nnz;
    return make_density(nnz, row_extent(i) * src_cols_);
}

DensityInfo PartitionGrid::col_strip_density(index_t j) const {
    if (j < 0 || j >= grid_cols_) throw std::out_of_range("col strip index");
    count_t nnz = 0;
    for (index_t i = 0; i < grid_rows_; ++i) nnz += info(i, j).density.nnz;
    return make_density(nnz, src_rows_ * col_extent(j));
}

bool PartitionGrid::row_strip_zero(index_t i) const {
    return row_strip_density(i).nnz == 0;
}

bool PartitionGrid::col_strip_zero(index_t j) const {
    return col_strip_density(j).nnz == 0;
}

count_t PartitionGrid::total_nnz() const {
    count_t nnz = 0;
    for (const BlockInfo& b : info_) nnz += b.density.nnz;
    return nnz;
}

namespace {

Matrix make_block(const DenseMatrix& src, index_t r0, index_t c0, index_t h, index_t w) {
    DenseMatrix b(h, w);
    for (index_t r = 0; r < h; ++r)
        for (index_t c = 0; c < w; ++c) b(r, c) = src(r0 + r, c0 + c);
    return b;
}

}  // namespace

PartitionGrid partition(const Matrix& m, index_t block_rows, index_t block_cols,
                        bool strict) {
    const index_t nr = rows(m), nc = cols(m);
    if (block_rows < 1 || block_cols < 1)
        throw std::invalid_argument("partition: block dims must be >= 1");
    if (strict && (block_rows > nr || block_cols > nc))
        throw std::invalid_argument("partition: block dims exceed matrix dims");
    block_rows = std::min(block_rows, nr);
    block_cols = std::min(block_cols, nc);

    const index_t gr = (nr + block_rows - 1) / block_rows;
    const index_t gc = (nc + block_cols - 1) / block_cols;

    std::vector<Matrix> blocks;
    std::vector<PartitionGrid::BlockInfo> info;
    blocks.reserve(static_cast<std::size_t>(gr * gc));
    info.reserve(static_cast<std::size_t>(gr * gc));

    if (const auto* sp = std::get_if<SparseMatrix>(&m)) {
        // Bucket entries into blocks in one pass over the nonzeros.
        std::vector<std::vector<Entry>> buckets(static_cast<std::size_t>(gr * gc));
        for (const Entry& e : sp->entries()) {
            index_t bi = e.row / block_rows, bj = e.col / block_cols;
            buckets[bi * gc + bj].push_back(
                {e.row - bi * block_rows, e.col - bj * block_cols, e.value});
        }
        for (index_t i = 0; i < gr; ++i) {
            const index_t h = std::min(block_rows, nr - i * block_rows);
            for (index_t j = 0; j < gc; ++j) {
                const index_t w = std::min(block_cols, nc - j * block_cols);
                SparseMatrix b(h, w, std::move(buckets[i * gc + j]));
                DensityInfo d = density(b);
                info.push_back({d, d.nnz == 0});
                blocks.emplace_back(std::move(b));
            }
        }
    } else {
        const auto& dm = std::get<DenseMatrix>(m);
        for (index_t i = 0; i < gr; ++i) {
            const index_t h = std::min(block_rows, nr - i * block_rows);
            for (index_t j = 0; j < gc; ++j) {
                const index_t w = std::min(block_cols, nc - j * block_cols);
                Matrix b = make_block(dm, i * block_rows, j * block_cols, h, w);
                DensityInfo d = density(b);
                info.push_back({d, d.nnz == 0});
                blocks.emplace_back(std::move(b));
            }
        }
    }
    return PartitionGrid(nr, nc, block_rows, block_cols, std::move(blocks), std::move(info));
}

Matrix concat_row_strip(const PartitionGrid& g, index_t i) {
    if (i < 0 || i >= g.grid_rows()) throw std::out_of_range("concat_row_strip: index");
    const index_t h = g.row_extent(i), w = g.source_cols();
    if (std::holds_alternative<SparseMatrix>(g.block(i, 0))) {
        std::vector<Entry> entries;
        for (index_t j = 0; j < g.grid_cols(); ++j) {
            const auto& b = std::get<SparseMatrix>(g.block(i, j));
            const index_t c0 = j * g.block_cols();
            for (const Entry& e : b.entries()) entries.push_back({e.row, e.col + c0, e.value});
        }
        return SparseMatrix(h, w, std::move(entries));
    }
    DenseMatrix out(h, w);
    for (index_t j = 0; j < g.grid_cols(); ++j) {
        const auto& b = std::get<DenseMatrix>(g.block(i, j));
        const index_t c0 = j * g.block_cols();
        for (index_t r = 0; r < b.rows(); ++r)
            for (index_t c = 0; c < b.cols(); ++c) out(r, c0 + c) = b(r, c);
    }
    return out;
}

Matrix concat_col_strip(const PartitionGrid& g, index_t j) {
    if (j < 0 || j >= g.grid_cols()) throw std::out_of_range("concat_col_strip: index");
    const index_t h = g.source_rows(), w = g.col_extent(j);
    if (std::holds_alternative<SparseMatrix>(g.block(0, j))) {
        std::vector<Entry> entries;
        for (index_t i = 0; i < g.grid_rows(); ++i) {
            const auto& b = std::get<SparseMatrix>(g.block(i, j));
            const index_t r0 = i * g.block_rows();
            for (const Entry& e : b.entries()) entries.push_back({e.row + r0, e.col, e.value});
        }
        return SparseMatrix(h, w, std::move(entries));
    }
    DenseMatrix out(h, w);
    for (index_t i = 0; i < g.grid_rows(); ++i) {
        const auto& b = std::get<DenseMatrix>(g.block(i, j));
        const index_t r0 = i * g.block_rows();
        for (index_t r = 0; r < b.rows(); ++r)
            for (index_t c = 0; c < b.cols(); ++c) out(r0 + r, c) = b(r, c);
    }
    return out;
}

}  // namespace gnnsim
