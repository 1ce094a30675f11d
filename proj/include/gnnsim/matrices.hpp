#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace gnnsim {

using index_t = std::int64_t;
using count_t = std::int64_t;

/// nnz / total bookkeeping attached to matrices, partition blocks and strips.
struct DensityInfo {
    count_t nnz = 0;
    count_t total = 0;
    double density = 0.0;
};

inline DensityInfo make_density(count_t nnz, count_t total) {
    if (total <= 0) throw std::invalid_argument("DensityInfo: total must be positive");
    return DensityInfo{nnz, total, static_cast<double>(nnz) / static_cast<double>(total)};
}

/// Row-major FP32 dense matrix.
class DenseMatrix {
public:
    DenseMatrix(index_t rows, index_t cols);
    DenseMatrix(index_t rows, index_t cols, std::vector<float> values);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    float operator()(index_t r, index_t c) const { return values_[r * cols_ + c]; }
    float& operator()(index_t r, index_t c) { return values_[r * cols_ + c]; }

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }

private:
    index_t rows_;
    index_t cols_;
    std::vector<float> values_;
};

struct Entry {
    index_t row;
    index_t col;
    float value;
};

/// COO triples sorted by (row, col) with an auxiliary compressed row index.
/// Entries with value exactly 0 are never stored; duplicates are rejected.
class SparseMatrix {
public:
    SparseMatrix(index_t rows, index_t cols, std::vector<Entry> entries);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    count_t nnz() const { return static_cast<count_t>(entries_.size()); }

    const std::vector<Entry>& entries() const { return entries_; }
    const std::vector<index_t>& row_offsets() const { return row_offsets_; }

    std::span<const Entry> row(index_t r) const {
        return {entries_.data() + row_offsets_[r],
                entries_.data() + row_offsets_[r + 1]};
    }

private:
    index_t rows_;
    index_t cols_;
    std::vector<Entry> entries_;
    std::vector<index_t> row_offsets_;
};

using Matrix = std::variant<DenseMatrix, SparseMatrix>;

index_t rows(const Matrix& m);
index_t cols(const Matrix& m);

/// Exact nonzero count and ratio. Dense matrices are scanned element-wise.
DensityInfo density(const DenseMatrix& m);
DensityInfo density(const SparseMatrix& m);
DensityInfo density(const Matrix& m);

SparseMatrix to_sparse(const DenseMatrix& d, float threshold = 0.0f);
DenseMatrix to_dense(const SparseMatrix& s);
DenseMatrix to_dense(const Matrix& m);

/// 2-D blocking of a matrix. Edge blocks may be smaller; blocks keep the
/// storage kind of the source. All-zero blocks carry a zero flag so the
/// analyzer can elide the corresponding tasks without rescanning.
class PartitionGrid {
public:
    struct BlockInfo {
        DensityInfo density;
        bool zero = false;
    };

    PartitionGrid(index_t src_rows, index_t src_cols,
                  index_t block_rows, index_t block_cols,
                  std::vector<Matrix> blocks, std::vector<BlockInfo> info);

    index_t source_rows() const { return src_rows_; }
    index_t source_cols() const { return src_cols_; }
    index_t block_rows() const { return block_rows_; }
    index_t block_cols() const { return block_cols_; }
    index_t grid_rows() const { return grid_rows_; }
    index_t grid_cols() const { return grid_cols_; }

    index_t row_extent(index_t i) const;   // actual height of block row i
    index_t col_extent(index_t j) const;   // actual width of block column j

    const Matrix& block(index_t i, index_t j) const { return blocks_[i * grid_cols_ + j]; }
    const BlockInfo& info(index_t i, index_t j) const { return info_[i * grid_cols_ + j]; }

    /// Aggregated from block DensityInfo; no value rescan.
    DensityInfo row_strip_density(index_t i) const;
    DensityInfo col_strip_density(index_t j) const;
    bool row_strip_zero(index_t i) const;
    bool col_strip_zero(index_t j) const;

    count_t total_nnz() const;

private:
    index_t src_rows_, src_cols_;
    index_t block_rows_, block_cols_;
    index_t grid_rows_, grid_cols_;
    std::vector<Matrix> blocks_;
    std::vector<BlockInfo> info_;
};

/// Block dims larger than the matrix are clamped unless strict is set.
PartitionGrid partition(const Matrix& m, index_t block_rows, index_t block_cols,
                        bool strict = false);

/// X_{i,:} as a single matrix of width source_cols.
Matrix concat_row_strip(const PartitionGrid& g, index_t i);
/// Y_{:,j} as a single matrix of height source_rows.
Matrix concat_col_strip(const PartitionGrid& g, index_t j);

}  // namespace gnnsim
