#pragma once

#include <string>
#include <utility>

#include "gnnsim/matrices.hpp"

namespace gnnsim {

enum class PrimitiveKind { Gemm, Spdmm, Spmm };

std::string to_string(PrimitiveKind k);

/// Exact work/traffic counters produced by a kernel execution. Loads and
/// stores count matrix values only; index words are excluded.
struct CostCounters {
    count_t macs = 0;
    count_t elements_loaded_left = 0;
    count_t elements_loaded_right = 0;
    count_t elements_stored = 0;
};

/// Dense-dense multiply. macs = m*n*d; loads count each operand element once.
/// Parallelized over output rows; per-element accumulation order is fixed,
/// so results are identical for any thread count.
std::pair<DenseMatrix, CostCounters> gemm(const DenseMatrix& x, const DenseMatrix& y);

/// Sparse-dense multiply, scatter-gather style: each nonzero of X at (r, c)
/// contributes value * Y[c] to Z[r]. macs = nnz(X) * d.
std::pair<DenseMatrix, CostCounters> spdmm(const SparseMatrix& x, const DenseMatrix& y);

/// Sparse-sparse multiply, row-wise product: Z[r] accumulates e.value * Y[e.col]
/// over nonzeros e of row r of X, touching only the nonzeros of those Y rows.
/// macs counts exactly the nonzero pairs that meet. Exact-zero results from
/// cancellation are dropped from the output.
std::pair<SparseMatrix, CostCounters> spmm(const SparseMatrix& x, const SparseMatrix& y);

/// Serial triple-loop oracle, double accumulation, rounded to FP32 at the end.
DenseMatrix reference_matmul(const DenseMatrix& x, const DenseMatrix& y);

}  // namespace gnnsim
