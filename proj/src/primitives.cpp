#include "gnnsim/primitives.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gnnsim {

std::string to_string(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::Gemm: return "GEMM";
        case PrimitiveKind::Spdmm: return "SpDMM";
        case PrimitiveKind::Spmm: return "SpMM";
    }
    return "?";
}

namespace {

void check_dims(index_t xc, index_t yr, const char* who) {
    if (xc != yr) throw std::invalid_argument(std::string(who) + ": inner dims mismatch");
}

}  // namespace

std::pair<DenseMatrix, CostCounters> gemm(const DenseMatrix& x, const DenseMatrix& y) {
    check_dims(x.cols(), y.rows(), "gemm");
    const index_t m = x.rows(), n = x.cols(), d = y.cols();
    DenseMatrix z(m, d);

#pragma omp parallel for schedule(static)
    for (index_t r = 0; r < m; ++r) {
        std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
        for (index_t k = 0; k < n; ++k) {
            const double xv = x(r, k);
            for (index_t c = 0; c < d; ++c) acc[c] += xv * static_cast<double>(y(k, c));
        }
        for (index_t c = 0; c < d; ++c) z(r, c) = static_cast<float>(acc[c]);
    }

    CostCounters cost;
    cost.macs = m * n * d;
    cost.elements_loaded_left = m * n;
    cost.elements_loaded_right = n * d;
    cost.elements_stored = m * d;
    return {std::move(z), cost};
}

std::pair<DenseMatrix, CostCounters> spdmm(const SparseMatrix& x, const DenseMatrix& y) {
    check_dims(x.cols(), y.rows(), "spdmm");
    const index_t m = x.rows(), d = y.cols();
    DenseMatrix z(m, d);

#pragma omp parallel for schedule(dynamic, 64)
    for (index_t r = 0; r < m; ++r) {
        std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
        for (const Entry& e : x.row(r)) {
            const double v = e.value;
            for (index_t c = 0; c < d; ++c) acc[c] += v * static_cast<double>(y(e.col, c));
        }
        for (index_t c = 0; c < d; ++c) z(r, c) = static_cast<float>(acc[c]);
    }

    CostCounters cost;
    cost.macs = x.nnz() * d;
    cost.elements_loaded_left = x.nnz();
    cost.elements_loaded_right = x.nnz() * d;
    cost.elements_stored = m * d;
    return {std::move(z), cost};
}

std::pair<SparseMatrix, CostCounters> spmm(const SparseMatrix& x, const SparseMatrix& y) {
    check_dims(x.cols(), y.rows(), "spmm");
    const index_t m = x.rows(), d = y.cols();

    std::vector<std::vector<Entry>> row_out(static_cast<std::size_t>(m));
    std::vector<count_t> row_macs(static_cast<std::size_t>(m), 0);
    std::vector<count_t> row_loads(static_cast<std::size_t>(m), 0);

#pragma omp parallel
    {
        std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
        std::vector<index_t> touched;
        std::vector<char> is_touched(static_cast<std::size_t>(d), 0);

#pragma omp for schedule(dynamic, 64)
        for (index_t r = 0; r < m; ++r) {
            touched.clear();
            count_t macs = 0;
            for (const Entry& e : x.row(r)) {
                const double v = e.value;
                for (const Entry& ye : y.row(e.col)) {
                    if (!is_touched[ye.col]) {
                        is_touched[ye.col] = 1;
                        touched.push_back(ye.col);
                        acc[ye.col] = 0.0;
                    }
                    acc[ye.col] += v * static_cast<double>(ye.value);
                    ++macs;
                }
            }
            std::sort(touched.begin(), touched.end());
            auto& out = row_out[r];
            for (index_t c : touched) {
                const float v = static_cast<float>(acc[c]);
                if (v != 0.0f) out.push_back({r, c, v});  // cancellation zeros dropped
                is_touched[c] = 0;
            }
            row_macs[r] = macs;
            row_loads[r] = macs;  // one right-hand value per meeting pair
        }
    }

    std::vector<Entry> entries;
    CostCounters cost;
    for (index_t r = 0; r < m; ++r) {
        entries.insert(entries.end(), row_out[r].begin(), row_out[r].end());
        cost.macs += row_macs[r];
        cost.elements_loaded_right += row_loads[r];
    }
    cost.elements_loaded_left = x.nnz();
    cost.elements_stored = static_cast<count_t>(entries.size());
    return {SparseMatrix(m, d, std::move(entries)), cost};
}

DenseMatrix reference_matmul(const DenseMatrix& x, const DenseMatrix& y) {
    check_dims(x.cols(), y.rows(), "reference_matmul");
    const index_t m = x.rows(), n = x.cols(), d = y.cols();
    DenseMatrix z(m, d);
    for (index_t r = 0; r < m; ++r)
        for (index_t c = 0; c < d; ++c) {
            double acc = 0.0;
            for (index_t k = 0; k < n; ++k)
                acc += static_cast<double>(x(r, k)) * static_cast<double>(y(k, c));
            z(r, c) = static_cast<float>(acc);
        }
    return z;
}

}  // namespace gnnsim
