// Compares the OpenMP kernels against the serial reference on matched inputs.
#include <chrono>
#include <cstdio>
#include <vector>

#include "gnnsim/matrices.hpp"
#include "gnnsim/primitives.hpp"
#include "gnnsim/rng.hpp"

using namespace gnnsim;

namespace {

DenseMatrix random_dense(index_t r, index_t c, double density, Rng& rng) {
    DenseMatrix m(r, c);
    for (float& v : m.values())
        if (rng.uniform() < density) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    return m;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e30;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    Rng rng(42);
    const index_t m = 1024, n = 1024, d = 128;
    const double densities[] = {0.01, 0.1, 1.0};

    std::printf("%-8s %-8s %12s %12s %8s\n", "kernel", "density", "parallel_ms",
                "serial_ms", "speedup");
    for (double alpha : densities) {
        DenseMatrix x = random_dense(m, n, alpha, rng);
        DenseMatrix y = random_dense(n, d, 1.0, rng);
        SparseMatrix xs = to_sparse(x);

        double t_ref = time_best_of(3, [&] { reference_matmul(x, y); });

        double t_gemm = time_best_of(3, [&] { gemm(x, y); });
        std::printf("%-8s %-8.2f %12.3f %12.3f %8.2f\n", "gemm", alpha, t_gemm * 1e3,
                    t_ref * 1e3, t_ref / t_gemm);

        double t_spdmm = time_best_of(3, [&] { spdmm(xs, y); });
        std::printf("%-8s %-8.2f %12.3f %12.3f %8.2f\n", "spdmm", alpha, t_spdmm * 1e3,
                    t_ref * 1e3, t_ref / t_spdmm);

        DenseMatrix y_sparse = random_dense(n, d, alpha, rng);
        SparseMatrix ys = to_sparse(y_sparse);
        double t_ref2 = time_best_of(3, [&] { reference_matmul(x, y_sparse); });
        double t_spmm = time_best_of(3, [&] { spmm(xs, ys); });
        std::printf("%-8s %-8.2f %12.3f %12.3f %8.2f\n", "spmm", alpha, t_spmm * 1e3,
                    t_ref2 * 1e3, t_ref2 / t_spmm);
    }
    return 0;
}
