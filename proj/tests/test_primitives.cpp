#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

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

void check_close(const DenseMatrix& a, const DenseMatrix& b, double rel = 1e-5) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    for (index_t r = 0; r < a.rows(); ++r)
        for (index_t c = 0; c < a.cols(); ++c) {
            const double x = a(r, c), y = b(r, c);
            REQUIRE(std::abs(x - y) <= rel * std::max(1.0, std::abs(y)));
        }
}

}  // namespace

TEST_CASE("gemm hand values and counters") {
    DenseMatrix x(2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
    DenseMatrix y(2, 2, {5.0f, 6.0f, 7.0f, 8.0f});
    auto [z, c] = gemm(x, y);
    CHECK(z(0, 0) == 19.0f);
    CHECK(z(0, 1) == 22.0f);
    CHECK(z(1, 0) == 43.0f);
    CHECK(z(1, 1) == 50.0f);
    CHECK(c.macs == 8);                   // m*n*d
    CHECK(c.elements_loaded_left == 4);   // m*n
    CHECK(c.elements_loaded_right == 4);  // n*d
    CHECK(c.elements_stored == 4);        // m*d
}

TEST_CASE("spdmm hand values and counters") {
    // X = [[1,0],[2,3]] sparse, Y dense
    SparseMatrix x(2, 2, {{0, 0, 1.0f}, {1, 0, 2.0f}, {1, 1, 3.0f}});
    DenseMatrix y(2, 2, {5.0f, 6.0f, 7.0f, 8.0f});
    auto [z, c] = spdmm(x, y);
    CHECK(z(0, 0) == 5.0f);
    CHECK(z(0, 1) == 6.0f);
    CHECK(z(1, 0) == 31.0f);
    CHECK(z(1, 1) == 36.0f);
    CHECK(c.macs == 6);                   // nnz * d
    CHECK(c.elements_loaded_left == 3);   // nnz
    CHECK(c.elements_loaded_right == 6);  // nnz * d dense rows gathered
    CHECK(c.elements_stored == 4);        // m*d
}

TEST_CASE("spmm hand values, exact pair count") {
    // X = [[1,0],[2,3]], Y = [[0,4],[5,0]]
    SparseMatrix x(2, 2, {{0, 0, 1.0f}, {1, 0, 2.0f}, {1, 1, 3.0f}});
    SparseMatrix y(2, 2, {{0, 1, 4.0f}, {1, 0, 5.0f}});
    auto [z, c] = spmm(x, y);
    DenseMatrix zd = to_dense(z);
    CHECK(zd(0, 0) == 0.0f);
    CHECK(zd(0, 1) == 4.0f);
    CHECK(zd(1, 0) == 15.0f);
    CHECK(zd(1, 1) == 8.0f);
    // row 0 of X meets nnz(Y row 0)=1; row 1 meets 1 + 1
    CHECK(c.macs == 3);
    CHECK(c.elements_loaded_left == 3);
    CHECK(c.elements_loaded_right == 3);  // one Y value per meeting pair
    CHECK(c.elements_stored == 3);        // output nonzeros
}

TEST_CASE("spmm drops exact cancellation zeros") {
    SparseMatrix x(1, 2, {{0, 0, 1.0f}, {0, 1, 1.0f}});
    SparseMatrix y(2, 1, {{0, 0, 1.0f}, {1, 0, -1.0f}});
    auto [z, c] = spmm(x, y);
    CHECK(z.nnz() == 0);
    CHECK(c.macs == 2);
    CHECK(c.elements_stored == 0);
}

TEST_CASE("kernels agree with the serial reference") {
    Rng rng(7);
    const double densities[] = {0.01, 0.1, 0.5, 1.0};
    for (int iter = 0; iter < 50; ++iter) {
        const index_t m = 1 + static_cast<index_t>(rng.uniform_index(64));
        const index_t n = 1 + static_cast<index_t>(rng.uniform_index(64));
        const index_t d = 1 + static_cast<index_t>(rng.uniform_index(64));
        const double ax = densities[rng.uniform_index(4)];
        const double ay = densities[rng.uniform_index(4)];

        DenseMatrix x = random_dense(m, n, ax, rng);
        DenseMatrix y = random_dense(n, d, ay, rng);
        DenseMatrix ref = reference_matmul(x, y);

        check_close(gemm(x, y).first, ref);
        check_close(spdmm(to_sparse(x), y).first, ref);
        check_close(to_dense(spmm(to_sparse(x), to_sparse(y)).first), ref);
    }
}

#ifdef _OPENMP
TEST_CASE("results are bitwise identical across thread counts") {
    Rng rng(11);
    DenseMatrix x = random_dense(97, 83, 0.3, rng);
    DenseMatrix y = random_dense(83, 41, 0.7, rng);
    SparseMatrix xs = to_sparse(x);
    SparseMatrix ys = to_sparse(y);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    DenseMatrix g1 = gemm(x, y).first;
    DenseMatrix s1 = spdmm(xs, y).first;
    SparseMatrix p1 = spmm(xs, ys).first;
    omp_set_num_threads(4);
    DenseMatrix g4 = gemm(x, y).first;
    DenseMatrix s4 = spdmm(xs, y).first;
    SparseMatrix p4 = spmm(xs, ys).first;
    omp_set_num_threads(saved);

    CHECK(g1.values() == g4.values());
    CHECK(s1.values() == s4.values());
    REQUIRE(p1.nnz() == p4.nnz());
    for (count_t k = 0; k < p1.nnz(); ++k) {
        CHECK(p1.entries()[k].row == p4.entries()[k].row);
        CHECK(p1.entries()[k].col == p4.entries()[k].col);
        CHECK(p1.entries()[k].value == p4.entries()[k].value);
    }
}
#endif

TEST_CASE("dimension mismatches throw") {
    DenseMatrix x(2, 3, {1, 2, 3, 4, 5, 6});
    DenseMatrix y(2, 2, {1, 2, 3, 4});
    CHECK_THROWS_AS(gemm(x, y), std::invalid_argument);
    CHECK_THROWS_AS(spdmm(to_sparse(x), y), std::invalid_argument);
    CHECK_THROWS_AS(spmm(to_sparse(x), to_sparse(y)), std::invalid_argument);
    CHECK_THROWS_AS(reference_matmul(x, y), std::invalid_argument);
}
