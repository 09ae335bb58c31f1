// Kernel benchmark: OpenMP versions against the serial reference.
// Also verifies that both produce bit-identical output.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ccgc/rng.hpp"
#include "ccgc/tensor.hpp"

using namespace ccgc;

namespace {

DenseMatrix random_dense(Rng& rng, std::size_t r, std::size_t c) {
    DenseMatrix m(r, c);
    for (double& x : m.data) x = rng.uniform(-1.0, 1.0);
    return m;
}

SparseSymMatrix random_sparse(Rng& rng, std::size_t n, double density) {
    std::vector<SparseSymMatrix::Entry> t;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (rng.uniform() < density) t.push_back({i, j, rng.uniform(-1.0, 1.0)});
    return SparseSymMatrix::from_triplets(n, t);
}

double time_of(const std::function<DenseMatrix()>& fn, DenseMatrix& out, int reps) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        out = fn();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s < best) best = s;
    }
    return best;
}

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

void report(const char* kernel, std::size_t n, double serial, double parallel,
            bool identical) {
    std::printf("%-16s n=%-6zu serial %8.4fs  parallel %8.4fs  speedup %5.2fx  %s\n",
                kernel, n, serial, parallel, serial / parallel,
                identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string_view(argv[1]) == "--quick";
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel == serial\n");
#endif

    Rng rng(1234);
    const std::vector<std::size_t> sizes = quick ? std::vector<std::size_t>{128}
                                                 : std::vector<std::size_t>{256, 512, 1024};
    const int reps = quick ? 2 : 3;
    bool all_identical = true;

    for (std::size_t n : sizes) {
        const DenseMatrix a = random_dense(rng, n, n);
        const DenseMatrix b = random_dense(rng, n, n);
        DenseMatrix rs, rp;
        const double ts = time_of([&] { return ref::matmul(a, b); }, rs, reps);
        const double tp = time_of([&] { return matmul(a, b); }, rp, reps);
        const bool same = bit_equal(rs, rp);
        all_identical = all_identical && same;
        report("matmul", n, ts, tp, same);
    }

    for (std::size_t n : sizes) {
        const SparseSymMatrix s = random_sparse(rng, n, 0.02);
        const DenseMatrix x = random_dense(rng, n, 64);
        DenseMatrix rs, rp;
        const double ts = time_of([&] { return ref::spmm(s, x); }, rs, reps);
        const double tp = time_of([&] { return spmm(s, x); }, rp, reps);
        const bool same = bit_equal(rs, rp);
        all_identical = all_identical && same;
        report("spmm", n, ts, tp, same);
    }

    for (std::size_t n : sizes) {
        const DenseMatrix x = random_dense(rng, n * 8, 512);
        DenseMatrix rs, rp;
        const double ts = time_of([&] { return ref::row_l2_normalize(x); }, rs, reps);
        const double tp = time_of([&] { return row_l2_normalize(x); }, rp, reps);
        const bool same = bit_equal(rs, rp);
        all_identical = all_identical && same;
        report("row_l2_norm", n * 8, ts, tp, same);
    }

    return all_identical ? 0 : 1;
}
