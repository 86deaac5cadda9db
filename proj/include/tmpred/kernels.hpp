#pragma once

#include <cstddef>
#include <string>

// Data-parallel primitives behind the numeric code paths. Every primitive has
// a scalar reference implementation plus SIMD variants (AVX2 on x86-64, NEON
// on aarch64) selected once at runtime from CPU capabilities. The variants
// are equivalence-tested against the scalar kernels; within one process the
// selected backend is fixed, so results are reproducible run to run.
namespace tmpred::kernels {

enum class Backend { scalar, avx2, neon };

// Currently dispatched backend.
Backend active_backend();
const char* backend_name();

// Force a specific backend; returns false (and leaves dispatch unchanged) if
// it is not supported on this CPU or not compiled in.
bool set_backend(Backend b);

// Restore the auto-detected best backend.
void reset_backend();

// dot product: sum a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum a[i]^2
double sumsq(const double* a, std::size_t n);

// sum (a[i] - b[i])^2
double sumsq_diff(const double* a, const double* b, std::size_t n);

// --- derived operations, composed from the primitives above ---

// y = A x, A row-major rows x cols
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// y += A x
void matvec_acc(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// y += A^T x, A row-major rows x cols, x has rows entries, y has cols entries
void matvec_acc_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// A += alpha * u v^T, A row-major rows x cols
void ger_acc(double alpha, const double* u, std::size_t rows, const double* v, std::size_t cols,
             double* a);

namespace detail {
struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sumsq_diff)(const double*, const double*, std::size_t);
};

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sumsq_scalar(const double* a, std::size_t n);
double sumsq_diff_scalar(const double* a, const double* b, std::size_t n);

#if defined(TMPRED_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sumsq_avx2(const double* a, std::size_t n);
double sumsq_diff_avx2(const double* a, const double* b, std::size_t n);
#endif
}  // namespace detail

}  // namespace tmpred::kernels
