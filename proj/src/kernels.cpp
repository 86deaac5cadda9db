#include "tmpred/kernels.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)
#define TMPRED_HAVE_NEON 1
#include <arm_neon.h>
#endif

namespace tmpred::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
    }
    if (i < n) s0 += a[i] * b[i];
    return s0 + s1;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sumsq_scalar(const double* a, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        s0 += a[i] * a[i];
        s1 += a[i + 1] * a[i + 1];
    }
    if (i < n) s0 += a[i] * a[i];
    return s0 + s1;
}

double sumsq_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        double d0 = a[i] - b[i];
        double d1 = a[i + 1] - b[i + 1];
        s0 += d0 * d0;
        s1 += d1 * d1;
    }
    if (i < n) {
        double d = a[i] - b[i];
        s0 += d * d;
    }
    return s0 + s1;
}

#if defined(TMPRED_HAVE_NEON)

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
        vst1q_f64(y + i + 2, vfmaq_f64(vld1q_f64(y + i + 2), va, vld1q_f64(x + i + 2)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sumsq_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

double sumsq_diff_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

#endif  // TMPRED_HAVE_NEON

namespace {

const KernelTable kScalarTable{dot_scalar, axpy_scalar, sumsq_scalar, sumsq_diff_scalar};

#if defined(TMPRED_HAVE_AVX2_TU)
const KernelTable kAvx2Table{dot_avx2, axpy_avx2, sumsq_avx2, sumsq_diff_avx2};
#endif
#if defined(TMPRED_HAVE_NEON)
const KernelTable kNeonTable{dot_neon, axpy_neon, sumsq_neon, sumsq_diff_neon};
#endif

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(TMPRED_HAVE_AVX2_TU)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(TMPRED_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &kScalarTable;
#if defined(TMPRED_HAVE_AVX2_TU)
        case Backend::avx2:
            return &kAvx2Table;
#endif
#if defined(TMPRED_HAVE_NEON)
        case Backend::neon:
            return &kNeonTable;
#endif
        default:
            return &kScalarTable;
    }
}

Backend detect_best() {
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

struct Dispatch {
    Backend backend;
    const KernelTable* table;
    Dispatch() : backend(detect_best()), table(table_for(backend)) {}
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace
}  // namespace detail

Backend active_backend() { return detail::dispatch().backend; }

const char* backend_name() {
    switch (active_backend()) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "scalar";
}

bool set_backend(Backend b) {
    if (!detail::backend_supported(b)) return false;
    detail::dispatch().backend = b;
    detail::dispatch().table = detail::table_for(b);
    return true;
}

void reset_backend() { set_backend(detail::detect_best()); }

double dot(const double* a, const double* b, std::size_t n) {
    return detail::dispatch().table->dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    detail::dispatch().table->axpy(alpha, x, y, n);
}

double sumsq(const double* a, std::size_t n) { return detail::dispatch().table->sumsq(a, n); }

double sumsq_diff(const double* a, const double* b, std::size_t n) {
    return detail::dispatch().table->sumsq_diff(a, b, n);
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void matvec_acc(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot(a + r * cols, x, cols);
}

void matvec_acc_t(const double* a, std::size_t rows, std::size_t cols, const double* x,
                  double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        if (x[r] != 0.0) axpy(x[r], a + r * cols, y, cols);
    }
}

void ger_acc(double alpha, const double* u, std::size_t rows, const double* v, std::size_t cols,
             double* a) {
    for (std::size_t r = 0; r < rows; ++r) {
        double f = alpha * u[r];
        if (f != 0.0) axpy(f, v, a + r * cols, cols);
    }
}

}  // namespace tmpred::kernels
