#pragma once
// Dense double-precision kernels used by the network inner loops.
//
// Every kernel has a portable scalar reference version and, on x86-64, an
// AVX2+FMA version. The active table is chosen once at startup from the CPU
// feature bits and can be overridden (tests pin the scalar path to compare
// the two). All matrices are row-major and contiguous.

#include <cstddef>
#include <span>
#include <string_view>

namespace dyndr::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
	Backend backend;
	// sum_i x[i] * y[i]
	double (*dot)(const double *x, const double *y, std::size_t n);
	// y += a * x
	void (*axpy)(double a, const double *x, double *y, std::size_t n);
	// y += A x, A is rows x cols
	void (*gemv)(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y);
	// y += A^T x, A is rows x cols, x has rows entries, y has cols entries
	void (*gemv_t)(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y);
	// A += x y^T
	void (*ger)(double *a, std::size_t rows, std::size_t cols, const double *x, const double *y);
	// One Adam update over a flat parameter vector. lr_t already folds in the
	// bias corrections: theta -= lr_t * m / (sqrt(v) + eps_t).
	void (*adam)(double *theta, const double *grad, double *m, double *v, std::size_t n, double beta1, double beta2,
	             double lr_t, double eps_t);
};

const KernelTable &scalar_table();
// nullptr when the build or the CPU does not support AVX2+FMA.
const KernelTable *avx2_table();

bool backend_available(Backend b);
Backend best_backend();
const KernelTable &active();
// Throws std::invalid_argument if the backend is unavailable on this machine.
void set_backend(Backend b);
std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view name);

inline double dot(std::span<const double> x, std::span<const double> y) {
	return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
	active().axpy(a, x.data(), y.data(), x.size());
}
inline void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                 std::span<double> y) {
	active().gemv(a.data(), rows, cols, x.data(), y.data());
}
inline void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                   std::span<double> y) {
	active().gemv_t(a.data(), rows, cols, x.data(), y.data());
}
inline void ger(std::span<double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                std::span<const double> y) {
	active().ger(a.data(), rows, cols, x.data(), y.data());
}

} // namespace dyndr::kernels
