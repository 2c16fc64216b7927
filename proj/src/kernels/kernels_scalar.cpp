#include "dyndr/kernels.hpp"

#include <cmath>

namespace dyndr::kernels {
namespace {

double dot_scalar(const double *x, const double *y, std::size_t n) {
	double s = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		s += x[i] * y[i];
	}
	return s;
}

void axpy_scalar(double a, const double *x, double *y, std::size_t n) {
	for (std::size_t i = 0; i < n; ++i) {
		y[i] += a * x[i];
	}
}

void gemv_scalar(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y) {
	for (std::size_t r = 0; r < rows; ++r) {
		y[r] += dot_scalar(a + r * cols, x, cols);
	}
}

void gemv_t_scalar(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y) {
	for (std::size_t r = 0; r < rows; ++r) {
		axpy_scalar(x[r], a + r * cols, y, cols);
	}
}

void ger_scalar(double *a, std::size_t rows, std::size_t cols, const double *x, const double *y) {
	for (std::size_t r = 0; r < rows; ++r) {
		axpy_scalar(x[r], y, a + r * cols, cols);
	}
}

void adam_scalar(double *theta, const double *grad, double *m, double *v, std::size_t n, double beta1, double beta2,
                 double lr_t, double eps_t) {
	for (std::size_t i = 0; i < n; ++i) {
		m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
		v[i] = beta2 * v[i] + (1.0 - beta2) * (grad[i] * grad[i]);
		theta[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps_t);
	}
}

} // namespace

const KernelTable &scalar_table() {
	static const KernelTable table{Backend::scalar, dot_scalar, axpy_scalar, gemv_scalar,
	                               gemv_t_scalar,   ger_scalar, adam_scalar};
	return table;
}

} // namespace dyndr::kernels
