#include "dyndr/lstsq.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dyndr {

LeastSquaresSolution least_squares(const Matrix &a, std::span<const double> b, double rcond) {
	const std::size_t m = a.rows();
	const std::size_t n = a.cols();
	if (b.size() != m) {
		throw std::invalid_argument("least_squares: right-hand side length does not match rows");
	}
	if (m < n) {
		throw std::invalid_argument("least_squares: fewer rows than columns");
	}

	// Work column-major: each column is contiguous for the reflector updates.
	std::vector<std::vector<double>> cols(n, std::vector<double>(m));
	for (std::size_t r = 0; r < m; ++r) {
		for (std::size_t c = 0; c < n; ++c) {
			cols[c][r] = a(r, c);
		}
	}
	std::vector<double> rhs(b.begin(), b.end());
	std::vector<std::size_t> perm(n);
	std::iota(perm.begin(), perm.end(), std::size_t{0});
	std::vector<double> norms(n);
	for (std::size_t c = 0; c < n; ++c) {
		norms[c] = std::inner_product(cols[c].begin(), cols[c].end(), cols[c].begin(), 0.0);
	}

	std::vector<double> diag(n, 0.0);
	double first_pivot = 0.0;
	std::size_t rank = n;
	for (std::size_t k = 0; k < n; ++k) {
		// Pivot: remaining column with the largest trailing norm. Norms are
		// recomputed rather than downdated; n is tiny here.
		std::size_t best = k;
		double best_norm = -1.0;
		for (std::size_t c = k; c < n; ++c) {
			double s = 0.0;
			for (std::size_t r = k; r < m; ++r) {
				s += cols[c][r] * cols[c][r];
			}
			norms[c] = s;
			if (s > best_norm) {
				best_norm = s;
				best = c;
			}
		}
		std::swap(cols[k], cols[best]);
		std::swap(perm[k], perm[best]);

		const double alpha_norm = std::sqrt(best_norm);
		if (k == 0) {
			first_pivot = alpha_norm;
		}
		if (alpha_norm <= rcond * first_pivot || alpha_norm == 0.0) {
			rank = k;
			break;
		}

		auto &v = cols[k];
		const double alpha = v[k] > 0.0 ? -alpha_norm : alpha_norm;
		v[k] -= alpha;
		double vnorm2 = 0.0;
		for (std::size_t r = k; r < m; ++r) {
			vnorm2 += v[r] * v[r];
		}
		diag[k] = alpha;
		if (vnorm2 > 0.0) {
			const auto reflect = [&](std::vector<double> &x) {
				double s = 0.0;
				for (std::size_t r = k; r < m; ++r) {
					s += v[r] * x[r];
				}
				s = 2.0 * s / vnorm2;
				for (std::size_t r = k; r < m; ++r) {
					x[r] -= s * v[r];
				}
			};
			for (std::size_t c = k + 1; c < n; ++c) {
				reflect(cols[c]);
			}
			reflect(rhs);
		}
	}

	LeastSquaresSolution out;
	out.rank = rank;
	out.coef.assign(n, 0.0);
	// Back substitution on the leading rank x rank block of R.
	std::vector<double> z(rank, 0.0);
	for (std::size_t i = rank; i-- > 0;) {
		double s = rhs[i];
		for (std::size_t j = i + 1; j < rank; ++j) {
			s -= cols[j][i] * z[j];
		}
		z[i] = s / diag[i];
	}
	for (std::size_t i = 0; i < rank; ++i) {
		out.coef[perm[i]] = z[i];
	}
	for (std::size_t i = rank; i < n; ++i) {
		out.dependent_columns.push_back(perm[i]);
	}
	std::sort(out.dependent_columns.begin(), out.dependent_columns.end());

	double res = 0.0;
	for (std::size_t r = 0; r < m; ++r) {
		double fit = 0.0;
		for (std::size_t c = 0; c < n; ++c) {
			fit += a(r, c) * out.coef[c];
		}
		res += (fit - b[r]) * (fit - b[r]);
	}
	out.residual_norm = std::sqrt(res);
	return out;
}

} // namespace dyndr
