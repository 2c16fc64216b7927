#pragma once

#include "dyndr/matrix.hpp"

#include <span>
#include <vector>

namespace dyndr {

struct LeastSquaresSolution {
	std::vector<double> coef;
	std::size_t rank = 0;
	// Columns (original indices) found linearly dependent on the others.
	// Their coefficients are left at zero.
	std::vector<std::size_t> dependent_columns;
	double residual_norm = 0.0;
};

// min ||A x - b||_2 via Householder QR with column pivoting. A column is
// declared dependent when its pivot falls below rcond times the first pivot.
LeastSquaresSolution least_squares(const Matrix &a, std::span<const double> b, double rcond = 1e-10);

} // namespace dyndr
