#include "dyndr/adam.hpp"

#include "dyndr/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace dyndr {

Adam::Adam(std::size_t n, AdamConfig cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {
	if (!(cfg.learning_rate > 0.0) || !(cfg.epsilon > 0.0) || !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
	    !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
		throw std::invalid_argument("Adam: invalid hyperparameters");
	}
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
	if (params.size() != m_.size() || grad.size() != m_.size()) {
		throw std::invalid_argument("Adam: parameter count changed");
	}
	++t_;
	const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
	const double bc2 = std::sqrt(1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
	// lr * m_hat / (sqrt(v_hat) + eps) rewritten on the raw moments.
	const double lr_t = cfg_.learning_rate * bc2 / bc1;
	const double eps_t = cfg_.epsilon * bc2;
	kernels::active().adam(params.data(), grad.data(), m_.data(), v_.data(), m_.size(), cfg_.beta1, cfg_.beta2, lr_t,
	                       eps_t);
}

double clip_global_norm(std::span<double> grad, double max_norm) {
	const double norm = std::sqrt(kernels::dot(grad, grad));
	if (norm > max_norm && norm > 0.0) {
		const double s = max_norm / norm;
		for (double &g : grad) {
			g *= s;
		}
	}
	return norm;
}

} // namespace dyndr
