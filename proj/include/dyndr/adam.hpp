#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dyndr {

struct AdamConfig {
	double learning_rate = 0.001;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
};

// Adam with bias-corrected moment estimates.
class Adam {
public:
	Adam(std::size_t n, AdamConfig cfg);

	void step(std::span<double> params, std::span<const double> grad);
	long steps_taken() const { return t_; }

private:
	AdamConfig cfg_;
	std::vector<double> m_;
	std::vector<double> v_;
	long t_ = 0;
};

// Rescales `grad` so its L2 norm is at most max_norm. Returns the norm
// before clipping.
double clip_global_norm(std::span<double> grad, double max_norm);

} // namespace dyndr
