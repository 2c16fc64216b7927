#include "dyndr/networks.hpp"

#include "dyndr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dyndr {
namespace {

void glorot(std::span<double> w, std::size_t fan_in, std::size_t fan_out, std::mt19937_64 &rng) {
	const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
	std::uniform_real_distribution<double> dist(-limit, limit);
	for (double &x : w) {
		x = dist(rng);
	}
}

inline double sigmoid(double x) {
	return 1.0 / (1.0 + std::exp(-x));
}

std::string layer_suffix(std::size_t l) {
	return "[" + std::to_string(l + 1) + "]";
}

} // namespace

// ---------------------------------------------------------------- FnnNet

FnnNet::FnnNet(std::size_t input_dim, std::vector<std::size_t> hidden) : input_dim_(input_dim), hidden_(std::move(hidden)) {
	if (input_dim_ == 0) {
		throw std::invalid_argument("FnnNet: input dimension must be positive");
	}
	if (hidden_.empty() || std::find(hidden_.begin(), hidden_.end(), 0u) != hidden_.end()) {
		throw std::invalid_argument("FnnNet: need at least one hidden layer, all of positive width");
	}
	build();
}

void FnnNet::build() {
	std::size_t in = input_dim_;
	for (std::size_t l = 0; l < hidden_.size(); ++l) {
		w_ids_.push_back(params_.add("W" + layer_suffix(l), hidden_[l], in));
		b_ids_.push_back(params_.add("b" + layer_suffix(l), hidden_[l], 1));
		in = hidden_[l];
	}
	w_out_ = params_.add("W_out", 1, in);
	b_out_ = params_.add("b_out", 1, 1);
}

void FnnNet::init(std::mt19937_64 &rng) {
	std::fill(params_.values().begin(), params_.values().end(), 0.0);
	for (std::size_t l = 0; l < hidden_.size(); ++l) {
		const auto &t = params_.tensor(w_ids_[l]);
		glorot(params_.get(w_ids_[l]), t.cols, t.rows, rng);
	}
	glorot(params_.get(w_out_), hidden_.back(), 1, rng);
}

double FnnNet::forward(std::span<const double> x) const {
	if (x.size() != input_dim_) {
		throw std::invalid_argument("FnnNet::forward: expected " + std::to_string(input_dim_) + " inputs, got " +
		                            std::to_string(x.size()));
	}
	std::vector<double> a(x.begin(), x.end());
	std::vector<double> z;
	for (std::size_t l = 0; l < hidden_.size(); ++l) {
		const auto b = params_.get(b_ids_[l]);
		z.assign(b.begin(), b.end());
		kernels::gemv(params_.get(w_ids_[l]), hidden_[l], a.size(), a, z);
		for (double &v : z) {
			v = v > 0.0 ? v : 0.0;
		}
		a.swap(z);
	}
	return kernels::dot(params_.get(w_out_), a) + params_.get(b_out_)[0];
}

double FnnNet::loss(const Matrix &inputs, std::span<const double> targets) const {
	double s = 0.0;
	for (std::size_t r = 0; r < inputs.rows(); ++r) {
		const double e = forward(inputs.row(r)) - targets[r];
		s += e * e;
	}
	return s / static_cast<double>(inputs.rows());
}

double FnnNet::loss_and_gradient(const Matrix &inputs, std::span<const double> targets,
                                 std::span<const std::size_t> rows, std::span<double> grad) const {
	if (grad.size() != params_.size()) {
		throw std::invalid_argument("FnnNet: gradient buffer has the wrong size");
	}
	if (inputs.cols() != input_dim_) {
		throw std::invalid_argument("FnnNet: input width mismatch");
	}
	std::fill(grad.begin(), grad.end(), 0.0);
	if (rows.empty()) {
		return 0.0;
	}
	const std::size_t depth = hidden_.size();
	const double inv_m = 1.0 / static_cast<double>(rows.size());

	// acts[0] is the input; acts[l+1] the ReLU output of hidden layer l.
	std::vector<std::vector<double>> acts(depth + 1);
	std::vector<double> delta, prev;
	double total = 0.0;

	for (std::size_t r : rows) {
		const auto x = inputs.row(r);
		acts[0].assign(x.begin(), x.end());
		for (std::size_t l = 0; l < depth; ++l) {
			const auto b = params_.get(b_ids_[l]);
			acts[l + 1].assign(b.begin(), b.end());
			kernels::gemv(params_.get(w_ids_[l]), hidden_[l], acts[l].size(), acts[l], acts[l + 1]);
			for (double &v : acts[l + 1]) {
				v = v > 0.0 ? v : 0.0;
			}
		}
		const double y = kernels::dot(params_.get(w_out_), acts[depth]) + params_.get(b_out_)[0];
		const double err = y - targets[r];
		total += err * err;
		const double dy = 2.0 * err * inv_m;

		kernels::axpy(dy, acts[depth], params_.in(grad, w_out_));
		params_.in(grad, b_out_)[0] += dy;

		// dL/dz for the top hidden layer. A unit whose output is exactly 0
		// (pre-activation <= 0) passes no gradient.
		const auto w_out = params_.get(w_out_);
		delta.resize(hidden_.back());
		for (std::size_t j = 0; j < delta.size(); ++j) {
			delta[j] = acts[depth][j] > 0.0 ? dy * w_out[j] : 0.0;
		}
		for (std::size_t l = depth; l-- > 0;) {
			kernels::ger(params_.in(grad, w_ids_[l]), hidden_[l], acts[l].size(), delta, acts[l]);
			kernels::axpy(1.0, delta, params_.in(grad, b_ids_[l]));
			if (l == 0) {
				break;
			}
			prev.assign(acts[l].size(), 0.0);
			kernels::gemv_t(params_.get(w_ids_[l]), hidden_[l], acts[l].size(), delta, prev);
			for (std::size_t j = 0; j < prev.size(); ++j) {
				if (!(acts[l][j] > 0.0)) {
					prev[j] = 0.0;
				}
			}
			delta.swap(prev);
		}
	}
	return total * inv_m;
}

// ---------------------------------------------------------- RecurrentNet

RecurrentNet::RecurrentNet(CellKind kind, std::size_t input_dim, std::size_t hidden, std::size_t layers)
    : kind_(kind), input_dim_(input_dim), hidden_(hidden), layers_(layers) {
	if (input_dim_ == 0 || hidden_ == 0 || layers_ == 0) {
		throw std::invalid_argument("RecurrentNet: input, hidden and layer counts must be positive");
	}
	build();
}

void RecurrentNet::build() {
	static const char *const gate_names[] = {"f", "i", "o", "C"};
	std::size_t in = input_dim_;
	for (std::size_t l = 0; l < layers_; ++l) {
		const std::string sfx = layer_suffix(l);
		if (kind_ == CellKind::rnn) {
			wh_ids_.push_back(params_.add("W_h" + sfx, hidden_, hidden_));
			wx_ids_.push_back(params_.add("W_x" + sfx, hidden_, in));
			b_ids_.push_back(params_.add("b" + sfx, hidden_, 1));
		} else {
			for (int g = 0; g < 4; ++g) {
				const std::size_t id = params_.add(std::string("W_") + gate_names[g] + "h" + sfx, hidden_, hidden_);
				if (g == 0) {
					wh_ids_.push_back(id);
				}
			}
			for (int g = 0; g < 4; ++g) {
				const std::size_t id = params_.add(std::string("W_") + gate_names[g] + "x" + sfx, hidden_, in);
				if (g == 0) {
					wx_ids_.push_back(id);
				}
			}
			for (int g = 0; g < 4; ++g) {
				const std::size_t id = params_.add(std::string("b_") + gate_names[g] + sfx, hidden_, 1);
				if (g == 0) {
					b_ids_.push_back(id);
				}
			}
		}
		in = hidden_;
	}
	w_out_ = params_.add("W_out", 1, hidden_);
	b_out_ = params_.add("b_out", 1, 1);
}

void RecurrentNet::init(std::mt19937_64 &rng) {
	std::fill(params_.values().begin(), params_.values().end(), 0.0);
	const std::size_t gates = gate_count();
	for (std::size_t l = 0; l < layers_; ++l) {
		for (std::size_t g = 0; g < gates; ++g) {
			const auto &th = params_.tensor(wh_ids_[l] + g);
			glorot(params_.get(wh_ids_[l] + g), th.cols, th.rows, rng);
		}
		for (std::size_t g = 0; g < gates; ++g) {
			const auto &tx = params_.tensor(wx_ids_[l] + g);
			glorot(params_.get(wx_ids_[l] + g), tx.cols, tx.rows, rng);
		}
		if (kind_ == CellKind::lstm) {
			auto bf = params_.get(b_ids_[l]);
			std::fill(bf.begin(), bf.end(), 1.0);
		}
	}
	glorot(params_.get(w_out_), hidden_, 1, rng);
}

RecurrentTrace RecurrentNet::trace(const Matrix &steps) const {
	if (steps.cols() != input_dim_) {
		throw std::invalid_argument("RecurrentNet: expected " + std::to_string(input_dim_) + " inputs per step, got " +
		                            std::to_string(steps.cols()));
	}
	if (steps.rows() == 0) {
		throw std::invalid_argument("RecurrentNet: empty sequence");
	}
	const std::size_t len = steps.rows();
	const std::size_t h = hidden_;
	const std::size_t gates = gate_count();
	const bool lstm = kind_ == CellKind::lstm;

	RecurrentTrace tr;
	tr.layers.resize(layers_);
	std::vector<double> pre(gates * h);
	for (std::size_t l = 0; l < layers_; ++l) {
		LayerTrace &lt = tr.layers[l];
		lt.inputs = l == 0 ? steps : tr.layers[l - 1].hidden;
		const std::size_t in = lt.inputs.cols();
		lt.hidden = Matrix(len, h);
		lt.gates = Matrix(len, gates * h);
		if (lstm) {
			lt.cell = Matrix(len, h);
			lt.cell_tanh = Matrix(len, h);
		}
		// Stacked gate blocks, see class comment.
		const std::span<const double> wh(params_.get(wh_ids_[l]).data(), gates * h * h);
		const std::span<const double> wx(params_.get(wx_ids_[l]).data(), gates * h * in);
		const std::span<const double> b(params_.get(b_ids_[l]).data(), gates * h);
		const std::vector<double> zeros(h, 0.0);

		for (std::size_t t = 0; t < len; ++t) {
			const std::span<const double> h_prev = t == 0 ? std::span<const double>(zeros) : lt.hidden.row(t - 1);
			std::copy(b.begin(), b.end(), pre.begin());
			kernels::gemv(wh, gates * h, h, h_prev, pre);
			kernels::gemv(wx, gates * h, in, lt.inputs.row(t), pre);
			auto g = lt.gates.row(t);
			auto ht = lt.hidden.row(t);
			if (!lstm) {
				for (std::size_t j = 0; j < h; ++j) {
					g[j] = std::tanh(pre[j]);
					ht[j] = g[j];
				}
				continue;
			}
			const std::span<const double> c_prev = t == 0 ? std::span<const double>(zeros) : lt.cell.row(t - 1);
			auto ct = lt.cell.row(t);
			auto tc = lt.cell_tanh.row(t);
			for (std::size_t j = 0; j < h; ++j) {
				const double f = sigmoid(pre[j]);
				const double i = sigmoid(pre[h + j]);
				const double o = sigmoid(pre[2 * h + j]);
				const double cand = std::tanh(pre[3 * h + j]);
				g[j] = f;
				g[h + j] = i;
				g[2 * h + j] = o;
				g[3 * h + j] = cand;
				ct[j] = f * c_prev[j] + i * cand;
				tc[j] = std::tanh(ct[j]);
				ht[j] = o * tc[j];
			}
		}
	}
	const Matrix &top = tr.layers.back().hidden;
	const double bias = params_.get(b_out_)[0];
	tr.outputs.resize(len);
	for (std::size_t t = 0; t < len; ++t) {
		tr.outputs[t] = kernels::dot(params_.get(w_out_), top.row(t)) + bias;
	}
	return tr;
}

std::vector<double> RecurrentNet::forward(const Matrix &steps) const {
	return trace(steps).outputs;
}

void RecurrentNet::backward_window(const RecurrentTrace &tr, std::span<const double> targets, double scale,
                                   std::span<double> grad) const {
	const std::size_t len = tr.outputs.size();
	const std::size_t h = hidden_;
	const std::size_t gates = gate_count();
	const bool lstm = kind_ == CellKind::lstm;

	// Gradient w.r.t. the output of the layer currently being processed.
	Matrix dh_above(len, h);
	const auto w_out = params_.get(w_out_);
	const Matrix &top = tr.layers.back().hidden;
	for (std::size_t t = 0; t < len; ++t) {
		const double dy = 2.0 * (tr.outputs[t] - targets[t]) * scale;
		kernels::axpy(dy, top.row(t), params_.in(grad, w_out_));
		params_.in(grad, b_out_)[0] += dy;
		kernels::axpy(dy, w_out, dh_above.row(t));
	}

	std::vector<double> dh(h), dh_next(h), dc(h), dc_next(h), dpre(gates * h);
	const std::vector<double> zeros(h, 0.0);
	for (std::size_t l = layers_; l-- > 0;) {
		const LayerTrace &lt = tr.layers[l];
		const std::size_t in = lt.inputs.cols();
		const std::span<const double> wh(params_.get(wh_ids_[l]).data(), gates * h * h);
		const std::span<const double> wx(params_.get(wx_ids_[l]).data(), gates * h * in);
		const std::span<double> g_wh = grad.subspan(params_.tensor(wh_ids_[l]).offset, gates * h * h);
		const std::span<double> g_wx = grad.subspan(params_.tensor(wx_ids_[l]).offset, gates * h * in);
		const std::span<double> g_b = grad.subspan(params_.tensor(b_ids_[l]).offset, gates * h);
		Matrix dx(l > 0 ? len : 0, in);

		std::fill(dh_next.begin(), dh_next.end(), 0.0);
		std::fill(dc_next.begin(), dc_next.end(), 0.0);
		for (std::size_t t = len; t-- > 0;) {
			const auto up = dh_above.row(t);
			for (std::size_t j = 0; j < h; ++j) {
				dh[j] = up[j] + dh_next[j];
			}
			const auto g = lt.gates.row(t);
			if (!lstm) {
				for (std::size_t j = 0; j < h; ++j) {
					dpre[j] = dh[j] * (1.0 - g[j] * g[j]);
				}
			} else {
				const auto tc = lt.cell_tanh.row(t);
				const std::span<const double> c_prev = t == 0 ? std::span<const double>(zeros) : lt.cell.row(t - 1);
				for (std::size_t j = 0; j < h; ++j) {
					const double f = g[j], i = g[h + j], o = g[2 * h + j], cand = g[3 * h + j];
					const double d_o = dh[j] * tc[j];
					dc[j] = dh[j] * o * (1.0 - tc[j] * tc[j]) + dc_next[j];
					const double d_f = dc[j] * c_prev[j];
					const double d_i = dc[j] * cand;
					const double d_cand = dc[j] * i;
					dc_next[j] = dc[j] * f;
					dpre[j] = d_f * f * (1.0 - f);
					dpre[h + j] = d_i * i * (1.0 - i);
					dpre[2 * h + j] = d_o * o * (1.0 - o);
					dpre[3 * h + j] = d_cand * (1.0 - cand * cand);
				}
			}
			if (t > 0) {
				kernels::ger(g_wh, gates * h, h, dpre, lt.hidden.row(t - 1));
			}
			kernels::ger(g_wx, gates * h, in, dpre, lt.inputs.row(t));
			kernels::axpy(1.0, dpre, g_b);

			std::fill(dh_next.begin(), dh_next.end(), 0.0);
			if (t > 0) {
				kernels::gemv_t(wh, gates * h, h, dpre, dh_next);
			}
			if (l > 0) {
				kernels::gemv_t(wx, gates * h, in, dpre, dx.row(t));
			}
		}
		if (l > 0) {
			dh_above = std::move(dx);
		}
	}
}

double RecurrentNet::loss_and_gradient(std::span<const Matrix *const> inputs,
                                       std::span<const std::vector<double> *const> targets,
                                       std::span<double> grad) const {
	if (grad.size() != params_.size()) {
		throw std::invalid_argument("RecurrentNet: gradient buffer has the wrong size");
	}
	if (inputs.size() != targets.size()) {
		throw std::invalid_argument("RecurrentNet: input and target window counts differ");
	}
	std::fill(grad.begin(), grad.end(), 0.0);
	std::size_t total_steps = 0;
	for (std::size_t w = 0; w < inputs.size(); ++w) {
		if (targets[w]->size() != inputs[w]->rows()) {
			throw std::invalid_argument("RecurrentNet: window target length mismatch");
		}
		total_steps += inputs[w]->rows();
	}
	if (total_steps == 0) {
		return 0.0;
	}
	const double scale = 1.0 / static_cast<double>(total_steps);
	double total = 0.0;
	for (std::size_t w = 0; w < inputs.size(); ++w) {
		const RecurrentTrace tr = trace(*inputs[w]);
		for (std::size_t t = 0; t < tr.outputs.size(); ++t) {
			const double e = tr.outputs[t] - (*targets[w])[t];
			total += e * e;
		}
		backward_window(tr, *targets[w], scale, grad);
	}
	return total * scale;
}

} // namespace dyndr
