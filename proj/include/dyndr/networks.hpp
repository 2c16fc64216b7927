#pragma once
// Network math in standardized units: forward passes, exact gradients of the
// mean squared error, and weight initialization. Model wrappers that handle
// scaling and feature layouts live in models.hpp.

#include "dyndr/matrix.hpp"
#include "dyndr/params.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dyndr {

// Multi-layer perceptron: ReLU hidden layers, linear scalar output.
class FnnNet {
public:
	FnnNet() = default;
	FnnNet(std::size_t input_dim, std::vector<std::size_t> hidden);

	std::size_t input_dim() const { return input_dim_; }
	const std::vector<std::size_t> &hidden() const { return hidden_; }
	ParamStore &params() { return params_; }
	const ParamStore &params() const { return params_; }

	// Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases.
	void init(std::mt19937_64 &rng);

	double forward(std::span<const double> x) const;

	// MSE over the selected rows; writes d(loss)/d(params) into `grad`
	// (overwritten, same layout as params().values()).
	double loss_and_gradient(const Matrix &inputs, std::span<const double> targets, std::span<const std::size_t> rows,
	                         std::span<double> grad) const;
	double loss(const Matrix &inputs, std::span<const double> targets) const;

	bool operator==(const FnnNet &) const = default;

private:
	void build();

	std::size_t input_dim_ = 0;
	std::vector<std::size_t> hidden_;
	ParamStore params_;
	std::vector<std::size_t> w_ids_;
	std::vector<std::size_t> b_ids_;
	std::size_t w_out_ = 0;
	std::size_t b_out_ = 0;
};

enum class CellKind { rnn, lstm };

// Per-step activations of one recurrent layer.
struct LayerTrace {
	Matrix inputs; // x_t
	Matrix hidden; // h_t
	Matrix cell;   // C_t (LSTM only)
	Matrix gates;  // rnn: tanh output; lstm: [f, i, o, C~] stacked
	Matrix cell_tanh;
};

struct RecurrentTrace {
	std::vector<LayerTrace> layers;
	std::vector<double> outputs;
};

// Stacked vanilla-RNN or LSTM layers with a fully connected scalar head
// applied at every step. States start at zero for each sequence.
//
// LSTM gate tensors are stored in the order f, i, o, C for each of the
// recurrent weights, input weights and biases; because each group is
// contiguous it doubles as one 4H-row matrix for the gate products.
class RecurrentNet {
public:
	RecurrentNet() = default;
	RecurrentNet(CellKind kind, std::size_t input_dim, std::size_t hidden, std::size_t layers);

	CellKind kind() const { return kind_; }
	std::size_t input_dim() const { return input_dim_; }
	std::size_t hidden_size() const { return hidden_; }
	std::size_t layers() const { return layers_; }
	std::size_t gate_count() const { return kind_ == CellKind::lstm ? 4 : 1; }
	ParamStore &params() { return params_; }
	const ParamStore &params() const { return params_; }

	// Uniform +-sqrt(6/(fan_in+fan_out)) per gate matrix, zero biases, forget
	// gate bias +1.
	void init(std::mt19937_64 &rng);

	std::vector<double> forward(const Matrix &steps) const;
	RecurrentTrace trace(const Matrix &steps) const;

	// MSE over every step of every window; gradient by full backpropagation
	// through time within each window.
	double loss_and_gradient(std::span<const Matrix *const> inputs, std::span<const std::vector<double> *const> targets,
	                         std::span<double> grad) const;

	bool operator==(const RecurrentNet &) const = default;

private:
	void build();
	void backward_window(const RecurrentTrace &tr, std::span<const double> targets, double scale,
	                     std::span<double> grad) const;

	CellKind kind_ = CellKind::rnn;
	std::size_t input_dim_ = 0;
	std::size_t hidden_ = 0;
	std::size_t layers_ = 0;
	ParamStore params_;
	// Per layer: first tensor id of the recurrent, input and bias groups.
	std::vector<std::size_t> wh_ids_;
	std::vector<std::size_t> wx_ids_;
	std::vector<std::size_t> b_ids_;
	std::size_t w_out_ = 0;
	std::size_t b_out_ = 0;
};

} // namespace dyndr
