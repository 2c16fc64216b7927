#pragma once
// Demand-response model representations (linear, FNN, RNN, LSTM), training
// and prediction in physical units.

#include "dyndr/adam.hpp"
#include "dyndr/euc_sim.hpp"
#include "dyndr/features.hpp"
#include "dyndr/networks.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dyndr {

enum class ModelKind { linear, fnn, rnn, lstm };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view name);
inline bool is_recurrent(ModelKind k) {
	return k == ModelKind::rnn || k == ModelKind::lstm;
}

// Affine map in standardized units: z = w . x_std + b.
struct LinearModel {
	std::vector<double> weights;
	double bias = 0.0;
	FeatureLayout layout;
	Scaler scaler;

	// Coefficients and intercept on raw (unscaled) features and MWh.
	std::pair<std::vector<double>, double> raw_coefficients() const;
	bool operator==(const LinearModel &) const = default;
};

struct FnnModel {
	FnnNet net;
	FeatureLayout layout;
	Scaler scaler;
	bool operator==(const FnnModel &) const = default;
};

// Steps fed through the network before the predicted interval; zero state at
// the start of the warm-up.
inline constexpr std::size_t kDefaultWarmup = 24;

struct RnnModel {
	RecurrentNet net;
	FeatureLayout layout;
	Scaler scaler;
	std::size_t warmup = kDefaultWarmup;
	bool operator==(const RnnModel &) const = default;
};

struct LstmModel {
	RecurrentNet net;
	FeatureLayout layout;
	Scaler scaler;
	std::size_t warmup = kDefaultWarmup;
	bool operator==(const LstmModel &) const = default;
};

using Model = std::variant<LinearModel, FnnModel, RnnModel, LstmModel>;

ModelKind kind_of(const Model &m);
const FeatureLayout &layout_of(const Model &m);
const Scaler &scaler_of(const Model &m);
// Intervals of history required before the first predictable interval.
std::size_t history_needed(const Model &m);

struct TrainConfig {
	double learning_rate = 0.001;
	long steps = 10000;
	std::size_t batch_size = 32;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
	std::uint64_t rng_seed = 0;
	double gradient_clip_norm = 5.0; // recurrent training only

	void validate() const;
	AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
};

template <class M>
struct Trained {
	M model;
	// Minibatch loss at every optimizer step (standardized units).
	std::vector<double> loss_curve;
	// Full training-set loss before the first and after the last step.
	double initial_loss = 0.0;
	double final_loss = 0.0;
};

// Exact least squares on [standardized features, 1]. Throws DataError naming
// linearly dependent columns.
LinearModel linear_fit(const SupervisedSet &set);

Trained<FnnModel> train_fnn(const SupervisedSet &set, const std::vector<std::size_t> &hidden, const TrainConfig &cfg);

struct RecurrentArch {
	std::size_t hidden = 32;
	std::size_t layers = 1;
};

Trained<Model> train_recurrent(const SequenceSet &set, ModelKind kind, const RecurrentArch &arch,
                               const TrainConfig &cfg);

// Forward passes on raw feature rows, returning MWh.
double fnn_forward(const FnnModel &model, std::span<const double> features);
double linear_forward(const LinearModel &model, std::span<const double> features);
// One prediction per row of the window; state starts at zero.
std::vector<double> rnn_forward(const RnnModel &model, const Matrix &window);
std::vector<double> lstm_forward(const LstmModel &model, const Matrix &window);

// Prediction for interval t from history[0..t-1] and the posted price.
// Entries of `history` at index >= t are ignored.
double predict_one_step(const Model &model, const TimeSeriesDataset &history, double price, std::size_t t);

// One-step predictions for every t in [begin, end) using true history.
std::vector<double> predict_range(const Model &model, const TimeSeriesDataset &data, std::size_t begin,
                                  std::size_t end);

// Multi-step prediction from the end of `history`. Each predicted
// consumption is fed back as the lagged input, unless `teacher` supplies the
// observed values to use instead.
std::vector<double> rollout(const Model &model, const TimeSeriesDataset &history,
                            std::span<const double> future_prices,
                            std::optional<std::span<const double>> teacher = std::nullopt);

// Largest relative deviation between analytic gradients and central finite
// differences over every parameter. Entries smaller than 1e-7 in magnitude
// contribute their absolute difference instead.
double gradient_check(const FnnNet &net, const Matrix &inputs, std::span<const double> targets, double step = 1e-5);
double gradient_check(const RecurrentNet &net, std::span<const Matrix> windows,
                      std::span<const std::vector<double>> targets, double step = 1e-5);

// Model document (JSON, schema version 1).
inline constexpr int kModelSchemaVersion = 1;
std::string model_to_json(const Model &model);
Model model_from_json(std::string_view text);
void save_model(const Model &model, const std::filesystem::path &path);
Model load_model(const std::filesystem::path &path);

} // namespace dyndr
