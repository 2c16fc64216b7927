#include "dyndr/models.hpp"

#include "dyndr/error.hpp"
#include "dyndr/kernels.hpp"
#include "dyndr/lstsq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace dyndr {
namespace {

// Epoch-wise shuffled minibatches; a tail shorter than the batch starts a new
// epoch instead of producing a small batch.
class BatchSampler {
public:
	BatchSampler(std::size_t n, std::size_t batch, std::mt19937_64 &rng)
	    : order_(n), batch_(std::min(batch, n)), pos_(n), rng_(rng) {
		std::iota(order_.begin(), order_.end(), std::size_t{0});
	}

	std::span<const std::size_t> next() {
		if (pos_ + batch_ > order_.size()) {
			std::shuffle(order_.begin(), order_.end(), rng_);
			pos_ = 0;
		}
		const std::span<const std::size_t> out(order_.data() + pos_, batch_);
		pos_ += batch_;
		return out;
	}

private:
	std::vector<std::size_t> order_;
	std::size_t batch_;
	std::size_t pos_;
	std::mt19937_64 &rng_;
};

void check_finite(double loss, long step) {
	if (!std::isfinite(loss)) {
		throw NumericalError("training loss became non-finite at step " + std::to_string(step), step);
	}
}

int hour_at(const TimeSeriesDataset &history, std::size_t t, int intervals_per_day) {
	if (t < history.hours.size()) {
		return history.hours[t];
	}
	if (t == 0 || history.hours.empty()) {
		return static_cast<int>(t % static_cast<std::size_t>(intervals_per_day));
	}
	// Continue the clock from the last known label.
	const std::size_t last = history.hours.size() - 1;
	return static_cast<int>((static_cast<std::size_t>(history.hours[last]) + (t - last)) %
	                        static_cast<std::size_t>(intervals_per_day));
}

template <class M>
double predict_recurrent(const M &model, const TimeSeriesDataset &history, double price, std::size_t t) {
	const std::size_t warm = model.warmup;
	if (t < warm + 1) {
		throw DataError("insufficient history: recurrent prediction at t=" + std::to_string(t) + " needs " +
		                std::to_string(warm + 1) + " earlier intervals");
	}
	const StateConfig &cfg = model.layout.state;
	const std::size_t width = model.layout.width();
	Matrix steps(warm + 1, width);
	std::vector<double> raw(width);
	for (std::size_t s = t - warm; s <= t; ++s) {
		const double p = s == t ? price : history.prices[s];
		fill_state_row(history.prices, history.consumptions, s, hour_at(history, s, cfg.intervals_per_day), p, cfg,
		               raw);
		model.scaler.apply_row(raw, steps.row(s - (t - warm)));
	}
	return model.scaler.invert_target(model.net.forward(steps).back());
}

template <class M>
std::vector<double> recurrent_window(const M &model, const Matrix &window) {
	if (window.cols() != model.layout.width()) {
		throw std::invalid_argument("recurrent forward: window width " + std::to_string(window.cols()) +
		                            " does not match layout width " + std::to_string(model.layout.width()));
	}
	Matrix z(window.rows(), window.cols());
	for (std::size_t r = 0; r < window.rows(); ++r) {
		model.scaler.apply_row(window.row(r), z.row(r));
	}
	std::vector<double> out = model.net.forward(z);
	for (double &y : out) {
		y = model.scaler.invert_target(y);
	}
	return out;
}

double relative_gradient_error(std::span<const double> analytic, std::span<const double> numeric) {
	// Below this magnitude a gradient entry is compared by absolute
	// difference: central differences at step 1e-5 carry roundoff of about
	// 1e-11 times the loss, which would dominate a relative measure there.
	constexpr double kFloor = 1e-7;
	double worst = 0.0;
	for (std::size_t i = 0; i < analytic.size(); ++i) {
		const double diff = std::fabs(analytic[i] - numeric[i]);
		const double scale = std::max(std::fabs(analytic[i]), std::fabs(numeric[i]));
		worst = std::max(worst, scale < kFloor ? diff : diff / scale);
	}
	return worst;
}

} // namespace

std::string_view to_string(ModelKind k) {
	switch (k) {
	case ModelKind::linear:
		return "linear";
	case ModelKind::fnn:
		return "fnn";
	case ModelKind::rnn:
		return "rnn";
	case ModelKind::lstm:
		return "lstm";
	}
	return "linear";
}

ModelKind parse_model_kind(std::string_view name) {
	for (ModelKind k : {ModelKind::linear, ModelKind::fnn, ModelKind::rnn, ModelKind::lstm}) {
		if (name == to_string(k)) {
			return k;
		}
	}
	throw std::invalid_argument("unknown model kind '" + std::string(name) + "' (expected linear, fnn, rnn or lstm)");
}

ModelKind kind_of(const Model &m) {
	return static_cast<ModelKind>(m.index());
}

const FeatureLayout &layout_of(const Model &m) {
	return std::visit([](const auto &x) -> const FeatureLayout & { return x.layout; }, m);
}

const Scaler &scaler_of(const Model &m) {
	return std::visit([](const auto &x) -> const Scaler & { return x.scaler; }, m);
}

std::size_t history_needed(const Model &m) {
	if (const auto *r = std::get_if<RnnModel>(&m)) {
		return r->warmup + 1;
	}
	if (const auto *l = std::get_if<LstmModel>(&m)) {
		return l->warmup + 1;
	}
	return static_cast<std::size_t>(layout_of(m).state.order);
}

void TrainConfig::validate() const {
	if (!(learning_rate > 0.0) || steps < 1 || batch_size < 1 || !(epsilon > 0.0) || !(gradient_clip_norm > 0.0) ||
	    !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
		throw std::invalid_argument("training configuration values must be positive (betas in (0,1), steps >= 1)");
	}
}

// ------------------------------------------------------------------ linear

std::pair<std::vector<double>, double> LinearModel::raw_coefficients() const {
	std::vector<double> w(weights.size());
	double b = bias;
	for (std::size_t j = 0; j < weights.size(); ++j) {
		w[j] = scaler.target_std * weights[j] / scaler.stds[j];
		b -= weights[j] * scaler.means[j] / scaler.stds[j];
	}
	return {w, scaler.target_std * b + scaler.target_mean};
}

LinearModel linear_fit(const SupervisedSet &set) {
	const std::size_t n = set.inputs.cols();
	if (set.size() < n + 1) {
		throw DataError("linear_fit: need at least " + std::to_string(n + 1) + " samples for " + std::to_string(n) +
		                " features, got " + std::to_string(set.size()));
	}
	LinearModel model;
	model.layout = set.layout;
	model.scaler = fit_scaler(set);

	Matrix design(set.size(), n + 1);
	std::vector<double> rhs(set.size());
	for (std::size_t r = 0; r < set.size(); ++r) {
		auto row = design.row(r);
		model.scaler.apply_row(set.inputs.row(r), row.first(n));
		row[n] = 1.0;
		rhs[r] = model.scaler.apply_target(set.targets[r]);
	}
	const LeastSquaresSolution sol = least_squares(design, rhs);
	if (!sol.dependent_columns.empty()) {
		std::string names;
		for (std::size_t c : sol.dependent_columns) {
			if (!names.empty()) {
				names += ", ";
			}
			names += c < n ? set.layout.columns.at(c) : std::string("intercept");
		}
		throw DataError("linear_fit: rank-deficient features; linearly dependent columns: " + names);
	}
	model.weights.assign(sol.coef.begin(), sol.coef.begin() + static_cast<std::ptrdiff_t>(n));
	model.bias = sol.coef[n];
	return model;
}

double linear_forward(const LinearModel &model, std::span<const double> features) {
	if (features.size() != model.weights.size()) {
		throw std::invalid_argument("linear_forward: expected " + std::to_string(model.weights.size()) +
		                            " features, got " + std::to_string(features.size()));
	}
	std::vector<double> z(features.size());
	model.scaler.apply_row(features, z);
	return model.scaler.invert_target(kernels::dot(model.weights, z) + model.bias);
}

// --------------------------------------------------------------------- fnn

Trained<FnnModel> train_fnn(const SupervisedSet &set, const std::vector<std::size_t> &hidden, const TrainConfig &cfg) {
	cfg.validate();
	if (set.size() == 0) {
		throw DataError("train_fnn: empty training set");
	}
	Trained<FnnModel> out;
	FnnModel &model = out.model;
	model.layout = set.layout;
	model.scaler = fit_scaler(set);
	const SupervisedSet z = model.scaler.apply(set);

	std::mt19937_64 rng(cfg.rng_seed);
	model.net = FnnNet(set.inputs.cols(), hidden);
	model.net.init(rng);

	out.initial_loss = model.net.loss(z.inputs, z.targets);
	check_finite(out.initial_loss, 0);

	Adam adam(model.net.params().size(), cfg.adam());
	std::vector<double> grad(model.net.params().size());
	BatchSampler sampler(z.size(), cfg.batch_size, rng);
	out.loss_curve.reserve(static_cast<std::size_t>(cfg.steps));
	for (long step = 1; step <= cfg.steps; ++step) {
		const double loss = model.net.loss_and_gradient(z.inputs, z.targets, sampler.next(), grad);
		check_finite(loss, step);
		out.loss_curve.push_back(loss);
		adam.step(model.net.params().values(), grad);
	}
	out.final_loss = model.net.loss(z.inputs, z.targets);
	check_finite(out.final_loss, cfg.steps);
	return out;
}

double fnn_forward(const FnnModel &model, std::span<const double> features) {
	if (features.size() != model.net.input_dim()) {
		throw std::invalid_argument("fnn_forward: expected " + std::to_string(model.net.input_dim()) +
		                            " features, got " + std::to_string(features.size()));
	}
	std::vector<double> z(features.size());
	model.scaler.apply_row(features, z);
	return model.scaler.invert_target(model.net.forward(z));
}

// --------------------------------------------------------------- recurrent

Trained<Model> train_recurrent(const SequenceSet &set, ModelKind kind, const RecurrentArch &arch,
                               const TrainConfig &cfg) {
	cfg.validate();
	if (!is_recurrent(kind)) {
		throw std::invalid_argument("train_recurrent: kind must be rnn or lstm");
	}
	if (set.windows.empty()) {
		throw DataError("train_recurrent: no training windows");
	}
	const Scaler scaler = fit_scaler(set);
	const SequenceSet z = scaler.apply(set);

	std::mt19937_64 rng(cfg.rng_seed);
	RecurrentNet net(kind == ModelKind::lstm ? CellKind::lstm : CellKind::rnn, set.layout.width(), arch.hidden,
	                 arch.layers);
	net.init(rng);

	std::vector<const Matrix *> all_in;
	std::vector<const std::vector<double> *> all_tg;
	for (const auto &w : z.windows) {
		all_in.push_back(&w.inputs);
		all_tg.push_back(&w.targets);
	}
	std::vector<double> grad(net.params().size());

	Trained<Model> out;
	out.initial_loss = net.loss_and_gradient(all_in, all_tg, grad);
	check_finite(out.initial_loss, 0);

	Adam adam(net.params().size(), cfg.adam());
	BatchSampler sampler(z.windows.size(), cfg.batch_size, rng);
	std::vector<const Matrix *> batch_in;
	std::vector<const std::vector<double> *> batch_tg;
	out.loss_curve.reserve(static_cast<std::size_t>(cfg.steps));
	for (long step = 1; step <= cfg.steps; ++step) {
		batch_in.clear();
		batch_tg.clear();
		for (std::size_t w : sampler.next()) {
			batch_in.push_back(all_in[w]);
			batch_tg.push_back(all_tg[w]);
		}
		const double loss = net.loss_and_gradient(batch_in, batch_tg, grad);
		check_finite(loss, step);
		out.loss_curve.push_back(loss);
		clip_global_norm(grad, cfg.gradient_clip_norm);
		adam.step(net.params().values(), grad);
	}
	out.final_loss = net.loss_and_gradient(all_in, all_tg, grad);
	check_finite(out.final_loss, cfg.steps);

	if (kind == ModelKind::lstm) {
		out.model = LstmModel{std::move(net), set.layout, scaler, kDefaultWarmup};
	} else {
		out.model = RnnModel{std::move(net), set.layout, scaler, kDefaultWarmup};
	}
	return out;
}

std::vector<double> rnn_forward(const RnnModel &model, const Matrix &window) {
	return recurrent_window(model, window);
}

std::vector<double> lstm_forward(const LstmModel &model, const Matrix &window) {
	return recurrent_window(model, window);
}

// -------------------------------------------------------------- prediction

double predict_one_step(const Model &model, const TimeSeriesDataset &history, double price, std::size_t t) {
	if (history.size() < t) {
		throw DataError("insufficient history: need intervals before t=" + std::to_string(t) + ", have " +
		                std::to_string(history.size()));
	}
	if (const auto *r = std::get_if<RnnModel>(&model)) {
		return predict_recurrent(*r, history, price, t);
	}
	if (const auto *l = std::get_if<LstmModel>(&model)) {
		return predict_recurrent(*l, history, price, t);
	}
	const FeatureLayout &layout = layout_of(model);
	const StateConfig &cfg = layout.state;
	if (t < static_cast<std::size_t>(cfg.order)) {
		throw DataError("insufficient history: order " + std::to_string(cfg.order) + " prediction at t=" +
		                std::to_string(t));
	}
	std::vector<double> row(layout.width());
	fill_state_row(history.prices, history.consumptions, t, hour_at(history, t, cfg.intervals_per_day), price, cfg,
	               row);
	if (const auto *lin = std::get_if<LinearModel>(&model)) {
		return linear_forward(*lin, row);
	}
	return fnn_forward(std::get<FnnModel>(model), row);
}

std::vector<double> predict_range(const Model &model, const TimeSeriesDataset &data, std::size_t begin,
                                  std::size_t end) {
	if (begin > end || end > data.size()) {
		throw std::out_of_range("predict_range: range out of bounds");
	}
	std::vector<double> out;
	out.reserve(end - begin);
	for (std::size_t t = begin; t < end; ++t) {
		out.push_back(predict_one_step(model, data, data.prices[t], t));
	}
	return out;
}

std::vector<double> rollout(const Model &model, const TimeSeriesDataset &history,
                            std::span<const double> future_prices, std::optional<std::span<const double>> teacher) {
	if (teacher && teacher->size() != future_prices.size()) {
		throw std::invalid_argument("rollout: teacher sequence length differs from the price horizon");
	}
	if (history.size() < history_needed(model)) {
		throw DataError("insufficient history for rollout: need " + std::to_string(history_needed(model)) +
		                " intervals, have " + std::to_string(history.size()));
	}
	TimeSeriesDataset work = history;
	const int per_day = layout_of(model).state.intervals_per_day;
	std::vector<double> out;
	out.reserve(future_prices.size());
	for (std::size_t k = 0; k < future_prices.size(); ++k) {
		const std::size_t t = work.size();
		const double y = predict_one_step(model, work, future_prices[k], t);
		out.push_back(y);
		const int hour = hour_at(work, t, per_day);
		work.prices.push_back(future_prices[k]);
		work.consumptions.push_back(teacher ? (*teacher)[k] : y);
		work.hours.push_back(hour);
	}
	return out;
}

// ---------------------------------------------------------- gradient check

double gradient_check(const FnnNet &net, const Matrix &inputs, std::span<const double> targets, double step) {
	std::vector<std::size_t> rows(inputs.rows());
	std::iota(rows.begin(), rows.end(), std::size_t{0});
	std::vector<double> analytic(net.params().size());
	net.loss_and_gradient(inputs, targets, rows, analytic);

	FnnNet probe = net;
	std::vector<double> numeric(analytic.size());
	auto &theta = probe.params().values();
	for (std::size_t i = 0; i < theta.size(); ++i) {
		const double saved = theta[i];
		theta[i] = saved + step;
		const double up = probe.loss(inputs, targets);
		theta[i] = saved - step;
		const double down = probe.loss(inputs, targets);
		theta[i] = saved;
		numeric[i] = (up - down) / (2.0 * step);
	}
	return relative_gradient_error(analytic, numeric);
}

double gradient_check(const RecurrentNet &net, std::span<const Matrix> windows,
                      std::span<const std::vector<double>> targets, double step) {
	std::vector<const Matrix *> in;
	std::vector<const std::vector<double> *> tg;
	for (std::size_t w = 0; w < windows.size(); ++w) {
		in.push_back(&windows[w]);
		tg.push_back(&targets[w]);
	}
	std::vector<double> analytic(net.params().size());
	net.loss_and_gradient(in, tg, analytic);

	RecurrentNet probe = net;
	std::vector<double> scratch(analytic.size());
	std::vector<double> numeric(analytic.size());
	auto &theta = probe.params().values();
	for (std::size_t i = 0; i < theta.size(); ++i) {
		const double saved = theta[i];
		theta[i] = saved + step;
		const double up = probe.loss_and_gradient(in, tg, scratch);
		theta[i] = saved - step;
		const double down = probe.loss_and_gradient(in, tg, scratch);
		theta[i] = saved;
		numeric[i] = (up - down) / (2.0 * step);
	}
	return relative_gradient_error(analytic, numeric);
}

} // namespace dyndr
