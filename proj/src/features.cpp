#include "dyndr/features.hpp"

#include "dyndr/error.hpp"

#include <cmath>
#include <stdexcept>

namespace dyndr {
namespace {

// Constant columns keep a unit scale instead of dividing by zero.
double safe_std(double variance, double mean) {
	const double s = std::sqrt(variance);
	if (!(s > 1e-12 * std::max(1.0, std::fabs(mean)))) {
		return 1.0;
	}
	return s;
}

void accumulate_means(const Matrix &m, std::vector<double> &sum) {
	for (std::size_t r = 0; r < m.rows(); ++r) {
		const auto row = m.row(r);
		for (std::size_t c = 0; c < row.size(); ++c) {
			sum[c] += row[c];
		}
	}
}

void accumulate_squares(const Matrix &m, const std::vector<double> &means, std::vector<double> &sq) {
	for (std::size_t r = 0; r < m.rows(); ++r) {
		const auto row = m.row(r);
		for (std::size_t c = 0; c < row.size(); ++c) {
			const double d = row[c] - means[c];
			sq[c] += d * d;
		}
	}
}

template <class Rows, class Targets>
Scaler fit_from(std::size_t width, std::size_t n, Rows &&each_matrix, Targets &&each_target) {
	if (n == 0) {
		throw std::invalid_argument("fit_scaler: empty set");
	}
	Scaler s;
	s.means.assign(width, 0.0);
	s.stds.assign(width, 0.0);
	const double inv_n = 1.0 / static_cast<double>(n);

	each_matrix([&](const Matrix &m) { accumulate_means(m, s.means); });
	for (double &m : s.means) {
		m *= inv_n;
	}
	std::vector<double> sq(width, 0.0);
	each_matrix([&](const Matrix &m) { accumulate_squares(m, s.means, sq); });
	for (std::size_t c = 0; c < width; ++c) {
		s.stds[c] = safe_std(sq[c] * inv_n, s.means[c]);
	}

	double tsum = 0.0;
	each_target([&](double y) { tsum += y; });
	s.target_mean = tsum * inv_n;
	double tsq = 0.0;
	each_target([&](double y) { tsq += (y - s.target_mean) * (y - s.target_mean); });
	s.target_std = safe_std(tsq * inv_n, s.target_mean);
	return s;
}

} // namespace

std::string_view to_string(TimeEncoding e) {
	switch (e) {
	case TimeEncoding::scalar:
		return "scalar";
	case TimeEncoding::one_hot:
		return "one_hot";
	case TimeEncoding::none:
		return "none";
	}
	return "none";
}

TimeEncoding parse_time_encoding(std::string_view name) {
	if (name == "scalar") {
		return TimeEncoding::scalar;
	}
	if (name == "one_hot") {
		return TimeEncoding::one_hot;
	}
	if (name == "none") {
		return TimeEncoding::none;
	}
	throw std::invalid_argument("unknown time encoding '" + std::string(name) + "'");
}

std::size_t StateConfig::time_dim() const {
	switch (time_encoding) {
	case TimeEncoding::scalar:
		return 1;
	case TimeEncoding::one_hot:
		return static_cast<std::size_t>(intervals_per_day);
	case TimeEncoding::none:
		return 0;
	}
	return 0;
}

void StateConfig::validate() const {
	if (order < 0) {
		throw std::invalid_argument("state order must be non-negative");
	}
	if (intervals_per_day < 1) {
		throw std::invalid_argument("intervals_per_day must be positive");
	}
}

std::vector<std::string> StateConfig::column_names() const {
	std::vector<std::string> names;
	names.reserve(feature_count());
	for (int i = order; i >= 1; --i) {
		names.push_back("p[t-" + std::to_string(i) + "]");
		names.push_back("e[t-" + std::to_string(i) + "]");
	}
	if (time_encoding == TimeEncoding::scalar) {
		names.emplace_back("hour/T");
	} else if (time_encoding == TimeEncoding::one_hot) {
		for (int h = 0; h < intervals_per_day; ++h) {
			names.push_back("hour=" + std::to_string(h));
		}
	}
	names.emplace_back("p[t]");
	return names;
}

void fill_state_row(std::span<const double> prices, std::span<const double> consumptions, std::size_t t, int hour,
                    double price, const StateConfig &cfg, std::span<double> out) {
	const auto order = static_cast<std::size_t>(cfg.order);
	if (t < order || prices.size() < t || consumptions.size() < t) {
		throw std::invalid_argument("fill_state_row: not enough history for the requested order");
	}
	if (out.size() != cfg.feature_count()) {
		throw std::invalid_argument("fill_state_row: output width does not match the state layout");
	}
	std::size_t c = 0;
	for (std::size_t i = order; i >= 1; --i) {
		out[c++] = prices[t - i];
		out[c++] = consumptions[t - i];
	}
	switch (cfg.time_encoding) {
	case TimeEncoding::scalar:
		out[c++] = static_cast<double>(hour) / static_cast<double>(cfg.intervals_per_day);
		break;
	case TimeEncoding::one_hot:
		for (int h = 0; h < cfg.intervals_per_day; ++h) {
			out[c++] = h == hour ? 1.0 : 0.0;
		}
		break;
	case TimeEncoding::none:
		break;
	}
	out[c] = price;
}

std::pair<TimeSeriesDataset, TimeSeriesDataset> split(const TimeSeriesDataset &ts, std::size_t train_len) {
	if (train_len == 0 || train_len >= ts.size()) {
		throw std::invalid_argument("split: train length " + std::to_string(train_len) +
		                            " must lie strictly between 0 and the series length " +
		                            std::to_string(ts.size()));
	}
	return {ts.slice(0, train_len), ts.slice(train_len, ts.size())};
}

SupervisedSet build_direct_dataset(const TimeSeriesDataset &ts, const StateConfig &cfg) {
	cfg.validate();
	const auto order = static_cast<std::size_t>(cfg.order);
	if (ts.size() <= order) {
		throw DataError("build_direct_dataset: series of length " + std::to_string(ts.size()) +
		                " is too short for order " + std::to_string(order));
	}
	SupervisedSet set;
	set.layout = FeatureLayout::from(cfg);
	const std::size_t rows = ts.size() - order;
	set.inputs = Matrix(rows, cfg.feature_count());
	set.targets.resize(rows);
	set.source_index.resize(rows);
	for (std::size_t t = order; t < ts.size(); ++t) {
		const std::size_t r = t - order;
		fill_state_row(ts.prices, ts.consumptions, t, ts.hours[t], ts.prices[t], cfg, set.inputs.row(r));
		set.targets[r] = ts.consumptions[t];
		set.source_index[r] = t;
	}
	return set;
}

SequenceSet build_sequence_dataset(const TimeSeriesDataset &ts, std::size_t window_length, const StateConfig &cfg) {
	cfg.validate();
	if (cfg.order != 1) {
		throw std::invalid_argument("build_sequence_dataset: recurrent inputs use order 1, got " +
		                            std::to_string(cfg.order));
	}
	if (window_length < 2) {
		throw std::invalid_argument("build_sequence_dataset: window length must be at least 2");
	}
	if (ts.size() < window_length + 1) {
		throw DataError("build_sequence_dataset: window of " + std::to_string(window_length) +
		                " is longer than the usable series (" + std::to_string(ts.size()) + " points)");
	}
	SequenceSet set;
	set.window_length = window_length;
	set.layout = FeatureLayout::from(cfg);
	const std::size_t width = cfg.feature_count();
	for (std::size_t start = 1; start + window_length <= ts.size(); start += window_length) {
		SequenceWindow w;
		w.start = start;
		w.inputs = Matrix(window_length, width);
		w.targets.resize(window_length);
		for (std::size_t s = 0; s < window_length; ++s) {
			const std::size_t t = start + s;
			fill_state_row(ts.prices, ts.consumptions, t, ts.hours[t], ts.prices[t], cfg, w.inputs.row(s));
			w.targets[s] = ts.consumptions[t];
		}
		set.windows.push_back(std::move(w));
	}
	return set;
}

void Scaler::apply_row(std::span<const double> in, std::span<double> out) const {
	if (in.size() != width() || out.size() != width()) {
		throw std::invalid_argument("Scaler: row width does not match");
	}
	for (std::size_t c = 0; c < in.size(); ++c) {
		out[c] = (in[c] - means[c]) / stds[c];
	}
}

void Scaler::invert_row(std::span<const double> in, std::span<double> out) const {
	if (in.size() != width() || out.size() != width()) {
		throw std::invalid_argument("Scaler: row width does not match");
	}
	for (std::size_t c = 0; c < in.size(); ++c) {
		out[c] = in[c] * stds[c] + means[c];
	}
}

SupervisedSet Scaler::apply(const SupervisedSet &set) const {
	SupervisedSet out = set;
	for (std::size_t r = 0; r < set.inputs.rows(); ++r) {
		apply_row(set.inputs.row(r), out.inputs.row(r));
	}
	for (double &y : out.targets) {
		y = apply_target(y);
	}
	return out;
}

SequenceSet Scaler::apply(const SequenceSet &set) const {
	SequenceSet out = set;
	for (std::size_t w = 0; w < set.windows.size(); ++w) {
		for (std::size_t r = 0; r < set.windows[w].inputs.rows(); ++r) {
			apply_row(set.windows[w].inputs.row(r), out.windows[w].inputs.row(r));
		}
		for (double &y : out.windows[w].targets) {
			y = apply_target(y);
		}
	}
	return out;
}

Scaler fit_scaler(const SupervisedSet &set) {
	return fit_from(
	    set.inputs.cols(), set.size(), [&](auto &&fn) { fn(set.inputs); },
	    [&](auto &&fn) {
		    for (double y : set.targets) {
			    fn(y);
		    }
	    });
}

Scaler fit_scaler(const SequenceSet &set) {
	std::size_t n = 0;
	for (const auto &w : set.windows) {
		n += w.targets.size();
	}
	return fit_from(
	    set.layout.width(), n,
	    [&](auto &&fn) {
		    for (const auto &w : set.windows) {
			    fn(w.inputs);
		    }
	    },
	    [&](auto &&fn) {
		    for (const auto &w : set.windows) {
			    for (double y : w.targets) {
				    fn(y);
			    }
		    }
	    });
}

} // namespace dyndr
