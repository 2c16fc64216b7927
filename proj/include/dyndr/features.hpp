#pragma once
// Supervised views of a price/consumption series: windowed state vectors for
// the direct approach and contiguous step sequences for recurrent models.

#include "dyndr/euc_sim.hpp"
#include "dyndr/matrix.hpp"

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dyndr {

enum class TimeEncoding { scalar, one_hot, none };

std::string_view to_string(TimeEncoding e);
TimeEncoding parse_time_encoding(std::string_view name);

// State vector recipe: `order` lagged (price, consumption) pairs, the
// interval-of-day feature(s), then the current price.
struct StateConfig {
	int order = 1;
	TimeEncoding time_encoding = TimeEncoding::scalar;
	int intervals_per_day = 24;

	std::size_t time_dim() const;
	std::size_t feature_count() const { return 2 * static_cast<std::size_t>(order) + time_dim() + 1; }
	std::vector<std::string> column_names() const;
	void validate() const;
	bool operator==(const StateConfig &) const = default;
};

// Self-description stored with every trained model.
struct FeatureLayout {
	StateConfig state;
	std::vector<std::string> columns;

	static FeatureLayout from(const StateConfig &cfg) { return {cfg, cfg.column_names()}; }
	std::size_t width() const { return columns.size(); }
	bool operator==(const FeatureLayout &) const = default;
};

struct SupervisedSet {
	Matrix inputs;
	std::vector<double> targets;
	FeatureLayout layout;
	// Source index t of each row.
	std::vector<std::size_t> source_index;

	std::size_t size() const { return targets.size(); }
};

struct SequenceWindow {
	Matrix inputs; // one row per step
	std::vector<double> targets;
	std::size_t start = 0; // source index of the first step
};

struct SequenceSet {
	std::vector<SequenceWindow> windows;
	std::size_t window_length = 0;
	FeatureLayout layout;
};

// Writes the state row for interval t into `out`. Reads prices[t-order..t-1]
// and consumptions[t-order..t-1]; `price` is the posted price for t.
void fill_state_row(std::span<const double> prices, std::span<const double> consumptions, std::size_t t, int hour,
                    double price, const StateConfig &cfg, std::span<double> out);

// Chronological prefix/suffix split.
std::pair<TimeSeriesDataset, TimeSeriesDataset> split(const TimeSeriesDataset &ts, std::size_t train_len);

SupervisedSet build_direct_dataset(const TimeSeriesDataset &ts, const StateConfig &cfg);

// Non-overlapping windows starting at t = 1 so each step sees t-1. The state
// config must have order 1. A trailing partial window is dropped.
SequenceSet build_sequence_dataset(const TimeSeriesDataset &ts, std::size_t window_length, const StateConfig &cfg);

// Per-column standardization fit on training data; the target gets its own
// (mean, std) so predictions can be mapped back to MWh.
struct Scaler {
	std::vector<double> means;
	std::vector<double> stds;
	double target_mean = 0.0;
	double target_std = 1.0;

	std::size_t width() const { return means.size(); }
	void apply_row(std::span<const double> in, std::span<double> out) const;
	void invert_row(std::span<const double> in, std::span<double> out) const;
	double apply_target(double y) const { return (y - target_mean) / target_std; }
	double invert_target(double z) const { return z * target_std + target_mean; }

	SupervisedSet apply(const SupervisedSet &set) const;
	SequenceSet apply(const SequenceSet &set) const;
	bool operator==(const Scaler &) const = default;
};

Scaler fit_scaler(const SupervisedSet &set);
Scaler fit_scaler(const SequenceSet &set);

} // namespace dyndr
