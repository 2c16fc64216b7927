#pragma once
// Percentage error metrics and benchmark report documents.

#include "dyndr/models.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dyndr {

// Per-sample |predicted - actual| / actual * 100. Throws DataError on a
// non-positive actual value (the percentage is undefined).
std::vector<double> absolute_percentage_errors(std::span<const double> actual, std::span<const double> predicted);

double mape(std::span<const double> actual, std::span<const double> predicted);
// Population standard deviation of the absolute percentage errors.
double sdape(std::span<const double> actual, std::span<const double> predicted);

double mean_of(std::span<const double> v);
double population_std_of(std::span<const double> v);

struct SplitRange {
	std::string tag; // "train" or "test"
	std::size_t begin = 0;
	std::size_t end = 0;
};

struct EvalReport {
	std::string name;
	ModelKind kind = ModelKind::linear;
	int order = 0;
	std::string arch;
	std::string split;
	double mape_pct = 0.0;
	double sdape_pct = 0.0;
	std::vector<double> ape_samples;
	// Intervals at the start of the split that could not be scored because
	// the model needs that much history.
	std::size_t unscored = 0;
};

std::string describe_arch(const Model &model);

// One-step predictions over [range.begin, range.end) of `data` with true
// history; intervals before history_needed(model) are skipped.
EvalReport evaluate(const Model &model, const TimeSeriesDataset &data, const SplitRange &range,
                    const std::string &name);

// Report document with one record per (model, order, split).
std::string reports_to_json(const std::vector<EvalReport> &reports);
// Aligned text tables: linear and FNN by order, then RNN/LSTM.
std::string reports_to_tables(const std::vector<EvalReport> &reports);
// CSV `model,ape_pct`, one row per APE sample of each given report.
std::string violin_csv(const std::vector<const EvalReport *> &reports);

} // namespace dyndr
