#pragma once
// Run configuration: every constant of the reference experiment is a named
// default here, and every randomized stage has its own seed.

#include "dyndr/features.hpp"
#include "dyndr/models.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dyndr {

struct SimulationConfig {
	std::size_t customers = 100;
	std::size_t horizon = 8760;
	int intervals_per_day = 24;
	double price_low = 20.0;
	double price_high = 50.0;
	double noise_std = 0.1;
	ProfileSource profile_source = ProfileSource::synthetic;
	std::string profile_path;
	bool resample_alpha_hourly = false;
	std::uint64_t population_seed = 1;
	std::uint64_t price_seed = 2;
	std::uint64_t profile_seed = 3;
	std::uint64_t noise_seed = 4;
};

struct ModelTrainingConfig {
	TrainConfig train;
	std::vector<std::size_t> hidden; // FNN layer widths; recurrent: {width} x layers
	std::size_t layers = 1;          // recurrent only
};

struct RunConfig {
	SimulationConfig simulation;
	std::size_t train_length = 7296;
	TimeEncoding time_encoding = TimeEncoding::scalar;
	std::size_t window_length = 49; // coprime with 24: window starts cycle through every hour
	ModelTrainingConfig fnn;
	ModelTrainingConfig rnn;
	ModelTrainingConfig lstm;
	std::vector<ModelKind> benchmark_kinds{ModelKind::linear, ModelKind::fnn, ModelKind::rnn, ModelKind::lstm};
	std::vector<int> benchmark_orders{0, 1, 2, 3, 4, 5};
	int violin_order = 5;
	std::string output_dir = "benchmark_out";

	RunConfig();
	void validate() const;
	StateConfig state(int order) const { return {order, time_encoding, simulation.intervals_per_day}; }
	const ModelTrainingConfig &training(ModelKind kind) const;
};

// Missing sections and fields take their defaults; unknown fields and type
// errors raise ConfigError naming the field path.
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::filesystem::path &path);
std::string config_to_json(const RunConfig &cfg);

} // namespace dyndr
