#pragma once
// Population of price-responsive end-use customers and the hourly aggregate
// price/consumption data they generate.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dyndr {

// One customer's behavioral parameters, constant over the horizon.
struct EucParams {
	double peak_demand = 1.0;  // MWh per interval
	double rho = -100.0;       // benefit curvature, $/MWh^2, must be < 0
	double alpha = 0.5;        // fraction of unmet demand carried over
	double min_fraction = 0.5; // consumption floor as a fraction of demand

	void validate() const;
};

struct Population {
	std::vector<EucParams> eucs;
	std::uint64_t seed = 0;

	std::size_t size() const { return eucs.size(); }
};

enum class ProfileSource { synthetic, file };

// Normalized demand multipliers, max == 1.
struct LoadProfile {
	std::vector<double> values;
	ProfileSource source = ProfileSource::synthetic;
};

// Aligned hourly series. hours[t] == t mod intervals_per_day.
struct TimeSeriesDataset {
	std::vector<double> prices;       // $/MWh
	std::vector<double> consumptions; // MWh, aggregate
	std::vector<int> hours;
	int intervals_per_day = 24;

	std::size_t size() const { return prices.size(); }
	// Throws DataError if the sequences are misaligned or malformed.
	void validate() const;
	// Copy of [begin, end); hour labels are kept from the source.
	TimeSeriesDataset slice(std::size_t begin, std::size_t end) const;
	bool operator==(const TimeSeriesDataset &) const = default;
};

// Maximizes rho*(demand - c)^2 - price*c over c >= min_fraction*demand.
// The concave quadratic has its unconstrained maximizer at
// demand + price/(2 rho); the feasible set only bounds it from below.
double optimal_consumption(double demand, double price, const EucParams &params);

// Next-interval demand: alpha*(demand - consumption) + new_demand.
double step_demand(double demand, double consumption, double alpha, double new_demand);

// peak ~ U[0.1, 2], alpha ~ U[0, 1], rho = -100/peak, min_fraction = 0.5.
Population sample_population(std::size_t count, std::uint64_t rng_seed);

// Synthetic annual profile: seasonal envelope x weekly factor x smooth daily
// noise x a double-peaked day shape (evening peak at hour 19 of 24).
LoadProfile generate_profile(std::size_t horizon, int intervals_per_day, std::uint64_t rng_seed);

// i.i.d. U[low, high] prices.
std::vector<double> sample_prices(std::size_t horizon, double low, double high, std::uint64_t rng_seed);

struct SimulationOptions {
	double noise_std = 0.1;
	std::uint64_t rng_seed = 0;
	int intervals_per_day = 24;
	// Draw a fresh backlog rate for every customer every hour instead of
	// using the one sampled with the population.
	bool resample_alpha_hourly = false;
};

// Per-customer trajectories, [euc][t].
struct SimulationTrace {
	std::vector<std::vector<double>> demand;
	std::vector<std::vector<double>> consumption;
};

TimeSeriesDataset simulate(const Population &population, std::span<const double> prices, const LoadProfile &profile,
                           const SimulationOptions &options, SimulationTrace *trace = nullptr);

// Profile CSV: one positive decimal per line, '#' lines are comments.
LoadProfile load_profile(const std::filesystem::path &path);

// Dataset CSV with header t,hour,price_usd_per_mwh,consumption_mwh.
void write_dataset_csv(const TimeSeriesDataset &ts, const std::filesystem::path &path);
TimeSeriesDataset read_dataset_csv(const std::filesystem::path &path, int intervals_per_day = 24);

} // namespace dyndr
