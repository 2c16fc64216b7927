#include "dyndr/euc_sim.hpp"

#include "dyndr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace dyndr {
namespace {

constexpr double kRhoScale = -100.0; // $/MWh^2 times MWh of peak demand
constexpr double kPeakLow = 0.1;
constexpr double kPeakHigh = 2.0;
constexpr double kDaysPerYear = 365.0;

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
	                  static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
	return std::mt19937_64(seq);
}

// Circular distance between two clock hours on a 24 h dial.
double clock_distance(double a, double b) {
	const double d = std::fabs(a - b);
	return std::min(d, 24.0 - d);
}

double bump(double hour, double center, double width) {
	const double d = clock_distance(hour, center);
	return std::exp(-0.5 * d * d / (width * width));
}

double day_shape(double clock_hour) {
	return 0.55 + 0.25 * bump(clock_hour, 8.0, 3.0) + 0.45 * bump(clock_hour, 19.0, 3.5);
}

} // namespace

void EucParams::validate() const {
	if (!(rho < 0.0)) {
		throw std::invalid_argument("rho must be negative for a concave benefit, got " + std::to_string(rho));
	}
	if (!(alpha >= 0.0 && alpha <= 1.0)) {
		throw std::invalid_argument("alpha must lie in [0, 1], got " + std::to_string(alpha));
	}
	if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
		throw std::invalid_argument("min_fraction must lie in [0, 1], got " + std::to_string(min_fraction));
	}
	if (!(peak_demand > 0.0)) {
		throw std::invalid_argument("peak_demand must be positive, got " + std::to_string(peak_demand));
	}
}

void TimeSeriesDataset::validate() const {
	if (consumptions.size() != prices.size() || hours.size() != prices.size()) {
		throw DataError("dataset columns have different lengths");
	}
	if (intervals_per_day < 1) {
		throw DataError("intervals_per_day must be positive");
	}
	for (std::size_t t = 0; t < size(); ++t) {
		if (!(consumptions[t] >= 0.0) || !std::isfinite(consumptions[t])) {
			throw DataError("invalid consumption at t=" + std::to_string(t));
		}
		if (!std::isfinite(prices[t])) {
			throw DataError("invalid price at t=" + std::to_string(t));
		}
		if (hours[t] < 0 || hours[t] >= intervals_per_day) {
			throw DataError("hour out of range at t=" + std::to_string(t));
		}
	}
}

TimeSeriesDataset TimeSeriesDataset::slice(std::size_t begin, std::size_t end) const {
	if (begin > end || end > size()) {
		throw std::out_of_range("dataset slice out of range");
	}
	TimeSeriesDataset out;
	out.intervals_per_day = intervals_per_day;
	out.prices.assign(prices.begin() + begin, prices.begin() + end);
	out.consumptions.assign(consumptions.begin() + begin, consumptions.begin() + end);
	out.hours.assign(hours.begin() + begin, hours.begin() + end);
	return out;
}

double optimal_consumption(double demand, double price, const EucParams &params) {
	if (!(params.rho < 0.0)) {
		throw std::invalid_argument("optimal_consumption: rho must be negative (objective is not concave)");
	}
	if (!(demand >= 0.0)) {
		throw std::invalid_argument("optimal_consumption: demand must be non-negative");
	}
	if (!(price >= 0.0)) {
		throw std::invalid_argument("optimal_consumption: negative prices are not supported");
	}
	const double unconstrained = demand + price / (2.0 * params.rho);
	return std::max(params.min_fraction * demand, unconstrained);
}

double step_demand(double demand, double consumption, double alpha, double new_demand) {
	if (!(demand >= 0.0) || !(consumption >= 0.0) || !(new_demand >= 0.0)) {
		throw std::invalid_argument("step_demand: inputs must be non-negative");
	}
	if (!(alpha >= 0.0 && alpha <= 1.0)) {
		throw std::invalid_argument("step_demand: alpha must lie in [0, 1]");
	}
	if (consumption > demand) {
		throw std::invalid_argument("step_demand: consumption exceeds demand");
	}
	return alpha * (demand - consumption) + new_demand;
}

Population sample_population(std::size_t count, std::uint64_t rng_seed) {
	if (count == 0) {
		throw std::invalid_argument("sample_population: count must be at least 1");
	}
	std::mt19937_64 rng(rng_seed);
	std::uniform_real_distribution<double> peak_dist(kPeakLow, kPeakHigh);
	std::uniform_real_distribution<double> alpha_dist(0.0, 1.0);

	Population pop;
	pop.seed = rng_seed;
	pop.eucs.reserve(count);
	for (std::size_t k = 0; k < count; ++k) {
		EucParams p;
		p.peak_demand = peak_dist(rng);
		p.alpha = alpha_dist(rng);
		p.rho = kRhoScale / p.peak_demand;
		p.min_fraction = 0.5;
		pop.eucs.push_back(p);
	}
	return pop;
}

LoadProfile generate_profile(std::size_t horizon, int intervals_per_day, std::uint64_t rng_seed) {
	if (intervals_per_day < 1) {
		throw std::invalid_argument("generate_profile: intervals_per_day must be positive");
	}
	const auto per_day = static_cast<std::size_t>(intervals_per_day);
	if (horizon == 0 || horizon % per_day != 0) {
		throw std::invalid_argument("generate_profile: horizon must be a positive multiple of intervals_per_day");
	}
	const std::size_t days = horizon / per_day;

	std::mt19937_64 rng = substream(rng_seed, 0, 0x9f0f11e5u);
	std::normal_distribution<double> gauss(0.0, 1.0);

	LoadProfile profile;
	profile.source = ProfileSource::synthetic;
	profile.values.resize(horizon);

	double weather = 0.0;
	const double persistence = 0.8;
	for (std::size_t d = 0; d < days; ++d) {
		weather = persistence * weather + std::sqrt(1.0 - persistence * persistence) * gauss(rng);
		const double dd = static_cast<double>(d);
		const double seasonal = 0.8 + 0.2 * std::cos(4.0 * std::numbers::pi * (dd - 15.0) / kDaysPerYear);
		const double weekly = (d % 7 == 5 || d % 7 == 6) ? 0.9 : 1.0;
		const double day_factor = seasonal * weekly * (1.0 + 0.04 * weather);
		for (std::size_t h = 0; h < per_day; ++h) {
			const double clock = 24.0 * static_cast<double>(h) / static_cast<double>(per_day);
			profile.values[d * per_day + h] = day_factor * day_shape(clock);
		}
	}

	const double peak = *std::max_element(profile.values.begin(), profile.values.end());
	for (double &v : profile.values) {
		v /= peak;
	}
	return profile;
}

std::vector<double> sample_prices(std::size_t horizon, double low, double high, std::uint64_t rng_seed) {
	if (!(low < high)) {
		throw std::invalid_argument("sample_prices: low must be below high");
	}
	if (horizon == 0) {
		throw std::invalid_argument("sample_prices: horizon must be at least 1");
	}
	std::mt19937_64 rng(rng_seed);
	std::uniform_real_distribution<double> dist(low, high);
	std::vector<double> out(horizon);
	for (double &p : out) {
		p = dist(rng);
	}
	return out;
}

TimeSeriesDataset simulate(const Population &population, std::span<const double> prices, const LoadProfile &profile,
                           const SimulationOptions &options, SimulationTrace *trace) {
	if (prices.size() != profile.values.size()) {
		throw std::invalid_argument("simulate: prices and profile have different lengths (" +
		                            std::to_string(prices.size()) + " vs " + std::to_string(profile.values.size()) +
		                            ")");
	}
	if (population.eucs.empty()) {
		throw std::invalid_argument("simulate: empty population");
	}
	if (!(options.noise_std >= 0.0)) {
		throw std::invalid_argument("simulate: noise_std must be non-negative");
	}
	for (const EucParams &p : population.eucs) {
		p.validate();
	}

	const std::size_t horizon = prices.size();
	const std::size_t count = population.size();

	// Each customer owns an RNG substream keyed by (seed, index) so the result
	// does not depend on the order customers are visited in.
	std::vector<std::mt19937_64> streams;
	streams.reserve(count);
	for (std::size_t k = 0; k < count; ++k) {
		streams.push_back(substream(options.rng_seed, k, 0xd3a4du));
	}
	std::vector<double> demand(count, 0.0);
	std::vector<double> consumption(count, 0.0);
	std::vector<double> alpha(count);
	for (std::size_t k = 0; k < count; ++k) {
		alpha[k] = population.eucs[k].alpha;
	}

	if (trace) {
		trace->demand.assign(count, std::vector<double>(horizon));
		trace->consumption.assign(count, std::vector<double>(horizon));
	}

	TimeSeriesDataset out;
	out.intervals_per_day = options.intervals_per_day;
	out.prices.assign(prices.begin(), prices.end());
	out.consumptions.resize(horizon);
	out.hours.resize(horizon);

	// One distribution per stream: normal_distribution caches half of each
	// generated pair, which must not leak between customers.
	std::vector<std::normal_distribution<double>> gauss(count, std::normal_distribution<double>(1.0, options.noise_std));
	std::uniform_real_distribution<double> unit(0.0, 1.0);

	for (std::size_t t = 0; t < horizon; ++t) {
		double total = 0.0;
		for (std::size_t k = 0; k < count; ++k) {
			const EucParams &p = population.eucs[k];
			auto &rng = streams[k];
			const double shock = options.noise_std > 0.0 ? gauss[k](rng) : 1.0;
			const double fresh = std::max(0.0, p.peak_demand * profile.values[t] * shock);
			if (t == 0) {
				demand[k] = fresh;
			} else {
				demand[k] = step_demand(demand[k], consumption[k], alpha[k], fresh);
			}
			consumption[k] = optimal_consumption(demand[k], prices[t], p);
			if (options.resample_alpha_hourly) {
				alpha[k] = unit(rng);
			}
			total += consumption[k];
			if (trace) {
				trace->demand[k][t] = demand[k];
				trace->consumption[k][t] = consumption[k];
			}
		}
		out.consumptions[t] = total;
		out.hours[t] = static_cast<int>(t % static_cast<std::size_t>(options.intervals_per_day));
	}
	return out;
}

} // namespace dyndr
