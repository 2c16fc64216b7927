#pragma once
// Small helpers shared by the test binaries.

#include "dyndr/euc_sim.hpp"
#include "dyndr/matrix.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
	explicit TempDir(const std::string &tag) {
		auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
		path_ = fs::temp_directory_path() / ("dyndr_" + tag + "_" + std::to_string(stamp));
		fs::create_directories(path_);
	}
	~TempDir() {
		std::error_code ec;
		fs::remove_all(path_, ec);
	}
	TempDir(const TempDir &) = delete;
	TempDir &operator=(const TempDir &) = delete;

	const fs::path &path() const { return path_; }
	fs::path operator/(const std::string &name) const { return path_ / name; }

private:
	fs::path path_;
};

inline std::string slurp(const fs::path &p) {
	std::ifstream in(p, std::ios::binary);
	return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const fs::path &p, const std::string &text) {
	std::ofstream out(p, std::ios::binary);
	out << text;
}

inline dyndr::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64 &rng, double scale = 1.0) {
	std::uniform_real_distribution<double> u(-scale, scale);
	dyndr::Matrix m(rows, cols);
	for (auto &v : m.flat()) {
		v = u(rng);
	}
	return m;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64 &rng, double lo = -1.0, double hi = 1.0) {
	std::uniform_real_distribution<double> u(lo, hi);
	std::vector<double> v(n);
	for (auto &x : v) {
		x = u(rng);
	}
	return v;
}

// A small but realistic simulated series.
inline dyndr::TimeSeriesDataset small_dataset(std::size_t horizon = 24 * 40, std::size_t customers = 20,
                                              std::uint64_t seed = 5) {
	auto pop = dyndr::sample_population(customers, seed);
	auto prices = dyndr::sample_prices(horizon, 20.0, 50.0, seed + 1);
	auto profile = dyndr::generate_profile(horizon, 24, seed + 2);
	dyndr::SimulationOptions opt;
	opt.rng_seed = seed + 3;
	return dyndr::simulate(pop, prices, profile, opt);
}

// Series following an exact rule, hours labelled t mod 24.
template <class F>
dyndr::TimeSeriesDataset rule_dataset(std::size_t horizon, std::uint64_t seed, F consumption_of_price) {
	dyndr::TimeSeriesDataset ts;
	ts.prices = dyndr::sample_prices(horizon, 20.0, 50.0, seed);
	for (std::size_t t = 0; t < horizon; ++t) {
		ts.consumptions.push_back(consumption_of_price(ts.prices[t]));
		ts.hours.push_back(static_cast<int>(t % 24));
	}
	return ts;
}

inline double rel_diff(double a, double b) {
	double d = std::abs(a - b);
	double s = std::max(std::abs(a), std::abs(b));
	return s == 0.0 ? 0.0 : d / s;
}

} // namespace testutil
