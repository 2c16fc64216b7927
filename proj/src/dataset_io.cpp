#include "dyndr/error.hpp"
#include "dyndr/euc_sim.hpp"
#include "dyndr/io_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dyndr {
namespace {

std::string_view trim(std::string_view s) {
	const auto first = s.find_first_not_of(" \t\r\n");
	if (first == std::string_view::npos) {
		return {};
	}
	const auto last = s.find_last_not_of(" \t\r\n");
	return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view text, double &out) {
	text = trim(text);
	if (text.empty()) {
		return false;
	}
	if (text.front() == '+') {
		text.remove_prefix(1);
	}
	const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
	return ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
	if (path.has_parent_path()) {
		std::filesystem::create_directories(path.parent_path());
	}
	std::filesystem::path tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out) {
			throw DataError("cannot open " + tmp.string() + " for writing");
		}
		out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
		if (!out) {
			throw DataError("failed writing " + tmp.string());
		}
	}
	std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw DataError("cannot open " + path.string());
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

std::string format_double(double v) {
	char buf[64];
	const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, ptr);
}

LoadProfile load_profile(const std::filesystem::path &path) {
	if (!std::filesystem::exists(path)) {
		throw DataError("profile file not found: " + path.string());
	}
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot open profile file " + path.string());
	}
	LoadProfile profile;
	profile.source = ProfileSource::file;
	std::string line;
	std::size_t row = 0;
	while (std::getline(in, line)) {
		++row;
		const std::string_view text = trim(line);
		if (text.empty() || text.front() == '#') {
			continue;
		}
		double v = 0.0;
		if (!parse_number(text, v) || !std::isfinite(v)) {
			throw DataError("non-numeric value at row " + std::to_string(row));
		}
		if (!(v > 0.0)) {
			throw DataError("non-positive value at row " + std::to_string(row));
		}
		profile.values.push_back(v);
	}
	if (profile.values.empty()) {
		throw DataError("profile file " + path.string() + " contains no values");
	}
	const double peak = *std::max_element(profile.values.begin(), profile.values.end());
	for (double &v : profile.values) {
		v /= peak;
	}
	return profile;
}

void write_dataset_csv(const TimeSeriesDataset &ts, const std::filesystem::path &path) {
	ts.validate();
	std::string out = "t,hour,price_usd_per_mwh,consumption_mwh\n";
	out.reserve(ts.size() * 48);
	for (std::size_t t = 0; t < ts.size(); ++t) {
		out += std::to_string(t);
		out += ',';
		out += std::to_string(ts.hours[t]);
		out += ',';
		out += format_double(ts.prices[t]);
		out += ',';
		out += format_double(ts.consumptions[t]);
		out += '\n';
	}
	write_file_atomic(path, out);
}

TimeSeriesDataset read_dataset_csv(const std::filesystem::path &path, int intervals_per_day) {
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot open dataset " + path.string());
	}
	std::string line;
	if (!std::getline(in, line) || trim(line) != "t,hour,price_usd_per_mwh,consumption_mwh") {
		throw DataError(path.string() + ": expected header t,hour,price_usd_per_mwh,consumption_mwh");
	}
	TimeSeriesDataset ts;
	ts.intervals_per_day = intervals_per_day;
	std::size_t row = 1;
	while (std::getline(in, line)) {
		++row;
		if (trim(line).empty()) {
			continue;
		}
		std::string_view rest = line;
		double fields[4];
		for (int f = 0; f < 4; ++f) {
			const auto comma = rest.find(',');
			const std::string_view cell = f < 3 ? rest.substr(0, comma) : rest;
			if ((f < 3 && comma == std::string_view::npos) || !parse_number(cell, fields[f])) {
				throw DataError(path.string() + ": malformed row " + std::to_string(row));
			}
			if (f < 3) {
				rest.remove_prefix(comma + 1);
			}
		}
		const std::size_t t = ts.size();
		if (fields[0] != static_cast<double>(t)) {
			throw DataError(path.string() + ": row " + std::to_string(row) + " has t out of sequence");
		}
		if (fields[1] != static_cast<double>(t % static_cast<std::size_t>(intervals_per_day))) {
			throw DataError(path.string() + ": row " + std::to_string(row) + " hour does not equal t mod " +
			                std::to_string(intervals_per_day));
		}
		ts.hours.push_back(static_cast<int>(fields[1]));
		ts.prices.push_back(fields[2]);
		ts.consumptions.push_back(fields[3]);
	}
	ts.validate();
	return ts;
}

} // namespace dyndr
