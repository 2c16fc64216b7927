#include "dyndr/metrics.hpp"

#include "dyndr/error.hpp"
#include "dyndr/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace dyndr {

std::vector<double> absolute_percentage_errors(std::span<const double> actual, std::span<const double> predicted) {
	if (actual.size() != predicted.size()) {
		throw std::invalid_argument("percentage errors: actual and predicted lengths differ");
	}
	if (actual.empty()) {
		throw std::invalid_argument("percentage errors: empty input");
	}
	std::vector<double> ape(actual.size());
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (!(actual[i] > 0.0)) {
			throw DataError("percentage error undefined: actual value at index " + std::to_string(i) +
			                " is not positive");
		}
		ape[i] = 100.0 * std::fabs(predicted[i] - actual[i]) / actual[i];
	}
	return ape;
}

double mean_of(std::span<const double> v) {
	if (v.empty()) {
		throw std::invalid_argument("mean of an empty sequence");
	}
	double s = 0.0;
	for (double x : v) {
		s += x;
	}
	return s / static_cast<double>(v.size());
}

double population_std_of(std::span<const double> v) {
	const double m = mean_of(v);
	double s = 0.0;
	for (double x : v) {
		s += (x - m) * (x - m);
	}
	return std::sqrt(s / static_cast<double>(v.size()));
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
	return mean_of(absolute_percentage_errors(actual, predicted));
}

double sdape(std::span<const double> actual, std::span<const double> predicted) {
	return population_std_of(absolute_percentage_errors(actual, predicted));
}

std::string describe_arch(const Model &model) {
	return std::visit(
	    [](const auto &m) -> std::string {
		    using T = std::decay_t<decltype(m)>;
		    if constexpr (std::is_same_v<T, LinearModel>) {
			    return "affine";
		    } else if constexpr (std::is_same_v<T, FnnModel>) {
			    std::string s;
			    for (std::size_t h : m.net.hidden()) {
				    s += (s.empty() ? "" : "x") + std::to_string(h);
			    }
			    return "relu " + s;
		    } else {
			    return std::to_string(m.net.layers()) + "x" + std::to_string(m.net.hidden_size()) + " warmup " +
			           std::to_string(m.warmup);
		    }
	    },
	    model);
}

EvalReport evaluate(const Model &model, const TimeSeriesDataset &data, const SplitRange &range,
                    const std::string &name) {
	if (range.begin >= range.end || range.end > data.size()) {
		throw std::invalid_argument("evaluate: split range [" + std::to_string(range.begin) + ", " +
		                            std::to_string(range.end) + ") is invalid for " + std::to_string(data.size()) +
		                            " intervals");
	}
	const std::size_t first = std::max(range.begin, history_needed(model));
	if (first >= range.end) {
		throw DataError("evaluate: split '" + range.tag + "' is too short for the model's history requirement");
	}
	EvalReport rep;
	rep.name = name;
	rep.kind = kind_of(model);
	rep.order = layout_of(model).state.order;
	rep.arch = describe_arch(model);
	rep.split = range.tag;
	rep.unscored = first - range.begin;

	const std::vector<double> predicted = predict_range(model, data, first, range.end);
	const std::span<const double> actual(data.consumptions.data() + first, range.end - first);
	rep.ape_samples = absolute_percentage_errors(actual, predicted);
	rep.mape_pct = mean_of(rep.ape_samples);
	rep.sdape_pct = population_std_of(rep.ape_samples);
	return rep;
}

std::string reports_to_json(const std::vector<EvalReport> &reports) {
	nlohmann::json doc;
	doc["metadata"] = {{"sdape_denominator", "population"},
	                   {"ape_units", "percent"},
	                   {"recurrent_warmup_steps", kDefaultWarmup}};
	nlohmann::json records = nlohmann::json::array();
	for (const EvalReport &r : reports) {
		records.push_back({{"name", r.name},
		                   {"kind", std::string(to_string(r.kind))},
		                   {"order", r.order},
		                   {"arch", r.arch},
		                   {"split", r.split},
		                   {"mape_pct", r.mape_pct},
		                   {"sdape_pct", r.sdape_pct},
		                   {"samples", r.ape_samples.size()},
		                   {"unscored", r.unscored}});
	}
	doc["records"] = records;
	return doc.dump(1, '\t') + "\n";
}

namespace {

std::string fixed2(double v) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.2f", v);
	return buf;
}

std::string pad_left(const std::string &s, std::size_t w) {
	return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string &s, std::size_t w) {
	return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

const EvalReport *find_report(const std::vector<EvalReport> &reports, ModelKind kind, int order,
                              const std::string &split) {
	for (const auto &r : reports) {
		if (r.kind == kind && r.split == split && (is_recurrent(kind) || r.order == order)) {
			return &r;
		}
	}
	return nullptr;
}

std::string table(const std::string &title, const std::vector<std::string> &header,
                  const std::vector<std::vector<std::string>> &rows) {
	constexpr std::size_t label_w = 18;
	constexpr std::size_t cell_w = 8;
	std::string out = title + "\n";
	std::string line = pad_right("", label_w);
	for (const auto &h : header) {
		line += pad_left(h, cell_w);
	}
	out += line + "\n";
	out += std::string(label_w + cell_w * header.size(), '-') + "\n";
	for (const auto &row : rows) {
		line = pad_right(row[0], label_w);
		for (std::size_t c = 1; c < row.size(); ++c) {
			line += pad_left(row[c], cell_w);
		}
		out += line + "\n";
	}
	return out;
}

std::string order_table(const std::vector<EvalReport> &reports, ModelKind kind, const std::string &title) {
	std::vector<int> orders;
	for (const auto &r : reports) {
		if (r.kind == kind && std::find(orders.begin(), orders.end(), r.order) == orders.end()) {
			orders.push_back(r.order);
		}
	}
	std::sort(orders.begin(), orders.end());
	std::vector<std::string> header;
	for (int n : orders) {
		header.push_back("n=" + std::to_string(n));
	}
	std::vector<std::vector<std::string>> rows;
	for (const std::string split : {"train", "test"}) {
		std::vector<std::string> mape_row{split + " MAPE (%)"};
		std::vector<std::string> sd_row{split + " SDAPE (%)"};
		for (int n : orders) {
			const EvalReport *r = find_report(reports, kind, n, split);
			mape_row.push_back(r ? fixed2(r->mape_pct) : "-");
			sd_row.push_back(r ? fixed2(r->sdape_pct) : "-");
		}
		rows.push_back(mape_row);
		rows.push_back(sd_row);
	}
	return table(title, header, rows);
}

} // namespace

std::string reports_to_tables(const std::vector<EvalReport> &reports) {
	std::string out;
	out += order_table(reports, ModelKind::linear, "Linear dynamical DR model");
	out += "\n";
	out += order_table(reports, ModelKind::fnn, "FNN dynamical DR model");
	out += "\n";
	std::vector<std::vector<std::string>> rows;
	for (const std::string split : {"train", "test"}) {
		std::vector<std::string> mape_row{split + " MAPE (%)"};
		std::vector<std::string> sd_row{split + " SDAPE (%)"};
		for (ModelKind k : {ModelKind::rnn, ModelKind::lstm}) {
			const EvalReport *r = find_report(reports, k, 1, split);
			mape_row.push_back(r ? fixed2(r->mape_pct) : "-");
			sd_row.push_back(r ? fixed2(r->sdape_pct) : "-");
		}
		rows.push_back(mape_row);
		rows.push_back(sd_row);
	}
	out += table("Recurrent dynamical DR model", {"RNN", "LSTM"}, rows);
	return out;
}

std::string violin_csv(const std::vector<const EvalReport *> &reports) {
	std::string out = "model,ape_pct\n";
	for (const EvalReport *r : reports) {
		for (double a : r->ape_samples) {
			out += r->name;
			out += ',';
			out += format_double(a);
			out += '\n';
		}
	}
	return out;
}

} // namespace dyndr
