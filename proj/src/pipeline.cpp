#include "dyndr/pipeline.hpp"

#include "dyndr/error.hpp"
#include "dyndr/io_util.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

namespace dyndr {
namespace {

std::string fixed(double v, int digits) {
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.*f", digits, v);
	return buf;
}

std::string display_name(ModelKind kind, int order) {
	switch (kind) {
	case ModelKind::linear:
		return "linear n=" + std::to_string(order);
	case ModelKind::fnn:
		return "FNN n=" + std::to_string(order);
	case ModelKind::rnn:
		return "RNN";
	case ModelKind::lstm:
		return "LSTM";
	}
	return "model";
}

TimeSeriesDataset training_prefix(const RunConfig &cfg, const TimeSeriesDataset &data) {
	if (data.size() <= cfg.train_length) {
		throw DataError("dataset has " + std::to_string(data.size()) +
		                " intervals, not more than split.train_length = " + std::to_string(cfg.train_length));
	}
	return data.slice(0, cfg.train_length);
}

struct BenchTask {
	ModelKind kind;
	int order;
};

} // namespace

TimeSeriesDataset run_simulation(const RunConfig &cfg) {
	cfg.validate();
	const SimulationConfig &s = cfg.simulation;
	LoadProfile profile;
	if (s.profile_source == ProfileSource::file) {
		profile = load_profile(s.profile_path);
		if (profile.values.size() != s.horizon) {
			throw DataError("profile file " + s.profile_path + " has " + std::to_string(profile.values.size()) +
			                " values, simulation.horizon is " + std::to_string(s.horizon));
		}
	} else {
		profile = generate_profile(s.horizon, s.intervals_per_day, s.profile_seed);
	}
	const Population population = sample_population(s.customers, s.population_seed);
	const std::vector<double> prices = sample_prices(s.horizon, s.price_low, s.price_high, s.price_seed);
	SimulationOptions opts;
	opts.noise_std = s.noise_std;
	opts.rng_seed = s.noise_seed;
	opts.intervals_per_day = s.intervals_per_day;
	opts.resample_alpha_hourly = s.resample_alpha_hourly;
	return simulate(population, prices, profile, opts);
}

int resolve_order(ModelKind kind, std::optional<int> order) {
	if (is_recurrent(kind)) {
		if (order && *order != 1) {
			throw ConfigError(std::string(to_string(kind)) + " models use fixed order-1 inputs; --order " +
			                  std::to_string(*order) + " is not a valid combination");
		}
		return 1;
	}
	if (!order) {
		throw ConfigError(std::string(to_string(kind)) + " models need an explicit --order");
	}
	if (*order < 0) {
		throw ConfigError("--order must be non-negative, got " + std::to_string(*order));
	}
	return *order;
}

TrainOutcome train_model(const RunConfig &cfg, const TimeSeriesDataset &data, ModelKind kind, int order) {
	const auto start = std::chrono::steady_clock::now();
	const TimeSeriesDataset train = training_prefix(cfg, data);
	const StateConfig state = cfg.state(order);
	TrainOutcome out;
	switch (kind) {
	case ModelKind::linear: {
		const SupervisedSet set = build_direct_dataset(train, state);
		LinearModel m = linear_fit(set);
		// Report the closed-form fit's loss in the same standardized units
		// the networks use.
		double loss = 0.0;
		for (std::size_t r = 0; r < set.size(); ++r) {
			const double e = m.scaler.apply_target(linear_forward(m, set.inputs.row(r))) -
			                 m.scaler.apply_target(set.targets[r]);
			loss += e * e;
		}
		out.final_loss = loss / static_cast<double>(set.size());
		out.initial_loss = out.final_loss;
		out.model = std::move(m);
		break;
	}
	case ModelKind::fnn: {
		const SupervisedSet set = build_direct_dataset(train, state);
		auto trained = train_fnn(set, cfg.fnn.hidden, cfg.fnn.train);
		out.initial_loss = trained.initial_loss;
		out.final_loss = trained.final_loss;
		out.model = std::move(trained.model);
		break;
	}
	case ModelKind::rnn:
	case ModelKind::lstm: {
		const ModelTrainingConfig &mc = cfg.training(kind);
		const SequenceSet set = build_sequence_dataset(train, cfg.window_length, state);
		auto trained = train_recurrent(set, kind, {mc.hidden.front(), mc.layers}, mc.train);
		out.initial_loss = trained.initial_loss;
		out.final_loss = trained.final_loss;
		out.model = std::move(trained.model);
		break;
	}
	}
	out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	return out;
}

SplitRange split_range(const RunConfig &cfg, const TimeSeriesDataset &data, const std::string &tag) {
	if (data.size() <= cfg.train_length) {
		throw DataError("dataset has " + std::to_string(data.size()) +
		                " intervals, not more than split.train_length = " + std::to_string(cfg.train_length));
	}
	if (tag == "train") {
		return {tag, 0, cfg.train_length};
	}
	if (tag == "test") {
		return {tag, cfg.train_length, data.size()};
	}
	throw ConfigError("--split must be 'train' or 'test', got '" + tag + "'");
}

void cmd_simulate(const RunConfig &cfg, const std::filesystem::path &out, std::ostream &log) {
	const TimeSeriesDataset data = run_simulation(cfg);
	write_dataset_csv(data, out);
	log << "horizon " << data.size() << " intervals, mean price " << fixed(mean_of(data.prices), 3)
	    << " $/MWh, mean consumption " << fixed(mean_of(data.consumptions), 3) << " MWh\n";
}

void cmd_train(const RunConfig &cfg, const std::filesystem::path &data_path, ModelKind kind, std::optional<int> order,
               const std::filesystem::path &out, std::ostream &log) {
	const int n = resolve_order(kind, order);
	const TimeSeriesDataset data = read_dataset_csv(data_path, cfg.simulation.intervals_per_day);
	const TrainOutcome t = train_model(cfg, data, kind, n);
	save_model(t.model, out);
	const EvalReport rep = evaluate(t.model, data, split_range(cfg, data, "train"), display_name(kind, n));
	log << display_name(kind, n) << ": final train loss " << fixed(t.final_loss, 6) << " (initial "
	    << fixed(t.initial_loss, 6) << "), train MAPE " << fixed(rep.mape_pct, 4) << "%, wall time "
	    << fixed(t.seconds, 2) << " s\n";
}

EvalReport cmd_eval(const RunConfig &cfg, const std::filesystem::path &model_path,
                    const std::filesystem::path &data_path, const std::string &split, std::optional<int> order,
                    const std::filesystem::path &out, std::ostream &log) {
	const Model model = load_model(model_path);
	const FeatureLayout &layout = layout_of(model);
	if (order && *order != layout.state.order) {
		throw DataError("feature-layout mismatch: model was trained with order " + std::to_string(layout.state.order) +
		                ", evaluation requested order " + std::to_string(*order));
	}
	if (layout.state.intervals_per_day != cfg.simulation.intervals_per_day) {
		throw DataError("feature-layout mismatch: model uses " + std::to_string(layout.state.intervals_per_day) +
		                " intervals per day, configuration uses " +
		                std::to_string(cfg.simulation.intervals_per_day));
	}
	const TimeSeriesDataset data = read_dataset_csv(data_path, cfg.simulation.intervals_per_day);
	const ModelKind kind = kind_of(model);
	EvalReport rep = evaluate(model, data, split_range(cfg, data, split), display_name(kind, layout.state.order));
	write_file_atomic(out, reports_to_json({rep}));
	log << rep.name << " " << rep.split << ": MAPE " << fixed(rep.mape_pct, 4) << "%, SDAPE "
	    << fixed(rep.sdape_pct, 4) << "% over " << rep.ape_samples.size() << " intervals\n";
	return rep;
}

BenchmarkResult cmd_benchmark(const RunConfig &cfg, const std::filesystem::path &out_dir, std::ostream &log,
                              unsigned jobs) {
	cfg.validate();
	const TimeSeriesDataset data = run_simulation(cfg);

	std::vector<BenchTask> tasks;
	for (ModelKind kind : cfg.benchmark_kinds) {
		if (is_recurrent(kind)) {
			tasks.push_back({kind, 1});
		} else {
			for (int n : cfg.benchmark_orders) {
				tasks.push_back({kind, n});
			}
		}
	}

	struct Slot {
		std::optional<TrainOutcome> trained;
		std::vector<EvalReport> reports;
		std::exception_ptr error;
	};
	std::vector<Slot> slots(tasks.size());
	std::atomic<std::size_t> next{0};
	const auto worker = [&] {
		for (std::size_t i = next++; i < tasks.size(); i = next++) {
			try {
				const BenchTask &task = tasks[i];
				TrainOutcome t = train_model(cfg, data, task.kind, task.order);
				const std::string name = display_name(task.kind, task.order);
				for (const char *split : {"train", "test"}) {
					slots[i].reports.push_back(evaluate(t.model, data, split_range(cfg, data, split), name));
				}
				slots[i].trained = std::move(t);
			} catch (...) {
				slots[i].error = std::current_exception();
			}
		}
	};
	if (jobs == 0) {
		jobs = std::max(1u, std::thread::hardware_concurrency());
	}
	jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, tasks.size()));
	if (jobs <= 1) {
		worker();
	} else {
		std::vector<std::thread> pool;
		for (unsigned j = 0; j < jobs; ++j) {
			pool.emplace_back(worker);
		}
		for (auto &th : pool) {
			th.join();
		}
	}

	BenchmarkResult result;
	for (std::size_t i = 0; i < tasks.size(); ++i) {
		const std::string stage = "train/evaluate " + display_name(tasks[i].kind, tasks[i].order);
		if (slots[i].error) {
			try {
				std::rethrow_exception(slots[i].error);
			} catch (const Error &e) {
				throw Error(e.kind(), "benchmark stage '" + stage + "' failed: " + e.what());
			} catch (const std::invalid_argument &e) {
				throw Error(ErrorKind::usage, "benchmark stage '" + stage + "' failed: " + e.what());
			} catch (const std::exception &e) {
				throw Error(ErrorKind::data, "benchmark stage '" + stage + "' failed: " + e.what());
			}
		}
		const auto &rs = slots[i].reports;
		log << display_name(tasks[i].kind, tasks[i].order) << ": final train loss "
		    << fixed(slots[i].trained->final_loss, 6) << ", train MAPE " << fixed(rs[0].mape_pct, 2)
		    << "%, test MAPE " << fixed(rs[1].mape_pct, 2) << "%, wall time " << fixed(slots[i].trained->seconds, 1)
		    << " s\n";
		result.reports.insert(result.reports.end(), rs.begin(), rs.end());
	}

	std::vector<const EvalReport *> violin;
	for (const auto &r : result.reports) {
		if (r.split != "test") {
			continue;
		}
		if (is_recurrent(r.kind) || r.order == cfg.violin_order) {
			violin.push_back(&r);
		}
	}

	// All documents are rendered before anything is written; a failure while
	// writing removes whatever was already placed in out_dir.
	std::vector<std::pair<std::filesystem::path, std::string>> files;
	files.emplace_back(out_dir / "reports.json", reports_to_json(result.reports));
	files.emplace_back(out_dir / "tables.txt", reports_to_tables(result.reports));
	files.emplace_back(out_dir / "violin.csv", violin_csv(violin));
	files.emplace_back(out_dir / "effective_config.json", config_to_json(cfg));
	for (std::size_t i = 0; i < tasks.size(); ++i) {
		const std::string stem = std::string(to_string(tasks[i].kind)) +
		                         (is_recurrent(tasks[i].kind) ? "" : "_n" + std::to_string(tasks[i].order));
		files.emplace_back(out_dir / "models" / (stem + ".json"), model_to_json(slots[i].trained->model));
	}
	try {
		for (const auto &[path, text] : files) {
			write_file_atomic(path, text);
			result.files.push_back(path);
		}
		const auto csv = out_dir / "dataset.csv";
		write_dataset_csv(data, csv);
		result.files.push_back(csv);
	} catch (...) {
		std::error_code ec;
		for (const auto &p : result.files) {
			std::filesystem::remove(p, ec);
		}
		throw;
	}
	return result;
}

} // namespace dyndr
