#include "dyndr/config.hpp"

#include "dyndr/error.hpp"
#include "dyndr/io_util.hpp"

#include <json.hpp>

#include <set>

namespace dyndr {
namespace {

using nlohmann::json;

// Reads fields out of one JSON object and reports anything left unread.
class Section {
public:
	Section(const json &obj, std::string path) : obj_(obj), path_(std::move(path)) {
		if (!obj_.is_object()) {
			throw ConfigError("config: '" + path_ + "' must be an object");
		}
	}

	template <class T>
	void read(const char *key, T &out) {
		seen_.insert(key);
		if (!obj_.contains(key)) {
			return;
		}
		try {
			out = obj_.at(key).get<T>();
		} catch (const json::exception &) {
			throw ConfigError("config: field '" + where(key) + "' has the wrong type");
		}
	}

	Section child(const char *key) {
		seen_.insert(key);
		static const json empty = json::object();
		return Section(obj_.contains(key) ? obj_.at(key) : empty, where(key));
	}

	bool has(const char *key) const { return obj_.contains(key); }
	std::string where(const char *key) const { return path_.empty() ? key : path_ + "." + key; }

	void finish() const {
		for (const auto &item : obj_.items()) {
			if (!seen_.count(item.key())) {
				throw ConfigError("config: unknown field '" + where(item.key().c_str()) + "'");
			}
		}
	}

private:
	const json &obj_;
	std::string path_;
	std::set<std::string> seen_;
};

void read_training(Section s, ModelTrainingConfig &m, bool recurrent) {
	TrainConfig &t = m.train;
	s.read("learning_rate", t.learning_rate);
	s.read("steps", t.steps);
	s.read("batch_size", t.batch_size);
	s.read("beta1", t.beta1);
	s.read("beta2", t.beta2);
	s.read("epsilon", t.epsilon);
	s.read("seed", t.rng_seed);
	s.read("gradient_clip_norm", t.gradient_clip_norm);
	if (recurrent) {
		std::size_t hidden = m.hidden.empty() ? 32 : m.hidden.front();
		s.read("hidden", hidden);
		m.hidden = {hidden};
		s.read("layers", m.layers);
	} else {
		s.read("hidden", m.hidden);
	}
	s.finish();
}

json training_json(const ModelTrainingConfig &m, bool recurrent) {
	const TrainConfig &t = m.train;
	json j = {{"learning_rate", t.learning_rate}, {"steps", t.steps},
	          {"batch_size", t.batch_size},       {"beta1", t.beta1},
	          {"beta2", t.beta2},                 {"epsilon", t.epsilon},
	          {"seed", t.rng_seed},               {"gradient_clip_norm", t.gradient_clip_norm}};
	if (recurrent) {
		j["hidden"] = m.hidden.front();
		j["layers"] = m.layers;
	} else {
		j["hidden"] = m.hidden;
	}
	return j;
}

} // namespace

RunConfig::RunConfig() {
	fnn.hidden = {32, 32};
	fnn.train.rng_seed = 11;
	rnn.hidden = {32};
	rnn.train.rng_seed = 12;
	lstm.hidden = {32};
	lstm.train.rng_seed = 13;
}

const ModelTrainingConfig &RunConfig::training(ModelKind kind) const {
	switch (kind) {
	case ModelKind::rnn:
		return rnn;
	case ModelKind::lstm:
		return lstm;
	default:
		return fnn;
	}
}

void RunConfig::validate() const {
	const auto &s = simulation;
	if (s.customers < 1) {
		throw ConfigError("config: simulation.customers must be at least 1");
	}
	if (s.intervals_per_day < 1) {
		throw ConfigError("config: simulation.intervals_per_day must be positive");
	}
	if (s.horizon == 0 || s.horizon % static_cast<std::size_t>(s.intervals_per_day) != 0) {
		throw ConfigError("config: simulation.horizon must be a positive multiple of simulation.intervals_per_day");
	}
	if (!(s.price_low >= 0.0 && s.price_low < s.price_high)) {
		throw ConfigError("config: simulation.price_low must be non-negative and below simulation.price_high");
	}
	if (!(s.noise_std >= 0.0)) {
		throw ConfigError("config: simulation.noise_std must be non-negative");
	}
	if (s.profile_source == ProfileSource::file && s.profile_path.empty()) {
		throw ConfigError("config: simulation.profile.path is required when source is 'file'");
	}
	if (train_length == 0 || train_length >= s.horizon) {
		throw ConfigError("config: split.train_length must lie strictly between 0 and simulation.horizon");
	}
	if (window_length < 2) {
		throw ConfigError("config: features.window_length must be at least 2");
	}
	for (const auto *m : {&fnn, &rnn, &lstm}) {
		try {
			m->train.validate();
		} catch (const std::invalid_argument &e) {
			throw ConfigError(std::string("config: training: ") + e.what());
		}
		if (m->hidden.empty() || m->layers < 1) {
			throw ConfigError("config: training: hidden sizes and layers must be positive");
		}
		for (std::size_t h : m->hidden) {
			if (h == 0) {
				throw ConfigError("config: training: hidden sizes must be positive");
			}
		}
	}
	for (int n : benchmark_orders) {
		if (n < 0) {
			throw ConfigError("config: benchmark.orders must be non-negative");
		}
	}
}

RunConfig parse_config(const std::string &text) {
	json doc;
	try {
		doc = json::parse(text);
	} catch (const json::parse_error &e) {
		throw ConfigError(std::string("config: not valid JSON: ") + e.what());
	}
	RunConfig cfg;
	Section root(doc, "");

	{
		Section sim = root.child("simulation");
		auto &s = cfg.simulation;
		sim.read("customers", s.customers);
		sim.read("horizon", s.horizon);
		sim.read("intervals_per_day", s.intervals_per_day);
		sim.read("price_low", s.price_low);
		sim.read("price_high", s.price_high);
		sim.read("noise_std", s.noise_std);
		sim.read("resample_alpha_hourly", s.resample_alpha_hourly);
		{
			Section prof = sim.child("profile");
			std::string source = s.profile_source == ProfileSource::file ? "file" : "synthetic";
			prof.read("source", source);
			if (source != "synthetic" && source != "file") {
				throw ConfigError("config: simulation.profile.source must be 'synthetic' or 'file'");
			}
			s.profile_source = source == "file" ? ProfileSource::file : ProfileSource::synthetic;
			prof.read("path", s.profile_path);
			prof.finish();
		}
		{
			Section seeds = sim.child("seeds");
			seeds.read("population", s.population_seed);
			seeds.read("prices", s.price_seed);
			seeds.read("profile", s.profile_seed);
			seeds.read("noise", s.noise_seed);
			seeds.finish();
		}
		sim.finish();
	}
	{
		Section sp = root.child("split");
		sp.read("train_length", cfg.train_length);
		sp.finish();
	}
	{
		Section f = root.child("features");
		std::string enc(to_string(cfg.time_encoding));
		f.read("time_encoding", enc);
		try {
			cfg.time_encoding = parse_time_encoding(enc);
		} catch (const std::invalid_argument &) {
			throw ConfigError("config: features.time_encoding must be scalar, one_hot or none");
		}
		f.read("window_length", cfg.window_length);
		f.finish();
	}
	{
		Section tr = root.child("training");
		read_training(tr.child("fnn"), cfg.fnn, false);
		read_training(tr.child("rnn"), cfg.rnn, true);
		read_training(tr.child("lstm"), cfg.lstm, true);
		tr.finish();
	}
	{
		Section b = root.child("benchmark");
		const bool kinds_given = b.has("kinds");
		std::vector<std::string> names;
		b.read("kinds", names);
		if (kinds_given) {
			cfg.benchmark_kinds.clear();
			for (const auto &n : names) {
				try {
					cfg.benchmark_kinds.push_back(parse_model_kind(n));
				} catch (const std::invalid_argument &) {
					throw ConfigError("config: benchmark.kinds contains unknown kind '" + n + "'");
				}
			}
		}
		b.read("orders", cfg.benchmark_orders);
		b.read("violin_order", cfg.violin_order);
		b.read("output_dir", cfg.output_dir);
		b.finish();
	}
	root.finish();
	cfg.validate();
	return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
	std::string text;
	try {
		text = read_file(path);
	} catch (const DataError &) {
		throw ConfigError("config: cannot read " + path.string());
	}
	return parse_config(text);
}

std::string config_to_json(const RunConfig &cfg) {
	const auto &s = cfg.simulation;
	std::vector<std::string> kinds;
	for (ModelKind k : cfg.benchmark_kinds) {
		kinds.emplace_back(to_string(k));
	}
	json doc = {
	    {"simulation",
	     {{"customers", s.customers},
	      {"horizon", s.horizon},
	      {"intervals_per_day", s.intervals_per_day},
	      {"price_low", s.price_low},
	      {"price_high", s.price_high},
	      {"noise_std", s.noise_std},
	      {"resample_alpha_hourly", s.resample_alpha_hourly},
	      {"profile",
	       {{"source", s.profile_source == ProfileSource::file ? "file" : "synthetic"}, {"path", s.profile_path}}},
	      {"seeds",
	       {{"population", s.population_seed},
	        {"prices", s.price_seed},
	        {"profile", s.profile_seed},
	        {"noise", s.noise_seed}}}}},
	    {"split", {{"train_length", cfg.train_length}}},
	    {"features", {{"time_encoding", std::string(to_string(cfg.time_encoding))}, {"window_length", cfg.window_length}}},
	    {"training",
	     {{"fnn", training_json(cfg.fnn, false)},
	      {"rnn", training_json(cfg.rnn, true)},
	      {"lstm", training_json(cfg.lstm, true)}}},
	    {"benchmark",
	     {{"kinds", kinds},
	      {"orders", cfg.benchmark_orders},
	      {"violin_order", cfg.violin_order},
	      {"output_dir", cfg.output_dir}}}};
	return doc.dump(1, '\t') + "\n";
}

} // namespace dyndr
