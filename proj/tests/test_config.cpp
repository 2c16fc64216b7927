#include "doctest.h"
#include "support.hpp"

#include "dyndr/config.hpp"
#include "dyndr/error.hpp"

using namespace dyndr;

namespace {

std::string config_error(const std::string &text) {
	try {
		parse_config(text).validate();
	} catch (const ConfigError &e) {
		return e.what();
	}
	return "accepted";
}

} // namespace

TEST_CASE("defaults describe the reference experiment") {
	RunConfig cfg = parse_config("{}");
	cfg.validate();
	CHECK(cfg.simulation.customers == 100);
	CHECK(cfg.simulation.horizon == 8760);
	CHECK(cfg.simulation.intervals_per_day == 24);
	CHECK(cfg.simulation.price_low == 20.0);
	CHECK(cfg.simulation.price_high == 50.0);
	CHECK(cfg.train_length == 7296);
	for (auto kind : {ModelKind::fnn, ModelKind::rnn, ModelKind::lstm}) {
		const auto &t = cfg.training(kind).train;
		CHECK(t.learning_rate == 0.001);
		CHECK(t.steps == 10000);
		CHECK(t.batch_size == 32);
	}
	CHECK(cfg.fnn.hidden == std::vector<std::size_t>{32, 32});
	CHECK(cfg.rnn.hidden == std::vector<std::size_t>{32});
	CHECK(cfg.rnn.layers == 1);
	CHECK(cfg.lstm.hidden == std::vector<std::size_t>{32});
	CHECK(cfg.benchmark_orders == std::vector<int>{0, 1, 2, 3, 4, 5});
	CHECK(cfg.benchmark_kinds.size() == 4);
}

TEST_CASE("dumped configuration round-trips") {
	RunConfig cfg = parse_config(R"({
		"simulation": {"customers": 7, "horizon": 240, "seeds": {"noise": 99},
		               "profile": {"source": "file", "path": "p.csv"}},
		"split": {"train_length": 200},
		"features": {"time_encoding": "one_hot", "window_length": 30},
		"training": {"fnn": {"hidden": [4, 5, 6], "steps": 12},
		             "lstm": {"hidden": 9, "layers": 2, "gradient_clip_norm": 1.5}},
		"benchmark": {"kinds": ["fnn", "lstm"], "orders": [1, 3], "violin_order": 3, "output_dir": "x"}
	})");
	CHECK(cfg.simulation.customers == 7);
	CHECK(cfg.simulation.noise_seed == 99);
	CHECK(cfg.simulation.profile_source == ProfileSource::file);
	CHECK(cfg.time_encoding == TimeEncoding::one_hot);
	CHECK(cfg.fnn.hidden == std::vector<std::size_t>{4, 5, 6});
	CHECK(cfg.lstm.layers == 2);
	CHECK(cfg.lstm.hidden == std::vector<std::size_t>{9});
	CHECK(cfg.benchmark_kinds == std::vector<ModelKind>{ModelKind::fnn, ModelKind::lstm});

	const std::string dumped = config_to_json(cfg);
	CHECK(config_to_json(parse_config(dumped)) == dumped);
	const std::string defaults = config_to_json(RunConfig{});
	CHECK(config_to_json(parse_config(defaults)) == defaults);
	CHECK(config_to_json(parse_config("{}")) == defaults);
}

TEST_CASE("schema violations name the field path") {
	CHECK(config_error(R"({"simulation": {"custmers": 3}})").find("simulation.custmers") != std::string::npos);
	CHECK(config_error(R"({"training": {"rnn": {"hiden": 3}}})").find("training.rnn.hiden") != std::string::npos);
	CHECK(config_error(R"({"bogus": {}})").find("'bogus'") != std::string::npos);
	CHECK(config_error(R"({"simulation": {"horizon": "long"}})").find("simulation.horizon") != std::string::npos);
	CHECK(config_error(R"({"simulation": 5})").find("simulation") != std::string::npos);
	CHECK(config_error("{not json").find("not valid JSON") != std::string::npos);
	CHECK(config_error(R"({"features": {"time_encoding": "cyclic"}})") != "accepted");
	CHECK(config_error(R"({"benchmark": {"kinds": ["gru"]}})") != "accepted");
}

TEST_CASE("semantic validation") {
	CHECK(config_error(R"({"simulation": {"horizon": 100}})").find("multiple") != std::string::npos);
	CHECK(config_error(R"({"split": {"train_length": 8760}})") != "accepted");
	CHECK(config_error(R"({"simulation": {"price_low": 60}})") != "accepted");
	CHECK(config_error(R"({"training": {"fnn": {"learning_rate": 0}}})") != "accepted");
	CHECK(config_error(R"({"training": {"fnn": {"hidden": []}}})") != "accepted");
	CHECK(config_error(R"({"simulation": {"profile": {"source": "file"}}})").find("path") != std::string::npos);
	CHECK(config_error(R"({"features": {"window_length": 1}})") != "accepted");
	CHECK(config_error(R"({"benchmark": {"orders": [-1]}})") != "accepted");
}

TEST_CASE("load_config reads files") {
	testutil::TempDir dir("cfg");
	testutil::spit(dir / "c.json", R"({"simulation": {"customers": 3}})");
	CHECK(load_config(dir / "c.json").simulation.customers == 3);
	CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}
