// Command-line front end: simulate, train, eval, benchmark.

#include "dyndr/config.hpp"
#include "dyndr/error.hpp"
#include "dyndr/io_util.hpp"
#include "dyndr/kernels.hpp"
#include "dyndr/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

dyndr::RunConfig config_from(const std::string &path) {
	return path.empty() ? dyndr::parse_config("{}") : dyndr::load_config(path);
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Dynamical demand-response toolkit: simulate customers, train and evaluate response models"};
	app.require_subcommand(1);

	std::string config_path;
	std::string out;
	std::string data_path;
	std::string model_name;
	std::string model_path;
	std::string split = "test";
	std::string kernels = "auto";
	std::string dump_config;
	std::optional<int> order;
	unsigned jobs = 0;

	const auto common = [&](CLI::App *cmd) {
		cmd->add_option("--config", config_path, "run configuration (JSON); defaults apply when omitted");
		cmd->add_option("--out", out, "output path")->required();
		cmd->add_option("--kernels", kernels, "kernel backend: auto, scalar or avx2");
		cmd->add_option("--dump-config", dump_config, "write the effective configuration to this path");
	};

	CLI::App *sim = app.add_subcommand("simulate", "simulate the customer population and write a dataset CSV");
	common(sim);

	CLI::App *train = app.add_subcommand("train", "train one model on the training split of a dataset");
	common(train);
	train->add_option("--data", data_path, "dataset CSV")->required();
	train->add_option("--model", model_name, "linear, fnn, rnn or lstm")->required();
	train->add_option("--order", order, "state order n (direct models)");

	CLI::App *eval = app.add_subcommand("eval", "evaluate a saved model on one split");
	common(eval);
	eval->add_option("--model", model_path, "model document")->required();
	eval->add_option("--data", data_path, "dataset CSV")->required();
	eval->add_option("--split", split, "train or test");
	eval->add_option("--order", order, "expected state order (checked against the model)");

	CLI::App *bench = app.add_subcommand("benchmark", "run the full benchmark and write reports into a directory");
	common(bench);
	bench->add_option("--jobs", jobs, "concurrent trainings (0 = hardware concurrency)");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		return app.exit(e) == 0 ? 0 : 1;
	}

	try {
		dyndr::kernels::set_backend(dyndr::kernels::parse_backend(kernels));
		const dyndr::RunConfig cfg = config_from(config_path);
		if (!dump_config.empty()) {
			dyndr::write_file_atomic(dump_config, dyndr::config_to_json(cfg));
		}
		if (sim->parsed()) {
			dyndr::cmd_simulate(cfg, out, std::cout);
		} else if (train->parsed()) {
			dyndr::cmd_train(cfg, data_path, dyndr::parse_model_kind(model_name), order, out, std::cout);
		} else if (eval->parsed()) {
			dyndr::cmd_eval(cfg, model_path, data_path, split, order, out, std::cout);
		} else if (bench->parsed()) {
			dyndr::cmd_benchmark(cfg, out, std::cout, jobs);
			std::cout << "wrote reports to " << out << "\n";
		}
	} catch (const dyndr::Error &e) {
		std::cerr << "error: " << e.what() << "\n";
		return static_cast<int>(e.kind());
	} catch (const std::invalid_argument &e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	}
	return 0;
}
