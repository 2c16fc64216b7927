#pragma once
// The simulate / train / eval / benchmark stages behind the command-line tool.

#include "dyndr/config.hpp"
#include "dyndr/metrics.hpp"
#include "dyndr/models.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dyndr {

TimeSeriesDataset run_simulation(const RunConfig &cfg);

struct TrainOutcome {
	Model model;
	double initial_loss = 0.0;
	double final_loss = 0.0;
	double seconds = 0.0;
};

// Resolves the state order for a model kind. Recurrent kinds always use
// order 1; an explicit different order is rejected.
int resolve_order(ModelKind kind, std::optional<int> order);

// Trains on the training prefix of `data` (split.train_length intervals).
TrainOutcome train_model(const RunConfig &cfg, const TimeSeriesDataset &data, ModelKind kind, int order);

SplitRange split_range(const RunConfig &cfg, const TimeSeriesDataset &data, const std::string &tag);

void cmd_simulate(const RunConfig &cfg, const std::filesystem::path &out, std::ostream &log);
void cmd_train(const RunConfig &cfg, const std::filesystem::path &data_path, ModelKind kind, std::optional<int> order,
               const std::filesystem::path &out, std::ostream &log);
EvalReport cmd_eval(const RunConfig &cfg, const std::filesystem::path &model_path,
                    const std::filesystem::path &data_path, const std::string &split, std::optional<int> order,
                    const std::filesystem::path &out, std::ostream &log);

struct BenchmarkResult {
	std::vector<EvalReport> reports;
	std::vector<std::filesystem::path> files;
};

// Trains every configured model on one simulated dataset and writes
// reports.json, tables.txt, violin.csv, dataset.csv, effective_config.json and
// models/*.json into out_dir. jobs == 0 picks the hardware concurrency.
BenchmarkResult cmd_benchmark(const RunConfig &cfg, const std::filesystem::path &out_dir, std::ostream &log,
                              unsigned jobs = 0);

} // namespace dyndr
