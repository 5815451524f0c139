#ifndef MBF_BENCH_HPP
#define MBF_BENCH_HPP

#include "mbf/forest.hpp"
#include "mbf/stream.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mbf {

enum class DatasetKind { RbfStable, RbfDrift, Csv };

struct DatasetSpec {
	DatasetKind kind = DatasetKind::RbfStable;
	RbfGeneratorConfig rbf;			   // generator kinds
	std::size_t length = 20000;		   // generator kinds
	double drift_speed = 1e-4;		   // RbfDrift only
	std::filesystem::path csv_path;	   // Csv only
	CsvOptions csv;					   // Csv only
	std::size_t csv_window = 0;		   // > 0: raw sensor rows, window them
	bool shuffle = false;			   // applied before label drift
	std::uint64_t shuffle_seed = 1;
	std::size_t label_drift_shift = 0; // 0 disables
};

Dataset load_dataset(const DatasetSpec &spec);

enum class RunMode { Fixed, Dynamic, ScheduledAdd, ScheduledRemove };

struct ExperimentConfig {
	std::string id; // generated when empty
	std::size_t memory_bytes = 200000;
	RunMode mode = RunMode::Fixed;
	std::size_t trees = 1; // Fixed: tree count; scheduled modes: target count
	DynamicConfig dynamic;	// addition_strategy is also the scheduled-add trimming strategy
	std::size_t window_size = 200;
	double fading_factor = 0.995;
	double eval_fading = 0.99;
	std::uint64_t seed = 1;
	std::size_t checkpoint_interval = 100;
	std::size_t remove_start = 50;
};

struct CheckpointRow {
	std::size_t point_index = 0; // points processed so far
	double f1 = 0.0;
	std::size_t tree_count = 0;
	std::size_t pool_used = 0;
	std::size_t max_depth = 0;

	bool operator==(const CheckpointRow &) const = default;
};

struct RunResult {
	std::string config_id;
	std::vector<CheckpointRow> rows;
	double final_f1 = 0.0;
	std::size_t final_tree_count = 0;
	std::size_t additions = 0;
	std::size_t removals = 0;
	std::size_t capacity = 0;

	bool operator==(const RunResult &) const = default;
};

std::string describe(const ExperimentConfig &config);

/// Point indices (0-based, before training that point) at which a scheduled
/// run changes its tree count by one. Changes are spaced floor(n / (k + 1))
/// apart, k being the number of changes.
std::vector<std::size_t> schedule_indices(std::size_t stream_length, std::size_t start, std::size_t target);

/// Observer hook for tests: called with (point index, prequential label)
/// after the evaluation update and before training.
using EvaluationHook = std::function<void(std::size_t, Label)>;

RunResult run_experiment(const Dataset &data, const ExperimentConfig &config, const EvaluationHook &hook = {});

struct SweepResult {
	std::vector<std::size_t> counts;
	std::vector<RunResult> runs;
	std::size_t best_index = 0; // first maximum of final F1
};

/// One Fixed run per tree count over the same materialised stream. Runs are
/// spread over `threads` workers (0: hardware concurrency).
SweepResult sweep_tree_count(const Dataset &data, const ExperimentConfig &base, const std::vector<std::size_t> &counts,
							 unsigned threads = 0);

struct Combination {
	LeafStrategy strategy = LeafStrategy::Count;
	TrackerKind tracker = TrackerKind::Fading;
	ComparisonTest test = ComparisonTest::SumStd;

	bool operator==(const Combination &) const = default;
};

/// {random, depth, count} x {sliding, fading} x {sum-var, t-test, z-test, sum-std}.
std::vector<Combination> all_combinations();
std::string to_string(const Combination &c); // e.g. "count,fading,sum-std"
Combination parse_combination(const std::string &text);
std::string to_string(LeafStrategy s);
std::string to_string(TrackerKind k);
std::string to_string(ComparisonTest t);

struct CompareRow {
	Combination combination;
	std::size_t memory_bytes = 0;
	double f1 = 0.0;
	double fixed_optimal_f1 = 0.0;
	std::size_t fixed_optimal_trees = 0;
	double ratio = 0.0;
	std::size_t additions = 0;
};

struct CompareResult {
	std::vector<CompareRow> rows; // memory-major, then combination order
	std::vector<RunResult> runs;  // every fixed and dynamic run, same order
};

inline const std::vector<std::size_t> kDefaultSweepCounts{1, 2, 3, 5, 8, 10, 15, 20, 30, 50};

CompareResult compare_dynamic_vs_fixed(const Dataset &data, const ExperimentConfig &base,
									   const std::vector<std::size_t> &memories,
									   const std::vector<Combination> &combinations,
									   const std::vector<std::size_t> &counts = kDefaultSweepCounts,
									   unsigned threads = 0);

void write_checkpoints_csv(std::ostream &out, const RunResult &result);
void write_summary_csv(std::ostream &out, const std::vector<RunResult> &results);
void write_compare_csv(std::ostream &out, const std::vector<CompareRow> &rows);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn);

} // namespace mbf

#endif
