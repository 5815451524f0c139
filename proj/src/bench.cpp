#include "mbf/bench.hpp"

#include "mbf/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace mbf {

Dataset load_dataset(const DatasetSpec &spec)
{
	Dataset data;
	switch (spec.kind) {
	case DatasetKind::RbfStable:
	case DatasetKind::RbfDrift: {
		if (spec.length == 0)
			throw ConfigError("generated stream length must be positive");
		RbfGeneratorConfig rbf = spec.rbf;
		rbf.drift_speed = spec.kind == DatasetKind::RbfDrift ? spec.drift_speed : 0.0;
		data.points = rbf_generate(rbf, spec.length);
		data.spec = {rbf.feature_count, rbf.label_count, data.points.size()};
		break;
	}
	case DatasetKind::Csv:
		data = csv_load(spec.csv_path, spec.csv);
		if (spec.csv_window > 0) {
			data.points = window_features(data.points, spec.csv_window);
			if (data.points.empty())
				throw ConfigError("CSV holds fewer rows than one window");
			data.spec.feature_count *= 2;
		}
		break;
	}
	if (spec.shuffle)
		data.points = shuffle(std::move(data.points), spec.shuffle_seed);
	if (spec.label_drift_shift > 0)
		data.points = inject_label_drift(std::move(data.points), data.spec.label_count, spec.label_drift_shift);
	data.spec.length = data.points.size();
	return data;
}

std::string to_string(LeafStrategy s)
{
	switch (s) {
	case LeafStrategy::Random:
		return "random";
	case LeafStrategy::Depth:
		return "depth";
	case LeafStrategy::Count:
		return "count";
	}
	return "?";
}

std::string to_string(TrackerKind k) { return k == TrackerKind::Sliding ? "sliding" : "fading"; }

std::string to_string(ComparisonTest t)
{
	switch (t) {
	case ComparisonTest::SumVar:
		return "sum-var";
	case ComparisonTest::TTest:
		return "t-test";
	case ComparisonTest::ZTest:
		return "z-test";
	case ComparisonTest::SumStd:
		return "sum-std";
	}
	return "?";
}

std::string to_string(const Combination &c)
{
	return to_string(c.strategy) + "," + to_string(c.tracker) + "," + to_string(c.test);
}

std::vector<Combination> all_combinations()
{
	std::vector<Combination> out;
	for (auto s : {LeafStrategy::Random, LeafStrategy::Depth, LeafStrategy::Count})
		for (auto k : {TrackerKind::Sliding, TrackerKind::Fading})
			for (auto t : {ComparisonTest::SumVar, ComparisonTest::TTest, ComparisonTest::ZTest, ComparisonTest::SumStd})
				out.push_back({s, k, t});
	return out;
}

Combination parse_combination(const std::string &text)
{
	for (const auto &c : all_combinations())
		if (to_string(c) == text)
			return c;
	throw ConfigError("unknown combination '" + text + "' (expected <random|depth|count>,<sliding|fading>,"
					  "<sum-var|t-test|z-test|sum-std>)");
}

std::string describe(const ExperimentConfig &c)
{
	if (!c.id.empty())
		return c.id;
	std::string mode;
	switch (c.mode) {
	case RunMode::Fixed:
		mode = "fixed-T" + std::to_string(c.trees);
		break;
	case RunMode::Dynamic:
		mode = "dynamic-" + to_string(c.dynamic.addition_strategy) + "-" + to_string(c.dynamic.tracker_kind) + "-" +
			   to_string(c.dynamic.comparison_test);
		break;
	case RunMode::ScheduledAdd:
		mode = "add-" + to_string(c.dynamic.addition_strategy) + "-T" + std::to_string(c.trees);
		break;
	case RunMode::ScheduledRemove:
		mode = "remove-T" + std::to_string(c.trees);
		break;
	}
	return mode + "-m" + std::to_string(c.memory_bytes) + "-s" + std::to_string(c.seed);
}

std::vector<std::size_t> schedule_indices(std::size_t stream_length, std::size_t start, std::size_t target)
{
	const std::size_t changes = start > target ? start - target : target - start;
	std::vector<std::size_t> out;
	if (changes == 0)
		return out;
	const std::size_t interval = std::max<std::size_t>(1, stream_length / (changes + 1));
	for (std::size_t k = 1; k <= changes && k * interval < stream_length; ++k)
		out.push_back(k * interval);
	return out;
}

namespace {

void validate(const Dataset &data, const ExperimentConfig &c)
{
	if (data.points.empty())
		throw ConfigError("dataset is empty");
	if (c.checkpoint_interval == 0)
		throw ConfigError("checkpoint interval must be positive");
	if (c.trees == 0)
		throw ConfigError("tree count must be at least 1");
	if (c.mode == RunMode::ScheduledRemove && c.trees > c.remove_start)
		throw ConfigError("removal target exceeds the starting tree count");
	if (!(c.eval_fading >= 0.0 && c.eval_fading <= 1.0))
		throw ConfigError("evaluation fading factor must lie in [0, 1]");
	for (const auto &p : data.points) {
		if (p.features.size() != data.spec.feature_count)
			throw ConfigError("dataset point dimension differs from the declared feature count");
		if (p.label >= data.spec.label_count)
			throw ConfigError("dataset label exceeds the declared label count");
	}
}

ForestConfig forest_config(const Dataset &data, const ExperimentConfig &c)
{
	ForestConfig fc;
	fc.memory_bytes = c.memory_bytes;
	fc.feature_count = data.spec.feature_count;
	fc.label_count = data.spec.label_count;
	fc.dynamic = c.dynamic;
	fc.window_size = c.window_size;
	fc.fading_factor = c.fading_factor;
	fc.seed = c.seed;
	switch (c.mode) {
	case RunMode::Fixed:
		fc.mode = ForestMode::Fixed;
		fc.tree_count = c.trees;
		break;
	case RunMode::Dynamic:
		fc.mode = ForestMode::Dynamic;
		fc.tree_count = 1;
		break;
	case RunMode::ScheduledAdd:
		fc.mode = ForestMode::Scheduled;
		fc.tree_count = 1;
		break;
	case RunMode::ScheduledRemove:
		fc.mode = ForestMode::Scheduled;
		fc.tree_count = c.remove_start;
		break;
	}
	return fc;
}

} // namespace

RunResult run_experiment(const Dataset &data, const ExperimentConfig &config, const EvaluationHook &hook)
{
	validate(data, config);
	MondrianForest forest(forest_config(data, config));
	FadingConfusionMatrix eval(data.spec.label_count, config.eval_fading);

	std::vector<std::size_t> schedule;
	if (config.mode == RunMode::ScheduledAdd)
		schedule = schedule_indices(data.points.size(), 1, config.trees);
	else if (config.mode == RunMode::ScheduledRemove)
		schedule = schedule_indices(data.points.size(), config.remove_start, config.trees);
	auto next_change = schedule.begin();

	RunResult result;
	result.config_id = describe(config);
	result.capacity = forest.pool().capacity();
	const std::size_t n = data.points.size();
	for (std::size_t i = 0; i < n; ++i) {
		const auto &p = data.points[i];
		if (next_change != schedule.end() && *next_change == i) {
			if (config.mode == RunMode::ScheduledAdd) {
				forest.trim_trees();
				forest.add_tree();
			} else {
				forest.remove_tree();
				++result.removals;
			}
			++next_change;
		}

		const Label predicted = forest.predict(p.features);
		eval.update(p.label, predicted);
		if (hook)
			hook(i, predicted);
		const auto report = forest.train(p.features, p.label);
		if (report.pre_label != predicted)
			throw InvariantViolation("prequential prediction changed between evaluation and training");

		if ((i + 1) % config.checkpoint_interval == 0 || i + 1 == n) {
			CheckpointRow row{i + 1, eval.f1_macro(), forest.trees().size(), forest.pool().used(), forest.max_depth()};
			if (row.pool_used > result.capacity)
				throw InvariantViolation("pool usage exceeds capacity");
			result.rows.push_back(row);
		}
	}
	result.final_f1 = eval.f1_macro();
	result.final_tree_count = forest.trees().size();
	result.additions = forest.additions();
	return result;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn)
{
	if (threads == 0)
		threads = std::max(1u, std::thread::hardware_concurrency());
	threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
	if (threads <= 1) {
		for (std::size_t i = 0; i < n; ++i)
			fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr error;
	std::mutex error_mutex;
	std::vector<std::jthread> workers;
	workers.reserve(threads);
	for (unsigned w = 0; w < threads; ++w)
		workers.emplace_back([&] {
			for (std::size_t i = next++; i < n; i = next++) {
				try {
					fn(i);
				} catch (...) {
					std::lock_guard lock(error_mutex);
					if (!error)
						error = std::current_exception();
					next = n;
				}
			}
		});
	workers.clear();
	if (error)
		std::rethrow_exception(error);
}

namespace {

std::size_t best_of(const std::vector<RunResult> &runs, std::size_t first, std::size_t count)
{
	std::size_t best = first;
	for (std::size_t i = first + 1; i < first + count; ++i)
		if (runs[i].final_f1 > runs[best].final_f1)
			best = i;
	return best;
}

} // namespace

SweepResult sweep_tree_count(const Dataset &data, const ExperimentConfig &base, const std::vector<std::size_t> &counts,
							 unsigned threads)
{
	if (counts.empty())
		throw ConfigError("sweep needs at least one tree count");
	SweepResult out;
	out.counts = counts;
	out.runs.resize(counts.size());
	parallel_for(counts.size(), threads, [&](std::size_t i) {
		ExperimentConfig c = base;
		c.id.clear();
		c.mode = RunMode::Fixed;
		c.trees = counts[i];
		out.runs[i] = run_experiment(data, c);
	});
	out.best_index = best_of(out.runs, 0, out.runs.size());
	return out;
}

CompareResult compare_dynamic_vs_fixed(const Dataset &data, const ExperimentConfig &base,
									   const std::vector<std::size_t> &memories,
									   const std::vector<Combination> &combinations,
									   const std::vector<std::size_t> &counts, unsigned threads)
{
	if (counts.empty())
		throw ConfigError("comparison needs at least one fixed tree count");
	const std::size_t per_memory = counts.size() + combinations.size();
	std::vector<ExperimentConfig> configs;
	configs.reserve(memories.size() * per_memory);
	for (std::size_t m : memories) {
		for (std::size_t t : counts) {
			ExperimentConfig c = base;
			c.id.clear();
			c.memory_bytes = m;
			c.mode = RunMode::Fixed;
			c.trees = t;
			configs.push_back(c);
		}
		for (const auto &combo : combinations) {
			ExperimentConfig c = base;
			c.id.clear();
			c.memory_bytes = m;
			c.mode = RunMode::Dynamic;
			c.dynamic.addition_strategy = combo.strategy;
			c.dynamic.tracker_kind = combo.tracker;
			c.dynamic.comparison_test = combo.test;
			configs.push_back(c);
		}
	}

	CompareResult out;
	out.runs.resize(configs.size());
	parallel_for(configs.size(), threads, [&](std::size_t i) { out.runs[i] = run_experiment(data, configs[i]); });

	for (std::size_t mi = 0; mi < memories.size(); ++mi) {
		const std::size_t first = mi * per_memory;
		const std::size_t best = best_of(out.runs, first, counts.size());
		const double fixed_f1 = out.runs[best].final_f1;
		for (std::size_t ci = 0; ci < combinations.size(); ++ci) {
			const auto &run = out.runs[first + counts.size() + ci];
			CompareRow row;
			row.combination = combinations[ci];
			row.memory_bytes = memories[mi];
			row.f1 = run.final_f1;
			row.fixed_optimal_f1 = fixed_f1;
			row.fixed_optimal_trees = counts[best - first];
			row.ratio = fixed_f1 > 0.0 ? run.final_f1 / fixed_f1 : 0.0;
			row.additions = run.additions;
			out.rows.push_back(row);
		}
	}
	return out;
}

namespace {

std::string fmt_real(double v)
{
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.6f", v);
	return buf;
}

} // namespace

void write_checkpoints_csv(std::ostream &out, const RunResult &result)
{
	out << "point_index,f1_fading,tree_count,pool_used,max_depth\n";
	for (const auto &r : result.rows)
		out << r.point_index << ',' << fmt_real(r.f1) << ',' << r.tree_count << ',' << r.pool_used << ','
			<< r.max_depth << '\n';
}

void write_summary_csv(std::ostream &out, const std::vector<RunResult> &results)
{
	out << "config_id,final_f1,tree_count_final,additions\n";
	for (const auto &r : results)
		out << r.config_id << ',' << fmt_real(r.final_f1) << ',' << r.final_tree_count << ',' << r.additions << '\n';
}

void write_compare_csv(std::ostream &out, const std::vector<CompareRow> &rows)
{
	out << "addition,tracker,test,memory_bytes,f1,fixed_optimal_f1,fixed_optimal_trees,ratio,additions\n";
	for (const auto &r : rows)
		out << to_string(r.combination) << ',' << r.memory_bytes << ',' << fmt_real(r.f1) << ','
			<< fmt_real(r.fixed_optimal_f1) << ',' << r.fixed_optimal_trees << ',' << fmt_real(r.ratio) << ','
			<< r.additions << '\n';
}

} // namespace mbf
