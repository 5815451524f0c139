#include "mbf/mbf.h"

#include "mbf/bench.hpp"
#include "mbf/error.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct mbf_dataset {
	mbf::Dataset data;
};

struct mbf_forest {
	mbf::MondrianForest forest;
};

struct mbf_run_result {
	mbf::RunResult result;
};

namespace {

thread_local std::string g_last_error;

class IoError : public std::runtime_error {
	using std::runtime_error::runtime_error;
};

template <typename Fn>
mbf_status guarded(Fn &&fn) noexcept
{
	try {
		g_last_error.clear();
		fn();
		return MBF_OK;
	} catch (const mbf::ConfigError &e) {
		g_last_error = e.what();
		return MBF_ERR_CONFIG;
	} catch (const mbf::ParseError &e) {
		g_last_error = e.what();
		return MBF_ERR_PARSE;
	} catch (const IoError &e) {
		g_last_error = e.what();
		return MBF_ERR_IO;
	} catch (const mbf::InvariantViolation &e) {
		g_last_error = e.what();
		return MBF_ERR_INTERNAL;
	} catch (const std::invalid_argument &e) {
		g_last_error = e.what();
		return MBF_ERR_INVALID_ARGUMENT;
	} catch (const std::logic_error &e) {
		g_last_error = e.what();
		return MBF_ERR_INVALID_ARGUMENT;
	} catch (const std::bad_alloc &) {
		g_last_error = "out of memory";
		return MBF_ERR_INTERNAL;
	} catch (const std::exception &e) {
		g_last_error = e.what();
		return MBF_ERR_INTERNAL;
	} catch (...) {
		g_last_error = "unknown error";
		return MBF_ERR_INTERNAL;
	}
}

template <typename T>
void require(const T *p, const char *what)
{
	if (!p)
		throw std::invalid_argument(std::string(what) + " must not be null");
}

mbf::LeafStrategy to_cpp(mbf_leaf_strategy s)
{
	switch (s) {
	case MBF_LEAF_RANDOM:
		return mbf::LeafStrategy::Random;
	case MBF_LEAF_DEPTH:
		return mbf::LeafStrategy::Depth;
	case MBF_LEAF_COUNT:
		return mbf::LeafStrategy::Count;
	}
	throw mbf::ConfigError("unknown leaf strategy");
}

mbf::TrackerKind to_cpp(mbf_tracker_kind k)
{
	switch (k) {
	case MBF_TRACKER_SLIDING:
		return mbf::TrackerKind::Sliding;
	case MBF_TRACKER_FADING:
		return mbf::TrackerKind::Fading;
	}
	throw mbf::ConfigError("unknown tracker kind");
}

mbf::ComparisonTest to_cpp(mbf_comparison_test t)
{
	switch (t) {
	case MBF_TEST_SUM_VAR:
		return mbf::ComparisonTest::SumVar;
	case MBF_TEST_T:
		return mbf::ComparisonTest::TTest;
	case MBF_TEST_Z:
		return mbf::ComparisonTest::ZTest;
	case MBF_TEST_SUM_STD:
		return mbf::ComparisonTest::SumStd;
	}
	throw mbf::ConfigError("unknown comparison test");
}

mbf::Combination to_cpp(const mbf_combination &c) { return {to_cpp(c.strategy), to_cpp(c.tracker), to_cpp(c.test)}; }

mbf_combination to_c(const mbf::Combination &c)
{
	mbf_combination out{};
	out.strategy = static_cast<mbf_leaf_strategy>(c.strategy);
	out.tracker = static_cast<mbf_tracker_kind>(c.tracker);
	out.test = static_cast<mbf_comparison_test>(c.test);
	return out;
}

mbf::RunMode to_cpp(mbf_mode m)
{
	switch (m) {
	case MBF_MODE_FIXED:
		return mbf::RunMode::Fixed;
	case MBF_MODE_DYNAMIC:
		return mbf::RunMode::Dynamic;
	case MBF_MODE_SCHEDULED_ADD:
		return mbf::RunMode::ScheduledAdd;
	case MBF_MODE_SCHEDULED_REMOVE:
		return mbf::RunMode::ScheduledRemove;
	}
	throw mbf::ConfigError("unknown mode");
}

mbf::ExperimentConfig to_cpp(const mbf_experiment_config &c)
{
	mbf::ExperimentConfig e;
	e.memory_bytes = c.memory_bytes;
	e.mode = to_cpp(c.mode);
	e.trees = c.trees;
	const auto combo = to_cpp(c.dynamic);
	e.dynamic.addition_strategy = combo.strategy;
	e.dynamic.tracker_kind = combo.tracker;
	e.dynamic.comparison_test = combo.test;
	e.dynamic.min_samples_before_test = c.min_samples;
	e.dynamic.reset_trackers_on_add = c.reset_on_add != 0;
	e.window_size = c.window_size;
	e.fading_factor = c.fading_factor;
	e.eval_fading = c.eval_fading;
	e.seed = c.seed;
	e.checkpoint_interval = c.checkpoint_interval;
	e.remove_start = c.remove_start;
	return e;
}

std::ofstream open_output(const char *path)
{
	require(path, "path");
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError(std::string("cannot open ") + path + " for writing");
	return out;
}

void finish_output(std::ofstream &out, const char *path)
{
	out.flush();
	if (!out)
		throw IoError(std::string("write to ") + path + " failed");
}

} // namespace

extern "C" {

MBF_API const char *mbf_last_error(void) { return g_last_error.c_str(); }

MBF_API const char *mbf_status_name(mbf_status status)
{
	switch (status) {
	case MBF_OK:
		return "ok";
	case MBF_ERR_INVALID_ARGUMENT:
		return "invalid argument";
	case MBF_ERR_CONFIG:
		return "configuration error";
	case MBF_ERR_PARSE:
		return "parse error";
	case MBF_ERR_IO:
		return "i/o error";
	case MBF_ERR_INTERNAL:
		return "internal error";
	}
	return "unknown status";
}

MBF_API const char *mbf_version(void) { return "0.1.0"; }

MBF_API size_t mbf_node_footprint(size_t features, size_t labels) { return mbf::node_footprint(features, labels); }

MBF_API size_t mbf_pool_capacity(uint64_t memory_bytes, size_t features, size_t labels)
{
	if (features < 1 || labels < 2)
		return 0;
	return memory_bytes / mbf::node_footprint(features, labels);
}

MBF_API void mbf_experiment_config_init(mbf_experiment_config *config)
{
	if (!config)
		return;
	const mbf::ExperimentConfig d;
	*config = mbf_experiment_config{};
	config->memory_bytes = d.memory_bytes;
	config->mode = MBF_MODE_FIXED;
	config->trees = static_cast<uint32_t>(d.trees);
	config->dynamic = to_c({d.dynamic.addition_strategy, d.dynamic.tracker_kind, d.dynamic.comparison_test});
	config->min_samples = d.dynamic.min_samples_before_test;
	config->reset_on_add = d.dynamic.reset_trackers_on_add ? 1 : 0;
	config->window_size = static_cast<uint32_t>(d.window_size);
	config->fading_factor = d.fading_factor;
	config->eval_fading = d.eval_fading;
	config->seed = d.seed;
	config->checkpoint_interval = static_cast<uint32_t>(d.checkpoint_interval);
	config->remove_start = static_cast<uint32_t>(d.remove_start);
	config->threads = 0;
}

MBF_API void mbf_rbf_config_init(mbf_rbf_config *config)
{
	if (!config)
		return;
	const mbf::RbfGeneratorConfig d;
	config->centroids = static_cast<uint32_t>(d.centroid_count);
	config->features = static_cast<uint32_t>(d.feature_count);
	config->labels = static_cast<uint32_t>(d.label_count);
	config->drift_speed = d.drift_speed;
	config->seed = d.seed;
}

MBF_API mbf_status mbf_combination_parse(const char *text, mbf_combination *out)
{
	return guarded([&] {
		require(text, "text");
		require(out, "out");
		*out = to_c(mbf::parse_combination(text));
	});
}

MBF_API size_t mbf_combination_name(mbf_combination combination, char *buffer, size_t size)
{
	std::string name;
	if (guarded([&] { name = mbf::to_string(to_cpp(combination)); }) != MBF_OK)
		return 0;
	if (buffer && size > 0) {
		const size_t n = std::min(size - 1, name.size());
		std::memcpy(buffer, name.data(), n);
		buffer[n] = '\0';
	}
	return name.size();
}

MBF_API size_t mbf_all_combinations(mbf_combination *out, size_t capacity)
{
	const auto all = mbf::all_combinations();
	for (size_t i = 0; out && i < all.size() && i < capacity; ++i)
		out[i] = to_c(all[i]);
	return all.size();
}

MBF_API mbf_status mbf_dataset_generate_rbf(const mbf_rbf_config *config, size_t n, mbf_dataset **out)
{
	return guarded([&] {
		require(config, "config");
		require(out, "out");
		if (n == 0)
			throw mbf::ConfigError("stream length must be positive");
		mbf::RbfGeneratorConfig g{config->centroids, config->features, config->labels, config->drift_speed,
								  config->seed};
		auto ds = std::make_unique<mbf_dataset>();
		ds->data.points = mbf::rbf_generate(g, n);
		ds->data.spec = {g.feature_count, g.label_count, n};
		*out = ds.release();
	});
}

MBF_API mbf_status mbf_dataset_load_csv(const char *path, int label_column, int has_header, mbf_dataset **out)
{
	return guarded([&] {
		require(path, "path");
		require(out, "out");
		auto ds = std::make_unique<mbf_dataset>();
		ds->data = mbf::csv_load(path, {label_column, has_header != 0});
		*out = ds.release();
	});
}

MBF_API mbf_status mbf_dataset_window(const mbf_dataset *raw, size_t window_size, mbf_dataset **out)
{
	return guarded([&] {
		require(raw, "dataset");
		require(out, "out");
		auto ds = std::make_unique<mbf_dataset>();
		ds->data.points = mbf::window_features(raw->data.points, window_size);
		ds->data.spec = {raw->data.spec.feature_count * 2, raw->data.spec.label_count, ds->data.points.size()};
		*out = ds.release();
	});
}

MBF_API mbf_status mbf_dataset_inject_label_drift(mbf_dataset *dataset, uint32_t shift)
{
	return guarded([&] {
		require(dataset, "dataset");
		auto &points = dataset->data.points;
		points = mbf::inject_label_drift(points, dataset->data.spec.label_count, shift);
	});
}

MBF_API mbf_status mbf_dataset_shuffle(mbf_dataset *dataset, uint64_t seed)
{
	return guarded([&] {
		require(dataset, "dataset");
		dataset->data.points = mbf::shuffle(std::move(dataset->data.points), seed);
	});
}

MBF_API size_t mbf_dataset_size(const mbf_dataset *dataset) { return dataset ? dataset->data.points.size() : 0; }

MBF_API size_t mbf_dataset_feature_count(const mbf_dataset *dataset)
{
	return dataset ? dataset->data.spec.feature_count : 0;
}

MBF_API size_t mbf_dataset_label_count(const mbf_dataset *dataset)
{
	return dataset ? dataset->data.spec.label_count : 0;
}

MBF_API mbf_status mbf_dataset_point(const mbf_dataset *dataset, size_t index, double *features, size_t feature_count,
									 uint32_t *label)
{
	return guarded([&] {
		require(dataset, "dataset");
		if (index >= dataset->data.points.size())
			throw std::invalid_argument("point index out of range");
		const auto &p = dataset->data.points[index];
		if (features) {
			if (feature_count != p.features.size())
				throw std::invalid_argument("feature buffer size does not match the dataset");
			std::memcpy(features, p.features.data(), p.features.size() * sizeof(double));
		}
		if (label)
			*label = p.label;
	});
}

MBF_API void mbf_dataset_free(mbf_dataset *dataset) { delete dataset; }

MBF_API mbf_status mbf_forest_create(const mbf_experiment_config *config, size_t features, size_t labels,
									 mbf_forest **out)
{
	return guarded([&] {
		require(config, "config");
		require(out, "out");
		const auto e = to_cpp(*config);
		mbf::ForestConfig fc;
		fc.memory_bytes = e.memory_bytes;
		fc.feature_count = features;
		fc.label_count = labels;
		fc.dynamic = e.dynamic;
		fc.window_size = e.window_size;
		fc.fading_factor = e.fading_factor;
		fc.seed = e.seed;
		switch (e.mode) {
		case mbf::RunMode::Fixed:
			fc.mode = mbf::ForestMode::Fixed;
			fc.tree_count = e.trees;
			break;
		case mbf::RunMode::Dynamic:
			fc.mode = mbf::ForestMode::Dynamic;
			break;
		case mbf::RunMode::ScheduledAdd:
			fc.mode = mbf::ForestMode::Scheduled;
			fc.tree_count = 1;
			break;
		case mbf::RunMode::ScheduledRemove:
			fc.mode = mbf::ForestMode::Scheduled;
			fc.tree_count = e.remove_start;
			break;
		}
		*out = new mbf_forest{mbf::MondrianForest(fc)};
	});
}

MBF_API mbf_status mbf_forest_train(mbf_forest *forest, const double *x, size_t feature_count, uint32_t label,
									mbf_train_report *report)
{
	return guarded([&] {
		require(forest, "forest");
		require(x, "x");
		const auto r = forest->forest.train(std::span<const double>(x, feature_count), label);
		if (report)
			*report = {r.pre_label, r.post_label, r.pre_correct, r.post_correct, r.tree_added};
	});
}

MBF_API mbf_status mbf_forest_predict(const mbf_forest *forest, const double *x, size_t feature_count,
									  uint32_t *label)
{
	return guarded([&] {
		require(forest, "forest");
		require(x, "x");
		require(label, "label");
		*label = forest->forest.predict(std::span<const double>(x, feature_count));
	});
}

MBF_API mbf_status mbf_forest_add_tree(mbf_forest *forest)
{
	return guarded([&] {
		require(forest, "forest");
		forest->forest.trim_trees();
		forest->forest.add_tree();
	});
}

MBF_API mbf_status mbf_forest_remove_tree(mbf_forest *forest)
{
	return guarded([&] {
		require(forest, "forest");
		forest->forest.remove_tree();
	});
}

MBF_API size_t mbf_forest_tree_count(const mbf_forest *forest) { return forest ? forest->forest.trees().size() : 0; }

MBF_API size_t mbf_forest_pool_used(const mbf_forest *forest) { return forest ? forest->forest.pool().used() : 0; }

MBF_API size_t mbf_forest_pool_capacity(const mbf_forest *forest)
{
	return forest ? forest->forest.pool().capacity() : 0;
}

MBF_API void mbf_forest_free(mbf_forest *forest) { delete forest; }

MBF_API mbf_status mbf_run_experiment(const mbf_dataset *dataset, const mbf_experiment_config *config,
									  mbf_run_result **out)
{
	return guarded([&] {
		require(dataset, "dataset");
		require(config, "config");
		require(out, "out");
		*out = new mbf_run_result{mbf::run_experiment(dataset->data, to_cpp(*config))};
	});
}

MBF_API const char *mbf_run_result_id(const mbf_run_result *result)
{
	return result ? result->result.config_id.c_str() : "";
}

MBF_API double mbf_run_result_final_f1(const mbf_run_result *result) { return result ? result->result.final_f1 : 0.0; }

MBF_API size_t mbf_run_result_tree_count(const mbf_run_result *result)
{
	return result ? result->result.final_tree_count : 0;
}

MBF_API size_t mbf_run_result_additions(const mbf_run_result *result) { return result ? result->result.additions : 0; }

MBF_API size_t mbf_run_result_capacity(const mbf_run_result *result) { return result ? result->result.capacity : 0; }

MBF_API size_t mbf_run_result_checkpoint_count(const mbf_run_result *result)
{
	return result ? result->result.rows.size() : 0;
}

MBF_API mbf_status mbf_run_result_checkpoint(const mbf_run_result *result, size_t index, mbf_checkpoint *out)
{
	return guarded([&] {
		require(result, "result");
		require(out, "out");
		if (index >= result->result.rows.size())
			throw std::invalid_argument("checkpoint index out of range");
		const auto &r = result->result.rows[index];
		*out = {r.point_index, r.f1, r.tree_count, r.pool_used, r.max_depth};
	});
}

MBF_API mbf_status mbf_run_result_write_checkpoints(const mbf_run_result *result, const char *path)
{
	return guarded([&] {
		require(result, "result");
		auto out = open_output(path);
		mbf::write_checkpoints_csv(out, result->result);
		finish_output(out, path);
	});
}

MBF_API mbf_status mbf_write_summary(const mbf_run_result *const *results, size_t count, const char *path)
{
	return guarded([&] {
		if (count > 0)
			require(results, "results");
		std::vector<mbf::RunResult> all;
		all.reserve(count);
		for (size_t i = 0; i < count; ++i) {
			require(results[i], "result");
			all.push_back(results[i]->result);
		}
		auto out = open_output(path);
		mbf::write_summary_csv(out, all);
		finish_output(out, path);
	});
}

MBF_API void mbf_run_result_free(mbf_run_result *result) { delete result; }

MBF_API mbf_status mbf_sweep_tree_count(const mbf_dataset *dataset, const mbf_experiment_config *base,
										const uint32_t *counts, size_t count_len, mbf_run_result **results,
										size_t *best_index)
{
	return guarded([&] {
		require(dataset, "dataset");
		require(base, "base");
		require(counts, "counts");
		require(results, "results");
		const std::vector<std::size_t> c(counts, counts + count_len);
		auto sweep = mbf::sweep_tree_count(dataset->data, to_cpp(*base), c, base->threads);
		std::vector<std::unique_ptr<mbf_run_result>> owned;
		for (auto &r : sweep.runs)
			owned.push_back(std::make_unique<mbf_run_result>(mbf_run_result{std::move(r)}));
		for (size_t i = 0; i < owned.size(); ++i)
			results[i] = owned[i].release();
		if (best_index)
			*best_index = sweep.best_index;
	});
}

MBF_API mbf_status mbf_compare_dynamic_vs_fixed(const mbf_dataset *dataset, const mbf_experiment_config *base,
												const uint64_t *memories, size_t memory_len,
												const mbf_combination *combinations, size_t combination_len,
												const uint32_t *counts, size_t count_len, mbf_compare_row *rows,
												mbf_run_result **runs)
{
	return guarded([&] {
		require(dataset, "dataset");
		require(base, "base");
		require(rows, "rows");
		if (memory_len > 0)
			require(memories, "memories");
		if (combination_len > 0)
			require(combinations, "combinations");
		require(counts, "counts");
		const std::vector<std::size_t> mem(memories, memories + memory_len);
		std::vector<mbf::Combination> combos;
		for (size_t i = 0; i < combination_len; ++i)
			combos.push_back(to_cpp(combinations[i]));
		const std::vector<std::size_t> c(counts, counts + count_len);

		auto result = mbf::compare_dynamic_vs_fixed(dataset->data, to_cpp(*base), mem, combos, c, base->threads);
		std::vector<std::unique_ptr<mbf_run_result>> owned;
		if (runs)
			for (auto &r : result.runs)
				owned.push_back(std::make_unique<mbf_run_result>(mbf_run_result{std::move(r)}));
		for (size_t i = 0; i < result.rows.size(); ++i) {
			const auto &r = result.rows[i];
			rows[i] = {to_c(r.combination), r.memory_bytes,	 r.f1,		  r.fixed_optimal_f1,
					   static_cast<uint32_t>(r.fixed_optimal_trees), r.ratio, r.additions};
		}
		for (size_t i = 0; i < owned.size(); ++i)
			runs[i] = owned[i].release();
	});
}

MBF_API mbf_status mbf_write_compare(const mbf_compare_row *rows, size_t count, const char *path)
{
	return guarded([&] {
		if (count > 0)
			require(rows, "rows");
		std::vector<mbf::CompareRow> all;
		for (size_t i = 0; i < count; ++i) {
			mbf::CompareRow r;
			r.combination = to_cpp(rows[i].combination);
			r.memory_bytes = rows[i].memory_bytes;
			r.f1 = rows[i].f1;
			r.fixed_optimal_f1 = rows[i].fixed_optimal_f1;
			r.fixed_optimal_trees = rows[i].fixed_optimal_trees;
			r.ratio = rows[i].ratio;
			r.additions = rows[i].additions;
			all.push_back(r);
		}
		auto out = open_output(path);
		mbf::write_compare_csv(out, all);
		finish_output(out, path);
	});
}

} // extern "C"
