// Command-line front end. Talks to the library exclusively through mbf.h.

#include "mbf/mbf.h"

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct CliError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

void check(mbf_status s)
{
	if (s != MBF_OK)
		throw CliError(std::string(mbf_status_name(s)) + ": " + mbf_last_error());
}

struct DatasetDeleter {
	void operator()(mbf_dataset *d) const { mbf_dataset_free(d); }
};
struct ResultDeleter {
	void operator()(mbf_run_result *r) const { mbf_run_result_free(r); }
};
using DatasetPtr = std::unique_ptr<mbf_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<mbf_run_result, ResultDeleter>;

struct DatasetOptions {
	std::string dataset = "rbf-stable";
	std::size_t length = 20000;
	std::uint32_t centroids = 50;
	double drift_speed = 1e-4;
	bool csv_header = false;
	int csv_label_column = -1;
	std::size_t csv_window = 0;
	bool shuffle = false;
	std::uint32_t label_drift_shift = 0;
};

struct CommonOptions {
	DatasetOptions data;
	std::uint64_t memory_bytes = 200000;
	double fading_factor = 0.995;
	std::uint32_t window_size = 200;
	double eval_fading = 0.99;
	std::uint64_t seed = 1;
	std::uint32_t checkpoints = 100;
	double min_samples = 30;
	bool no_reset = false;
	std::uint32_t threads = 0;
	std::string out;
};

void add_common(CLI::App *cmd, CommonOptions &o)
{
	cmd->add_option("--dataset", o.data.dataset, "rbf-stable | rbf-drift | csv:<path>")->capture_default_str();
	cmd->add_option("--length", o.data.length, "points generated for rbf datasets")->capture_default_str();
	cmd->add_option("--centroids", o.data.centroids, "RBF centroid count")->capture_default_str();
	cmd->add_option("--drift-speed", o.data.drift_speed, "per-point centroid displacement for rbf-drift")
		->capture_default_str();
	cmd->add_flag("--csv-header", o.data.csv_header, "CSV has a header row");
	cmd->add_option("--csv-label-column", o.data.csv_label_column, "label column, negative counts from the end")
		->capture_default_str();
	cmd->add_option("--csv-window", o.data.csv_window, "window raw sensor rows into mean/std features (0 = off)")
		->capture_default_str();
	cmd->add_flag("--shuffle", o.data.shuffle, "shuffle the stream with --seed before use");
	cmd->add_option("--label-drift-shift", o.data.label_drift_shift, "shift labels of the second half by K")
		->capture_default_str();
	cmd->add_option("--fading-factor", o.fading_factor, "fading factor of the accuracy trackers")
		->capture_default_str();
	cmd->add_option("--window-size", o.window_size, "sliding tracker window")->capture_default_str();
	cmd->add_option("--eval-fading", o.eval_fading, "fading factor of the F1 confusion matrix")
		->capture_default_str();
	cmd->add_option("--seed", o.seed, "seed for data generation and forests")->capture_default_str();
	cmd->add_option("--checkpoints", o.checkpoints, "points between checkpoint rows")->capture_default_str();
	cmd->add_option("--min-samples", o.min_samples, "effective samples before the comparison test")
		->capture_default_str();
	cmd->add_flag("--no-reset", o.no_reset, "keep tracker state after a tree is added");
	cmd->add_option("--threads", o.threads, "worker threads for sweep/compare (0 = all cores)")
		->capture_default_str();
	cmd->add_option("--out", o.out, "output CSV path");
}

DatasetPtr build_dataset(const CommonOptions &o)
{
	mbf_dataset *raw = nullptr;
	const std::string &name = o.data.dataset;
	if (name == "rbf-stable" || name == "rbf-drift") {
		mbf_rbf_config rbf;
		mbf_rbf_config_init(&rbf);
		rbf.centroids = o.data.centroids;
		rbf.seed = o.seed;
		rbf.drift_speed = name == "rbf-drift" ? o.data.drift_speed : 0.0;
		check(mbf_dataset_generate_rbf(&rbf, o.data.length, &raw));
	} else if (name.rfind("csv:", 0) == 0) {
		check(mbf_dataset_load_csv(name.substr(4).c_str(), o.data.csv_label_column, o.data.csv_header ? 1 : 0, &raw));
	} else {
		throw CliError("unknown dataset '" + name + "'");
	}
	DatasetPtr data(raw);
	if (o.data.csv_window > 0) {
		mbf_dataset *windowed = nullptr;
		check(mbf_dataset_window(data.get(), o.data.csv_window, &windowed));
		data.reset(windowed);
	}
	if (o.data.shuffle)
		check(mbf_dataset_shuffle(data.get(), o.seed));
	if (o.data.label_drift_shift > 0)
		check(mbf_dataset_inject_label_drift(data.get(), o.data.label_drift_shift));
	return data;
}

mbf_experiment_config base_config(const CommonOptions &o)
{
	mbf_experiment_config c;
	mbf_experiment_config_init(&c);
	c.memory_bytes = o.memory_bytes;
	c.fading_factor = o.fading_factor;
	c.window_size = o.window_size;
	c.eval_fading = o.eval_fading;
	c.seed = o.seed;
	c.checkpoint_interval = o.checkpoints;
	c.min_samples = o.min_samples;
	c.reset_on_add = o.no_reset ? 0 : 1;
	c.threads = o.threads;
	return c;
}

mbf_combination parse_combination(const std::string &text)
{
	mbf_combination c;
	check(mbf_combination_parse(text.c_str(), &c));
	return c;
}

std::string combination_name(mbf_combination c)
{
	char buf[64];
	mbf_combination_name(c, buf, sizeof buf);
	return buf;
}

void print_result(const mbf_run_result *r)
{
	std::printf("%s final_f1=%.6f trees=%zu additions=%zu capacity=%zu\n", mbf_run_result_id(r),
				mbf_run_result_final_f1(r), mbf_run_result_tree_count(r), mbf_run_result_additions(r),
				mbf_run_result_capacity(r));
}

const std::vector<std::uint32_t> kDefaultCounts{1, 2, 3, 5, 8, 10, 15, 20, 30, 50};

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Memory-bounded Mondrian forest experiments"};
	app.require_subcommand(1);

	CommonOptions run_opts;
	std::uint32_t run_trees = 1;
	std::string run_dynamic;
	std::string run_summary;
	auto *run = app.add_subcommand("run", "single experiment");
	add_common(run, run_opts);
	run->add_option("--memory-bytes", run_opts.memory_bytes, "node pool budget in bytes")->capture_default_str();
	auto *trees_opt = run->add_option("--trees", run_trees, "fixed tree count")->capture_default_str();
	run->add_option("--dynamic", run_dynamic, "dynamic ensemble: <random|depth|count>,<sliding|fading>,<test>")
		->excludes(trees_opt);
	run->add_option("--summary", run_summary, "summary CSV path");

	CommonOptions sweep_opts;
	std::vector<std::uint32_t> sweep_counts = kDefaultCounts;
	auto *sweep = app.add_subcommand("sweep", "fixed forests over a list of tree counts");
	add_common(sweep, sweep_opts);
	sweep->add_option("--memory-bytes", sweep_opts.memory_bytes, "node pool budget in bytes")->capture_default_str();
	sweep->add_option("--counts", sweep_counts, "tree counts")->delimiter(',')->capture_default_str();

	CommonOptions sched_opts;
	std::string sched_add;
	bool sched_remove = false;
	std::uint32_t sched_target = 10;
	std::uint32_t sched_start = 50;
	auto *schedule = app.add_subcommand("schedule", "periodic tree addition or removal");
	add_common(schedule, sched_opts);
	schedule->add_option("--memory-bytes", sched_opts.memory_bytes, "node pool budget in bytes")
		->capture_default_str();
	auto *add_opt = schedule->add_option("--add", sched_add, "add trees with trimming strategy random|depth|count");
	schedule->add_flag("--remove", sched_remove, "remove trees starting from --remove-start")->excludes(add_opt);
	schedule->add_option("--target", sched_target, "final tree count")->capture_default_str();
	schedule->add_option("--remove-start", sched_start, "initial trees for --remove")->capture_default_str();

	CommonOptions cmp_opts;
	std::vector<std::uint64_t> cmp_memories{200000};
	std::vector<std::string> cmp_combos{"all"};
	std::vector<std::uint32_t> cmp_counts = kDefaultCounts;
	std::string cmp_summary;
	auto *compare = app.add_subcommand("compare", "dynamic combinations against the best fixed forest");
	add_common(compare, cmp_opts);
	compare->add_option("--memory-bytes", cmp_memories, "node pool budgets")->delimiter(',')->capture_default_str();
	compare->add_option("--combinations", cmp_combos, "'all' or ';'-separated combinations")
		->delimiter(';')
		->capture_default_str();
	compare->add_option("--counts", cmp_counts, "fixed tree counts searched")->delimiter(',')->capture_default_str();
	compare->add_option("--summary", cmp_summary, "summary CSV of every run");

	CLI11_PARSE(app, argc, argv);

	try {
		if (*run) {
			auto data = build_dataset(run_opts);
			auto cfg = base_config(run_opts);
			if (!run_dynamic.empty()) {
				cfg.mode = MBF_MODE_DYNAMIC;
				cfg.dynamic = parse_combination(run_dynamic);
			} else {
				cfg.mode = MBF_MODE_FIXED;
				cfg.trees = run_trees;
			}
			mbf_run_result *raw = nullptr;
			check(mbf_run_experiment(data.get(), &cfg, &raw));
			ResultPtr result(raw);
			print_result(result.get());
			if (!run_opts.out.empty())
				check(mbf_run_result_write_checkpoints(result.get(), run_opts.out.c_str()));
			if (!run_summary.empty()) {
				const mbf_run_result *one = result.get();
				check(mbf_write_summary(&one, 1, run_summary.c_str()));
			}
		} else if (*sweep) {
			auto data = build_dataset(sweep_opts);
			auto cfg = base_config(sweep_opts);
			std::vector<mbf_run_result *> raw(sweep_counts.size(), nullptr);
			std::size_t best = 0;
			check(mbf_sweep_tree_count(data.get(), &cfg, sweep_counts.data(), sweep_counts.size(), raw.data(), &best));
			std::vector<ResultPtr> results;
			for (auto *r : raw)
				results.emplace_back(r);
			std::printf("trees,final_f1\n");
			for (std::size_t i = 0; i < results.size(); ++i)
				std::printf("%u,%.6f\n", sweep_counts[i], mbf_run_result_final_f1(results[i].get()));
			std::printf("best_trees=%u best_f1=%.6f\n", sweep_counts[best], mbf_run_result_final_f1(results[best].get()));
			if (!sweep_opts.out.empty()) {
				std::vector<const mbf_run_result *> view(raw.begin(), raw.end());
				check(mbf_write_summary(view.data(), view.size(), sweep_opts.out.c_str()));
			}
		} else if (*schedule) {
			if (sched_add.empty() == !sched_remove)
				throw CliError("schedule needs exactly one of --add <strategy> or --remove");
			auto data = build_dataset(sched_opts);
			auto cfg = base_config(sched_opts);
			cfg.trees = sched_target;
			cfg.remove_start = sched_start;
			if (sched_remove) {
				cfg.mode = MBF_MODE_SCHEDULED_REMOVE;
			} else {
				cfg.mode = MBF_MODE_SCHEDULED_ADD;
				cfg.dynamic = parse_combination(sched_add + ",fading,sum-std");
			}
			mbf_run_result *raw = nullptr;
			check(mbf_run_experiment(data.get(), &cfg, &raw));
			ResultPtr result(raw);
			print_result(result.get());
			if (!sched_opts.out.empty())
				check(mbf_run_result_write_checkpoints(result.get(), sched_opts.out.c_str()));
		} else if (*compare) {
			auto data = build_dataset(cmp_opts);
			auto cfg = base_config(cmp_opts);
			std::vector<mbf_combination> combos;
			if (cmp_combos.size() == 1 && cmp_combos[0] == "all") {
				combos.resize(mbf_all_combinations(nullptr, 0));
				mbf_all_combinations(combos.data(), combos.size());
			} else {
				for (const auto &c : cmp_combos)
					combos.push_back(parse_combination(c));
			}
			std::vector<mbf_compare_row> rows(cmp_memories.size() * combos.size());
			std::vector<mbf_run_result *> raw(cmp_memories.size() * (cmp_counts.size() + combos.size()), nullptr);
			check(mbf_compare_dynamic_vs_fixed(data.get(), &cfg, cmp_memories.data(), cmp_memories.size(),
											   combos.data(), combos.size(), cmp_counts.data(), cmp_counts.size(),
											   rows.data(), raw.data()));
			std::vector<ResultPtr> results;
			for (auto *r : raw)
				results.emplace_back(r);
			for (const auto &r : rows)
				std::printf("%-24s memory=%llu f1=%.6f fixed_optimal=%.6f (T=%u) ratio=%.4f additions=%llu\n",
							combination_name(r.combination).c_str(), static_cast<unsigned long long>(r.memory_bytes),
							r.f1, r.fixed_optimal_f1, r.fixed_optimal_trees, r.ratio,
							static_cast<unsigned long long>(r.additions));
			if (!cmp_opts.out.empty())
				check(mbf_write_compare(rows.data(), rows.size(), cmp_opts.out.c_str()));
			if (!cmp_summary.empty()) {
				std::vector<const mbf_run_result *> view(raw.begin(), raw.end());
				check(mbf_write_summary(view.data(), view.size(), cmp_summary.c_str()));
			}
		}
	} catch (const std::exception &e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	}
	return 0;
}
