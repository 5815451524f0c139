#include "mbf/forest.hpp"

#include "mbf/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mbf {

namespace {

TrackerParams tracker_params(const ForestConfig &c)
{
	return {c.dynamic.tracker_kind, c.window_size, c.fading_factor};
}

} // namespace

MondrianForest::MondrianForest(const ForestConfig &config)
	: config_(config), pool_(config.memory_bytes, config.feature_count, config.label_count),
	  prequential_(tracker_params(config)), postquential_(tracker_params(config)),
	  paired_diff_(tracker_params(config)), rng_(config.seed ^ 0x9E3779B97F4A7C15ULL),
	  dist_(config.label_count), acc_(config.label_count)
{
	const std::size_t initial = config.mode == ForestMode::Dynamic ? 1 : config.tree_count;
	if (initial < 1)
		throw ConfigError("a forest needs at least one tree");
	trees_.reserve(initial);
	for (std::size_t i = 0; i < initial; ++i)
		trees_.emplace_back(config.seed + i);
}

Label MondrianForest::predict(std::span<const double> x) const
{
	if (x.size() != pool_.feature_count())
		throw std::invalid_argument("point has " + std::to_string(x.size()) + " features, expected " +
									std::to_string(pool_.feature_count()));
	std::ranges::fill(acc_, 0.0);
	bool any = false;
	for (const auto &t : trees_) {
		if (t.empty())
			continue;
		t.predict(pool_, x, dist_);
		for (std::size_t l = 0; l < acc_.size(); ++l)
			acc_[l] += dist_[l];
		any = true;
	}
	if (!any)
		return 0;
	// summing instead of averaging keeps the argmax and its ties
	return static_cast<Label>(std::ranges::max_element(acc_) - acc_.begin());
}

bool MondrianForest::overfitting() const
{
	if (prequential_.n_eff() < config_.dynamic.min_samples_before_test)
		return false;
	return significant(config_.dynamic.comparison_test, prequential_.mean_var(), postquential_.mean_var(),
					   paired_diff_.mean_var());
}

TrainReport MondrianForest::train(std::span<const double> x, Label label)
{
	if (label >= pool_.label_count())
		throw std::invalid_argument("label " + std::to_string(label) + " out of range");
	TrainReport r;
	r.pre_label = predict(x);
	r.pre_correct = r.pre_label == label;
	prequential_.update(r.pre_correct);

	for (auto &t : trees_)
		t.train(pool_, x, label);

	r.post_label = predict(x);
	r.post_correct = r.post_label == label;
	postquential_.update(r.post_correct);
	paired_diff_.update(int{r.post_correct} - int{r.pre_correct});

	if (config_.mode == ForestMode::Dynamic && trees_.size() < pool_.capacity() && overfitting()) {
		trim_trees();
		add_tree();
		if (config_.dynamic.reset_trackers_on_add) {
			prequential_.reset();
			postquential_.reset();
			paired_diff_.reset();
		}
		r.tree_added = true;
	}
	return r;
}

void MondrianForest::require_mutable(const char *what) const
{
	if (config_.mode == ForestMode::Fixed)
		throw std::logic_error(std::string(what) + " is not allowed on a fixed-size forest");
}

std::size_t MondrianForest::trim_trees()
{
	require_mutable("trim_trees");
	const std::size_t budget = pool_.capacity() / (trees_.size() + 1);
	std::size_t freed = 0;
	for (auto &t : trees_) {
		while (t.node_count() > budget && t.node_count() >= 3) {
			t.remove_leaf(pool_, t.select_leaf(pool_, config_.dynamic.addition_strategy, rng_));
			freed += 2;
		}
	}
	return freed;
}

void MondrianForest::add_tree()
{
	require_mutable("add_tree");
	trees_.emplace_back(config_.seed + trees_.size());
	++additions_;
}

void MondrianForest::remove_tree()
{
	require_mutable("remove_tree");
	if (trees_.size() < 2)
		throw std::logic_error("remove_tree needs at least two trees");
	const std::size_t victim = std::uniform_int_distribution<std::size_t>(0, trees_.size() - 1)(rng_);
	trees_[victim].release_all(pool_);
	trees_.erase(trees_.begin() + static_cast<std::ptrdiff_t>(victim));
}

std::size_t MondrianForest::max_depth() const
{
	std::size_t d = 0;
	for (const auto &t : trees_)
		d = std::max(d, t.depth_stats(pool_).max_depth);
	return d;
}

} // namespace mbf
