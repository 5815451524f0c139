#ifndef MBF_FOREST_HPP
#define MBF_FOREST_HPP

#include "mbf/pool.hpp"
#include "mbf/stats.hpp"
#include "mbf/stream.hpp"
#include "mbf/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mbf {

// Fixed keeps its tree count. Dynamic starts from one tree and grows when
// postquential accuracy significantly exceeds prequential accuracy.
// Scheduled trains like Fixed but accepts add_tree/remove_tree calls from an
// external schedule.
enum class ForestMode { Fixed, Dynamic, Scheduled };

struct DynamicConfig {
	LeafStrategy addition_strategy = LeafStrategy::Count;
	TrackerKind tracker_kind = TrackerKind::Fading;
	ComparisonTest comparison_test = ComparisonTest::SumStd;
	double min_samples_before_test = 30;
	bool reset_trackers_on_add = true;
};

struct ForestConfig {
	std::size_t memory_bytes = 200000;
	std::size_t feature_count = 0;
	std::size_t label_count = 0;
	ForestMode mode = ForestMode::Fixed;
	std::size_t tree_count = 1; // ignored in Dynamic mode
	DynamicConfig dynamic;
	std::size_t window_size = 200;
	double fading_factor = 0.995;
	std::uint64_t seed = 1;
};

struct TrainReport {
	Label pre_label = 0;
	Label post_label = 0;
	bool pre_correct = false;
	bool post_correct = false;
	bool tree_added = false;
};

class MondrianForest {
  public:
	explicit MondrianForest(const ForestConfig &config);

	/// Argmax of the averaged distributions of the non-empty trees, lowest
	/// label on ties; label 0 when every tree is empty.
	Label predict(std::span<const double> x) const;

	/// Predict, train every tree, predict again, update the trackers and,
	/// in Dynamic mode, trim and add a tree on significant overfitting.
	TrainReport train(std::span<const double> x, Label label);

	/// Trims every tree to floor(capacity / (trees + 1)) nodes using the
	/// configured leaf strategy. Returns the number of released nodes.
	std::size_t trim_trees();
	void add_tree();
	/// Deletes a uniformly drawn tree and releases all its nodes.
	void remove_tree();

	const std::vector<MondrianTree> &trees() const noexcept { return trees_; }
	const NodePool &pool() const noexcept { return pool_; }
	const AccuracyTracker &prequential() const noexcept { return prequential_; }
	const AccuracyTracker &postquential() const noexcept { return postquential_; }
	const PairedDifferenceTracker &paired_difference() const noexcept { return paired_diff_; }
	const ForestConfig &config() const noexcept { return config_; }
	std::size_t additions() const noexcept { return additions_; }
	std::size_t max_depth() const;

  private:
	void require_mutable(const char *what) const;
	bool overfitting() const;

	ForestConfig config_;
	NodePool pool_;
	std::vector<MondrianTree> trees_;
	AccuracyTracker prequential_;
	AccuracyTracker postquential_;
	PairedDifferenceTracker paired_diff_;
	std::mt19937_64 rng_; // leaf and tree selection
	std::size_t additions_ = 0;
	mutable std::vector<double> dist_, acc_;
};

} // namespace mbf

#endif
