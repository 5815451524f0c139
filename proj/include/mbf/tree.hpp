#ifndef MBF_TREE_HPP
#define MBF_TREE_HPP

#include "mbf/pool.hpp"
#include "mbf/stream.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mbf {

// Leaf selection used when trimming trees to make room for a new one.
enum class LeafStrategy { Random, Depth, Count };

struct DepthStats {
	std::size_t leaf_count = 0;
	std::size_t max_depth = 0;
};

/**
 * One Mondrian tree whose nodes live in a NodePool shared with its forest.
 *
 * Leaves carry an infinite split time, so a point that lands outside a leaf's
 * box always splits it while the pool has room. Label counters are kept on
 * every node along a point's path. When the pool cannot supply a pair the tree
 * falls back to extending boxes and counters only (the tree is "paused").
 */
class MondrianTree {
  public:
	explicit MondrianTree(std::uint64_t seed) : rng_(seed) {}

	/// Trains on one labelled point; returns true when nodes were added.
	bool train(NodePool &pool, std::span<const double> x, Label label);

	/// Writes the label distribution of the leaf reached by split routing.
	/// Falls back to the closest ancestor with non-zero counters. Requires a
	/// non-empty tree and `out.size() == label_count`.
	void predict(const NodePool &pool, std::span<const double> x, std::span<double> out) const;
	std::vector<double> predict(const NodePool &pool, std::span<const double> x) const;

	NodeRef select_leaf(const NodePool &pool, LeafStrategy strategy, std::mt19937_64 &rng) const;

	/// Drops `leaf` and its parent; the sibling moves up and takes the
	/// parent's box.
	void remove_leaf(NodePool &pool, NodeRef leaf);

	/// Returns every node to the pool and leaves the tree empty.
	void release_all(NodePool &pool);

	DepthStats depth_stats(const NodePool &pool) const;

	/// Reachable nodes in pre-order.
	std::vector<NodeRef> nodes(const NodePool &pool) const;

	NodeRef root() const noexcept { return root_; }
	std::size_t node_count() const noexcept { return node_count_; }
	bool empty() const noexcept { return root_ == kNoNode; }
	bool paused() const noexcept { return paused_; }

  private:
	void split(NodePool &pool, NodeRef node, NodeRef new_parent, NodeRef sibling, std::span<const double> x,
			   Label label, double split_time, double extension);
	void replace_child(NodePool &pool, NodeRef parent, NodeRef from, NodeRef to);

	NodeRef root_ = kNoNode;
	std::size_t node_count_ = 0;
	bool paused_ = false;
	std::mt19937_64 rng_;
};

} // namespace mbf

#endif
