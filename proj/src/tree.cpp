#include "mbf/tree.hpp"

#include "mbf/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace mbf {

namespace {

constexpr double kLeafTime = std::numeric_limits<double>::infinity();

double extension_mass(const NodePool &pool, NodeRef n, std::span<const double> x)
{
	const auto lo = pool.lower(n);
	const auto hi = pool.upper(n);
	double e = 0.0;
	for (std::size_t d = 0; d < x.size(); ++d)
		e += std::max(0.0, lo[d] - x[d]) + std::max(0.0, x[d] - hi[d]);
	return e;
}

void extend_box(NodePool &pool, NodeRef n, std::span<const double> x)
{
	auto lo = pool.lower(n);
	auto hi = pool.upper(n);
	for (std::size_t d = 0; d < x.size(); ++d) {
		lo[d] = std::min(lo[d], x[d]);
		hi[d] = std::max(hi[d], x[d]);
	}
}

void init_leaf(NodePool &pool, NodeRef n, std::span<const double> x, Label label)
{
	std::ranges::copy(x, pool.lower(n).begin());
	std::ranges::copy(x, pool.upper(n).begin());
	pool.counters(n)[label] = 1;
	pool.split_time(n) = kLeafTime;
}

std::uint64_t counter_total(const NodePool &pool, NodeRef n)
{
	const auto c = pool.counters(n);
	return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

} // namespace

bool MondrianTree::train(NodePool &pool, std::span<const double> x, Label label)
{
	if (x.size() != pool.feature_count())
		throw std::invalid_argument("point has " + std::to_string(x.size()) + " features, expected " +
									std::to_string(pool.feature_count()));
	if (label >= pool.label_count())
		throw std::invalid_argument("label " + std::to_string(label) + " out of range");

	if (root_ == kNoNode) {
		const auto root = pool.allocate_root();
		if (!root) {
			paused_ = true;
			return false;
		}
		init_leaf(pool, *root, x, label);
		root_ = *root;
		node_count_ = 1;
		paused_ = false;
		return true;
	}

	bool extend_only = false;
	double parent_time = 0.0;
	NodeRef node = root_;
	for (;;) {
		if (!extend_only) {
			const double e = extension_mass(pool, node, x);
			if (e > 0.0) {
				const double t = parent_time + std::exponential_distribution<double>(e)(rng_);
				if (t < pool.split_time(node)) {
					if (const auto pair = pool.allocate_pair()) {
						split(pool, node, pair->first, pair->second, x, label, t, e);
						node_count_ += 2;
						paused_ = false;
						return true;
					}
					extend_only = true;
					paused_ = true;
				}
			}
		}
		extend_box(pool, node, x);
		++pool.counters(node)[label];
		if (pool.is_leaf(node))
			return false;
		parent_time = pool.split_time(node);
		node = x[pool.split_dim(node)] <= pool.split_value(node) ? pool.left(node) : pool.right(node);
	}
}

void MondrianTree::split(NodePool &pool, NodeRef node, NodeRef new_parent, NodeRef sibling,
						 std::span<const double> x, Label label, double split_time, double extension)
{
	const auto lo = pool.lower(node);
	const auto hi = pool.upper(node);

	// dimension drawn proportionally to how far x sticks out of the box on it
	std::uniform_real_distribution<double> mass(0.0, extension);
	const double u = mass(rng_);
	std::size_t dim = 0;
	double acc = 0.0;
	for (std::size_t d = 0; d < x.size(); ++d) {
		const double gap = std::max(0.0, lo[d] - x[d]) + std::max(0.0, x[d] - hi[d]);
		if (gap <= 0.0)
			continue;
		dim = d;
		acc += gap;
		if (u < acc)
			break;
	}

	const bool above = x[dim] > hi[dim];
	double value;
	if (above) {
		value = std::uniform_real_distribution<double>(hi[dim], x[dim])(rng_);
		if (!(value < x[dim]))
			value = hi[dim];
	} else {
		value = std::uniform_real_distribution<double>(x[dim], lo[dim])(rng_);
		if (!(value < lo[dim]))
			value = x[dim];
	}

	const NodeRef old_parent = pool.parent(node);
	pool.parent(new_parent) = old_parent;
	pool.split_dim(new_parent) = static_cast<std::uint32_t>(dim);
	pool.split_value(new_parent) = value;
	pool.split_time(new_parent) = split_time;
	std::ranges::copy(lo, pool.lower(new_parent).begin());
	std::ranges::copy(hi, pool.upper(new_parent).begin());
	extend_box(pool, new_parent, x);
	std::ranges::copy(pool.counters(node), pool.counters(new_parent).begin());
	++pool.counters(new_parent)[label];

	init_leaf(pool, sibling, x, label);
	pool.parent(sibling) = new_parent;

	if (above) {
		pool.left(new_parent) = node;
		pool.right(new_parent) = sibling;
	} else {
		pool.left(new_parent) = sibling;
		pool.right(new_parent) = node;
	}

	if (old_parent == kNoNode)
		root_ = new_parent;
	else
		replace_child(pool, old_parent, node, new_parent);
	pool.parent(node) = new_parent;
}

void MondrianTree::replace_child(NodePool &pool, NodeRef parent, NodeRef from, NodeRef to)
{
	if (pool.left(parent) == from)
		pool.left(parent) = to;
	else if (pool.right(parent) == from)
		pool.right(parent) = to;
	else
		throw InvariantViolation("node " + std::to_string(from) + " is not a child of " + std::to_string(parent));
}

void MondrianTree::predict(const NodePool &pool, std::span<const double> x, std::span<double> out) const
{
	if (root_ == kNoNode)
		throw std::logic_error("prediction from an empty tree");
	NodeRef node = root_;
	while (!pool.is_leaf(node))
		node = x[pool.split_dim(node)] <= pool.split_value(node) ? pool.left(node) : pool.right(node);

	std::uint64_t total = counter_total(pool, node);
	while (total == 0 && pool.parent(node) != kNoNode) {
		node = pool.parent(node);
		total = counter_total(pool, node);
	}
	const auto c = pool.counters(node);
	if (total == 0) {
		std::ranges::fill(out, 1.0 / static_cast<double>(out.size()));
		return;
	}
	for (std::size_t l = 0; l < out.size(); ++l)
		out[l] = static_cast<double>(c[l]) / static_cast<double>(total);
}

std::vector<double> MondrianTree::predict(const NodePool &pool, std::span<const double> x) const
{
	std::vector<double> out(pool.label_count());
	predict(pool, x, out);
	return out;
}

std::vector<NodeRef> MondrianTree::nodes(const NodePool &pool) const
{
	std::vector<NodeRef> out;
	if (root_ == kNoNode)
		return out;
	out.reserve(node_count_);
	std::vector<NodeRef> stack{root_};
	while (!stack.empty()) {
		const NodeRef n = stack.back();
		stack.pop_back();
		out.push_back(n);
		if (!pool.is_leaf(n)) {
			stack.push_back(pool.right(n));
			stack.push_back(pool.left(n));
		}
	}
	return out;
}

DepthStats MondrianTree::depth_stats(const NodePool &pool) const
{
	DepthStats s;
	if (root_ == kNoNode)
		return s;
	std::vector<std::pair<NodeRef, std::size_t>> stack{{root_, 0}};
	while (!stack.empty()) {
		const auto [n, depth] = stack.back();
		stack.pop_back();
		if (pool.is_leaf(n)) {
			++s.leaf_count;
			s.max_depth = std::max(s.max_depth, depth);
		} else {
			stack.emplace_back(pool.left(n), depth + 1);
			stack.emplace_back(pool.right(n), depth + 1);
		}
	}
	return s;
}

NodeRef MondrianTree::select_leaf(const NodePool &pool, LeafStrategy strategy, std::mt19937_64 &rng) const
{
	if (node_count_ < 3)
		throw InvariantViolation("leaf selection needs a tree with at least 3 nodes");

	struct Candidate {
		NodeRef ref;
		std::size_t depth;
		std::uint64_t total;
	};
	std::vector<Candidate> leaves;
	std::vector<std::pair<NodeRef, std::size_t>> stack{{root_, 0}};
	while (!stack.empty()) {
		const auto [n, depth] = stack.back();
		stack.pop_back();
		if (pool.is_leaf(n)) {
			leaves.push_back({n, depth, counter_total(pool, n)});
		} else {
			stack.emplace_back(pool.left(n), depth + 1);
			stack.emplace_back(pool.right(n), depth + 1);
		}
	}
	std::ranges::sort(leaves, {}, &Candidate::ref);

	switch (strategy) {
	case LeafStrategy::Random:
		return leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng)].ref;
	case LeafStrategy::Depth:
		// max_element keeps the first maximum, i.e. the lowest slot
		return std::ranges::max_element(leaves, {}, &Candidate::depth)->ref;
	case LeafStrategy::Count:
		return std::ranges::min_element(leaves, {}, &Candidate::total)->ref;
	}
	throw std::invalid_argument("unknown leaf strategy");
}

void MondrianTree::remove_leaf(NodePool &pool, NodeRef leaf)
{
	if (!pool.is_allocated(leaf) || !pool.is_leaf(leaf))
		throw InvariantViolation("node " + std::to_string(leaf) + " is not an allocated leaf");
	if (leaf == root_)
		throw InvariantViolation("cannot remove the root leaf");
	NodeRef top = leaf;
	while (pool.parent(top) != kNoNode)
		top = pool.parent(top);
	if (top != root_)
		throw InvariantViolation("node " + std::to_string(leaf) + " belongs to another tree");

	const NodeRef parent = pool.parent(leaf);
	const NodeRef sibling = pool.left(parent) == leaf ? pool.right(parent) : pool.left(parent);
	const NodeRef grand = pool.parent(parent);

	pool.parent(sibling) = grand;
	if (grand == kNoNode)
		root_ = sibling;
	else
		replace_child(pool, grand, parent, sibling);
	std::ranges::copy(pool.lower(parent), pool.lower(sibling).begin());
	std::ranges::copy(pool.upper(parent), pool.upper(sibling).begin());

	const NodeRef gone[] = {leaf, parent};
	pool.release(gone);
	node_count_ -= 2;
}

void MondrianTree::release_all(NodePool &pool)
{
	const auto all = nodes(pool);
	pool.release(all);
	root_ = kNoNode;
	node_count_ = 0;
	paused_ = false;
}

} // namespace mbf
