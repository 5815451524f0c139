// Test-only oracles and structural checks. Nothing here calls the code path
// it is used to verify.
#ifndef MBF_TESTS_SUPPORT_HPP
#define MBF_TESTS_SUPPORT_HPP

#include "mbf/forest.hpp"
#include "mbf/pool.hpp"
#include "mbf/tree.hpp"

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace mbf::testing {

// Empty string when every structural invariant of `tree` holds.
inline std::string check_tree(const NodePool &pool, const MondrianTree &tree, std::set<NodeRef> *seen = nullptr)
{
	if (tree.empty())
		return tree.node_count() == 0 ? "" : "empty tree with non-zero node count";
	if (pool.parent(tree.root()) != kNoNode)
		return "root has a parent";
	std::size_t count = 0;
	std::vector<NodeRef> stack{tree.root()};
	while (!stack.empty()) {
		const NodeRef n = stack.back();
		stack.pop_back();
		++count;
		if (!pool.is_allocated(n))
			return "reachable node " + std::to_string(n) + " is not allocated";
		if (seen && !seen->insert(n).second)
			return "node " + std::to_string(n) + " reachable twice";
		const auto lo = pool.lower(n), hi = pool.upper(n);
		for (std::size_t d = 0; d < lo.size(); ++d)
			if (!(lo[d] <= hi[d]))
				return "inverted box at node " + std::to_string(n);
		const bool has_left = pool.left(n) != kNoNode, has_right = pool.right(n) != kNoNode;
		if (has_left != has_right)
			return "node " + std::to_string(n) + " has exactly one child";
		if (!has_left) {
			if (!std::isinf(pool.split_time(n)))
				return "leaf without infinite split time";
			continue;
		}
		for (NodeRef c : {pool.left(n), pool.right(n)}) {
			if (pool.parent(c) != n)
				return "broken parent link below " + std::to_string(n);
			const auto clo = pool.lower(c), chi = pool.upper(c);
			for (std::size_t d = 0; d < lo.size(); ++d)
				if (clo[d] < lo[d] || chi[d] > hi[d])
					return "child box of " + std::to_string(c) + " escapes parent " + std::to_string(n);
			if (!(pool.split_time(c) > pool.split_time(n)))
				return "split times not increasing below " + std::to_string(n);
			stack.push_back(c);
		}
		// left subtree box must lie on the <= side, right on the > side
		const auto d = pool.split_dim(n);
		if (pool.upper(pool.left(n))[d] > pool.split_value(n) || pool.lower(pool.right(n))[d] <= pool.split_value(n))
			return "children on the wrong side of split at " + std::to_string(n);
	}
	if (count != tree.node_count())
		return "node_count " + std::to_string(tree.node_count()) + " but " + std::to_string(count) + " reachable";
	if (count % 2 == 0)
		return "even node count";
	return "";
}

inline std::string check_forest(const MondrianForest &forest)
{
	std::set<NodeRef> seen;
	std::size_t total = 0;
	for (const auto &t : forest.trees()) {
		if (auto err = check_tree(forest.pool(), t, &seen); !err.empty())
			return err;
		total += t.node_count();
	}
	if (total != forest.pool().used())
		return "sum of node counts " + std::to_string(total) + " != pool used " + std::to_string(forest.pool().used());
	if (forest.pool().used() > forest.pool().capacity())
		return "pool over capacity";
	return "";
}

inline bool box_contains(const NodePool &pool, NodeRef n, std::span<const double> x)
{
	for (std::size_t d = 0; d < x.size(); ++d)
		if (x[d] < pool.lower(n)[d] || x[d] > pool.upper(n)[d])
			return false;
	return true;
}

// Direct weighted sums sum_i f^(n-i) v_i, recomputed from scratch.
struct FadedSums {
	double count = 0.0, sum = 0.0, sum_sq = 0.0;
};

inline FadedSums faded_oracle(const std::vector<int> &values, double f)
{
	FadedSums s;
	const std::size_t n = values.size();
	for (std::size_t i = 0; i < n; ++i) {
		const double w = std::pow(f, static_cast<double>(n - 1 - i));
		s.count += w;
		s.sum += w * values[i];
		s.sum_sq += w * values[i] * values[i];
	}
	return s;
}

// Batch macro F1 from a prediction log, counting cells from scratch.
inline double batch_macro_f1(const std::vector<std::pair<std::size_t, std::size_t>> &log, std::size_t labels)
{
	std::vector<double> tp(labels, 0.0), fp(labels, 0.0), fn(labels, 0.0);
	for (const auto &[truth, pred] : log) {
		if (truth == pred) {
			tp[truth] += 1;
		} else {
			fn[truth] += 1;
			fp[pred] += 1;
		}
	}
	double total = 0.0;
	std::size_t present = 0;
	for (std::size_t l = 0; l < labels; ++l) {
		if (tp[l] + fp[l] + fn[l] == 0)
			continue;
		++present;
		total += 2 * tp[l] / (2 * tp[l] + fp[l] + fn[l]);
	}
	return present ? total / present : 0.0;
}

} // namespace mbf::testing

#endif
