#ifndef MBF_POOL_HPP
#define MBF_POOL_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mbf {

using NodeRef = std::uint32_t;
inline constexpr NodeRef kNoNode = std::numeric_limits<NodeRef>::max();

/// Bytes charged per node: both box bounds as 8-byte reals, label counters and
/// the three links as 4-byte integers, a 4-byte split dimension and two 8-byte
/// reals (split value, split time).
std::size_t node_footprint(std::size_t feature_count, std::size_t label_count);

/**
 * Fixed-capacity arena of Mondrian tree nodes shared by every tree of a forest.
 *
 * Capacity is derived from a byte budget and never changes. Boxes and counters
 * live in flat arrays indexed by slot; a slot is identified by a NodeRef.
 * Allocation hands out pairs, because a Mondrian split always inserts one new
 * parent and one new sibling. When fewer than two slots are free, allocation
 * reports unavailability and the caller pauses.
 */
class NodePool {
  public:
	NodePool(std::size_t memory_bytes, std::size_t feature_count, std::size_t label_count);

	std::size_t capacity() const noexcept { return capacity_; }
	std::size_t used() const noexcept { return capacity_ - free_.size(); }
	std::size_t available() const noexcept { return free_.size(); }
	std::size_t feature_count() const noexcept { return features_; }
	std::size_t label_count() const noexcept { return labels_; }

	std::optional<std::pair<NodeRef, NodeRef>> allocate_pair();
	// allocate_pair followed by releasing the second slot.
	std::optional<NodeRef> allocate_root();

	// Throws InvariantViolation on double free or out-of-range refs; the pool
	// is left untouched in that case.
	void release(std::span<const NodeRef> refs);
	void release(NodeRef ref) { release(std::span<const NodeRef>(&ref, 1)); }

	bool is_allocated(NodeRef ref) const noexcept { return ref < capacity_ && allocated_[ref]; }

	// Node field access. No allocation check: callers hold valid refs.
	NodeRef &parent(NodeRef n) { return parent_[n]; }
	NodeRef &left(NodeRef n) { return left_[n]; }
	NodeRef &right(NodeRef n) { return right_[n]; }
	std::uint32_t &split_dim(NodeRef n) { return split_dim_[n]; }
	double &split_value(NodeRef n) { return split_value_[n]; }
	double &split_time(NodeRef n) { return split_time_[n]; }
	NodeRef parent(NodeRef n) const { return parent_[n]; }
	NodeRef left(NodeRef n) const { return left_[n]; }
	NodeRef right(NodeRef n) const { return right_[n]; }
	std::uint32_t split_dim(NodeRef n) const { return split_dim_[n]; }
	double split_value(NodeRef n) const { return split_value_[n]; }
	double split_time(NodeRef n) const { return split_time_[n]; }
	bool is_leaf(NodeRef n) const { return left_[n] == kNoNode; }

	std::span<double> lower(NodeRef n) { return {lower_.data() + std::size_t{n} * features_, features_}; }
	std::span<double> upper(NodeRef n) { return {upper_.data() + std::size_t{n} * features_, features_}; }
	std::span<std::uint32_t> counters(NodeRef n) { return {counters_.data() + std::size_t{n} * labels_, labels_}; }
	std::span<const double> lower(NodeRef n) const { return {lower_.data() + std::size_t{n} * features_, features_}; }
	std::span<const double> upper(NodeRef n) const { return {upper_.data() + std::size_t{n} * features_, features_}; }
	std::span<const std::uint32_t> counters(NodeRef n) const {
		return {counters_.data() + std::size_t{n} * labels_, labels_};
	}

  private:
	void reset_slot(NodeRef n);

	std::size_t features_;
	std::size_t labels_;
	std::size_t capacity_;

	std::vector<NodeRef> free_; // popped from the back; lowest slot first on a fresh pool
	std::vector<std::uint8_t> allocated_;

	std::vector<NodeRef> parent_, left_, right_;
	std::vector<std::uint32_t> split_dim_;
	std::vector<double> split_value_, split_time_;
	std::vector<double> lower_, upper_;
	std::vector<std::uint32_t> counters_;
};

} // namespace mbf

#endif
