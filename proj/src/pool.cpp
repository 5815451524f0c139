#include "mbf/pool.hpp"

#include "mbf/error.hpp"

#include <algorithm>
#include <string>

namespace mbf {

std::size_t node_footprint(std::size_t feature_count, std::size_t label_count)
{
	return 8 * (2 * feature_count) + 4 * label_count + 4 * 3 + 4 + 8 + 8;
}

NodePool::NodePool(std::size_t memory_bytes, std::size_t feature_count, std::size_t label_count)
	: features_(feature_count), labels_(label_count), capacity_(0)
{
	if (feature_count < 1)
		throw ConfigError("node pool needs at least one feature");
	if (label_count < 2)
		throw ConfigError("node pool needs at least two labels");
	const std::size_t footprint = node_footprint(feature_count, label_count);
	if (memory_bytes < footprint)
		throw ConfigError("memory budget of " + std::to_string(memory_bytes) + " bytes is below one node (" +
						  std::to_string(footprint) + " bytes)");
	capacity_ = memory_bytes / footprint;
	if (capacity_ >= kNoNode)
		throw ConfigError("memory budget exceeds the addressable node count");

	free_.resize(capacity_);
	for (std::size_t i = 0; i < capacity_; ++i)
		free_[i] = static_cast<NodeRef>(capacity_ - 1 - i);
	allocated_.assign(capacity_, 0);
	parent_.assign(capacity_, kNoNode);
	left_.assign(capacity_, kNoNode);
	right_.assign(capacity_, kNoNode);
	split_dim_.assign(capacity_, 0);
	split_value_.assign(capacity_, 0.0);
	split_time_.assign(capacity_, 0.0);
	lower_.assign(capacity_ * features_, 0.0);
	upper_.assign(capacity_ * features_, 0.0);
	counters_.assign(capacity_ * labels_, 0);
}

void NodePool::reset_slot(NodeRef n)
{
	parent_[n] = left_[n] = right_[n] = kNoNode;
	split_dim_[n] = 0;
	split_value_[n] = 0.0;
	split_time_[n] = 0.0;
	std::ranges::fill(lower(n), 0.0);
	std::ranges::fill(upper(n), 0.0);
	std::ranges::fill(counters(n), 0u);
}

std::optional<std::pair<NodeRef, NodeRef>> NodePool::allocate_pair()
{
	if (free_.size() < 2)
		return std::nullopt;
	const NodeRef a = free_.back();
	free_.pop_back();
	const NodeRef b = free_.back();
	free_.pop_back();
	for (NodeRef n : {a, b}) {
		allocated_[n] = 1;
		reset_slot(n);
	}
	return std::make_pair(a, b);
}

std::optional<NodeRef> NodePool::allocate_root()
{
	auto pair = allocate_pair();
	if (!pair)
		return std::nullopt;
	release(pair->second);
	return pair->first;
}

void NodePool::release(std::span<const NodeRef> refs)
{
	for (std::size_t i = 0; i < refs.size(); ++i) {
		const NodeRef n = refs[i];
		if (!is_allocated(n))
			throw InvariantViolation("release of unallocated node slot " + std::to_string(n));
		for (std::size_t j = 0; j < i; ++j)
			if (refs[j] == n)
				throw InvariantViolation("node slot " + std::to_string(n) + " released twice");
	}
	for (NodeRef n : refs) {
		allocated_[n] = 0;
		free_.push_back(n);
	}
}

} // namespace mbf
