#include "mbf/stats.hpp"

#include "mbf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbf {

namespace {

void check_fading_factor(double f)
{
	if (!(f >= 0.0 && f <= 1.0))
		throw ConfigError("fading factor must lie in [0, 1]");
}

void check_window(std::size_t w)
{
	if (w == 0)
		throw ConfigError("sliding window size must be positive");
}

MeanVar binary_mean_var(double correct, double count)
{
	const double mu = correct / count;
	return {mu, mu * (1.0 - mu), count};
}

} // namespace

SlidingTracker::SlidingTracker(std::size_t window_size)
{
	check_window(window_size);
	window_.assign(window_size, 0);
}

void SlidingTracker::update(bool correct)
{
	if (filled_ == window_.size())
		correct_sum_ -= window_[head_];
	else
		++filled_;
	window_[head_] = correct ? 1 : 0;
	correct_sum_ += window_[head_];
	head_ = (head_ + 1) % window_.size();
}

MeanVar SlidingTracker::mean_var() const
{
	if (filled_ == 0)
		throw std::logic_error("accuracy is undefined before the first update");
	return binary_mean_var(static_cast<double>(correct_sum_), static_cast<double>(filled_));
}

void SlidingTracker::reset()
{
	std::ranges::fill(window_, 0);
	head_ = filled_ = correct_sum_ = 0;
}

std::vector<bool> SlidingTracker::contents() const
{
	std::vector<bool> out;
	out.reserve(filled_);
	const std::size_t start = (head_ + window_.size() - filled_) % window_.size();
	for (std::size_t i = 0; i < filled_; ++i)
		out.push_back(window_[(start + i) % window_.size()] != 0);
	return out;
}

FadingTracker::FadingTracker(double fading_factor) : f_(fading_factor) { check_fading_factor(fading_factor); }

void FadingTracker::update(bool correct)
{
	count_ = f_ * count_ + 1.0;
	correct_ = f_ * correct_ + (correct ? 1.0 : 0.0);
	++n_;
}

MeanVar FadingTracker::mean_var() const
{
	if (n_ == 0)
		throw std::logic_error("accuracy is undefined before the first update");
	return binary_mean_var(correct_, count_);
}

void FadingTracker::reset()
{
	count_ = correct_ = 0.0;
	n_ = 0;
}

AccuracyTracker::AccuracyTracker(const TrackerParams &params)
	: impl_(params.kind == TrackerKind::Sliding
				? std::variant<SlidingTracker, FadingTracker>(SlidingTracker(params.window_size))
				: std::variant<SlidingTracker, FadingTracker>(FadingTracker(params.fading_factor)))
{
}

void AccuracyTracker::update(bool correct)
{
	std::visit([correct](auto &t) { t.update(correct); }, impl_);
	++updates_;
}

MeanVar AccuracyTracker::mean_var() const
{
	return std::visit([](const auto &t) { return t.mean_var(); }, impl_);
}

double AccuracyTracker::n_eff() const
{
	if (updates_ == 0)
		return 0.0;
	return mean_var().n_eff;
}

void AccuracyTracker::reset()
{
	std::visit([](auto &t) { t.reset(); }, impl_);
	updates_ = 0;
}

PairedDifferenceTracker::PairedDifferenceTracker(const TrackerParams &params) : params_(params)
{
	if (params.kind == TrackerKind::Sliding) {
		check_window(params.window_size);
		window_.assign(params.window_size, 0);
	} else {
		check_fading_factor(params.fading_factor);
	}
}

void PairedDifferenceTracker::update(int difference)
{
	if (difference < -1 || difference > 1)
		throw std::invalid_argument("paired difference must be -1, 0 or 1");
	const double d = difference;
	if (params_.kind == TrackerKind::Sliding) {
		if (filled_ == window_.size()) {
			const double old = window_[head_];
			sum_ -= old;
			sum_sq_ -= old * old;
		} else {
			++filled_;
		}
		window_[head_] = static_cast<std::int8_t>(difference);
		head_ = (head_ + 1) % window_.size();
		sum_ += d;
		sum_sq_ += d * d;
	} else {
		const double f = params_.fading_factor;
		count_ = f * count_ + 1.0;
		sum_ = f * sum_ + d;
		sum_sq_ = f * sum_sq_ + d * d;
	}
	++updates_;
}

double PairedDifferenceTracker::n_eff() const
{
	return params_.kind == TrackerKind::Sliding ? static_cast<double>(filled_) : count_;
}

MeanVar PairedDifferenceTracker::mean_var() const
{
	if (updates_ == 0)
		throw std::logic_error("paired difference is undefined before the first update");
	const double n = n_eff();
	const double mu = sum_ / n;
	return {mu, std::max(0.0, sum_sq_ / n - mu * mu), n};
}

void PairedDifferenceTracker::reset()
{
	std::ranges::fill(window_, 0);
	head_ = filled_ = 0;
	count_ = sum_ = sum_sq_ = 0.0;
	updates_ = 0;
}

bool test_sum_var(const MeanVar &pre, const MeanVar &post)
{
	return post.mean - pre.mean > std::sqrt(post.variance + pre.variance);
}

bool test_sum_std(const MeanVar &pre, const MeanVar &post)
{
	return post.mean - pre.mean > std::sqrt(post.variance) + std::sqrt(pre.variance);
}

double t_statistic(const MeanVar &difference)
{
	const double sigma = std::sqrt(difference.variance);
	if (sigma == 0.0) {
		if (difference.mean == 0.0)
			return 0.0;
		return std::copysign(std::numeric_limits<double>::infinity(), difference.mean);
	}
	return std::sqrt(difference.n_eff) * difference.mean / sigma;
}

bool test_t(const MeanVar &difference)
{
	if (difference.variance == 0.0)
		return difference.mean > 0.0;
	return t_statistic(difference) > kTThreshold;
}

TestStatistics z_statistics(const MeanVar &pre, const MeanVar &post)
{
	TestStatistics s;
	s.a = post.mean - pre.mean;
	s.p = (pre.mean + post.mean) / 2.0;
	const double n = std::min(pre.n_eff, post.n_eff);
	s.b = std::sqrt(std::max(0.0, 2.0 * s.p * (1.0 - s.p) / n));
	if (s.b == 0.0)
		s.z_score = s.a == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), s.a);
	else
		s.z_score = s.a / s.b;
	return s;
}

bool test_z(const MeanVar &pre, const MeanVar &post)
{
	const auto s = z_statistics(pre, post);
	if (s.b == 0.0)
		return s.a > 0.0;
	return s.z_score > kZThreshold;
}

bool significant(ComparisonTest test, const MeanVar &pre, const MeanVar &post, const MeanVar &difference)
{
	switch (test) {
	case ComparisonTest::SumVar:
		return test_sum_var(pre, post);
	case ComparisonTest::TTest:
		return test_t(difference);
	case ComparisonTest::ZTest:
		return test_z(pre, post);
	case ComparisonTest::SumStd:
		return test_sum_std(pre, post);
	}
	throw std::invalid_argument("unknown comparison test");
}

FadingConfusionMatrix::FadingConfusionMatrix(std::size_t label_count, double fading_factor)
	: labels_(label_count), f_(fading_factor), cells_(label_count * label_count, 0.0)
{
	if (label_count < 1)
		throw ConfigError("confusion matrix needs at least one label");
	check_fading_factor(fading_factor);
}

void FadingConfusionMatrix::update(std::size_t true_label, std::size_t predicted_label)
{
	if (true_label >= labels_ || predicted_label >= labels_)
		throw std::invalid_argument("label out of range for confusion matrix");
	if (f_ != 1.0)
		for (double &c : cells_)
			c *= f_;
	cells_[true_label * labels_ + predicted_label] += 1.0;
	++updates_;
}

double FadingConfusionMatrix::f1_macro() const
{
	if (updates_ == 0)
		throw std::logic_error("F1 is undefined before the first update");
	double total = 0.0;
	std::size_t present = 0;
	for (std::size_t l = 0; l < labels_; ++l) {
		const double tp = at(l, l);
		double fn = 0.0, fp = 0.0;
		for (std::size_t k = 0; k < labels_; ++k) {
			if (k == l)
				continue;
			fn += at(l, k);
			fp += at(k, l);
		}
		if (tp == 0.0 && fn == 0.0 && fp == 0.0)
			continue;
		++present;
		const double denom = 2.0 * tp + fp + fn;
		total += denom > 0.0 ? 2.0 * tp / denom : 0.0;
	}
	return present ? total / static_cast<double>(present) : 0.0;
}

} // namespace mbf
