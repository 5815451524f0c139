#ifndef MBF_STATS_HPP
#define MBF_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace mbf {

struct MeanVar {
	double mean = 0.0;
	double variance = 0.0;
	double n_eff = 0.0; // window fill for sliding, faded count for fading
};

enum class TrackerKind { Sliding, Fading };

struct TrackerParams {
	TrackerKind kind = TrackerKind::Fading;
	std::size_t window_size = 200;
	double fading_factor = 0.995;
};

// Binary correctness values in a ring of fixed size. The mean divides by the
// fill level, so it is unbiased before the window is full.
class SlidingTracker {
  public:
	explicit SlidingTracker(std::size_t window_size);

	void update(bool correct);
	MeanVar mean_var() const;
	void reset();

	std::size_t window_size() const noexcept { return window_.size(); }
	std::size_t filled() const noexcept { return filled_; }
	std::size_t correct_sum() const noexcept { return correct_sum_; }
	// Window contents, oldest first.
	std::vector<bool> contents() const;

  private:
	std::vector<std::uint8_t> window_;
	std::size_t head_ = 0; // next write position
	std::size_t filled_ = 0;
	std::size_t correct_sum_ = 0;
};

// N = sum f^(n-i), A = sum f^(n-i) P_i, both updated in O(1).
class FadingTracker {
  public:
	explicit FadingTracker(double fading_factor);

	void update(bool correct);
	MeanVar mean_var() const;
	void reset();

	double fading_factor() const noexcept { return f_; }
	double faded_count() const noexcept { return count_; }
	double faded_correct() const noexcept { return correct_; }
	std::uint64_t count() const noexcept { return n_; }

  private:
	double f_;
	double count_ = 0.0;
	double correct_ = 0.0;
	std::uint64_t n_ = 0;
};

/// Prequential or postquential accuracy estimate, sliding or fading.
class AccuracyTracker {
  public:
	explicit AccuracyTracker(const TrackerParams &params);

	void update(bool correct);
	/// Throws std::logic_error before the first update.
	MeanVar mean_var() const;
	double n_eff() const;
	std::uint64_t updates() const noexcept { return updates_; }
	void reset();

  private:
	std::variant<SlidingTracker, FadingTracker> impl_;
	std::uint64_t updates_ = 0;
};

/**
 * Mean and variance of the per-point difference D = P_post - P_pre in
 * {-1, 0, 1}, windowed or faded exactly like AccuracyTracker. The variance is
 * mean(D^2) - mean(D)^2, clamped at zero.
 */
class PairedDifferenceTracker {
  public:
	explicit PairedDifferenceTracker(const TrackerParams &params);

	void update(int difference);
	MeanVar mean_var() const;
	double n_eff() const;
	void reset();

	double sum() const noexcept { return sum_; }
	double sum_squares() const noexcept { return sum_sq_; }

  private:
	TrackerParams params_;
	std::vector<std::int8_t> window_;
	std::size_t head_ = 0;
	std::size_t filled_ = 0;
	double count_ = 0.0; // faded count (fading only)
	double sum_ = 0.0;
	double sum_sq_ = 0.0;
	std::uint64_t updates_ = 0;
};

enum class ComparisonTest { SumVar, TTest, ZTest, SumStd };

inline constexpr double kTThreshold = 2.326; // one-sided 99%
inline constexpr double kZThreshold = 2.576;

struct TestStatistics {
	double a = 0.0;		  // mean difference, post minus pre
	double p = 0.0;		  // pooled proportion
	double b = 0.0;		  // pooled standard error
	double z_score = 0.0; // a / b (infinite when b == 0 and a != 0)
	double t_statistic = 0.0;
};

bool test_sum_var(const MeanVar &pre, const MeanVar &post);
bool test_sum_std(const MeanVar &pre, const MeanVar &post);
bool test_t(const MeanVar &difference);
bool test_z(const MeanVar &pre, const MeanVar &post);

double t_statistic(const MeanVar &difference);
TestStatistics z_statistics(const MeanVar &pre, const MeanVar &post);

// Dispatches to one of the four tests. Only the t-test reads `difference`.
bool significant(ComparisonTest test, const MeanVar &pre, const MeanVar &post, const MeanVar &difference);

/// Confusion matrix whose cells decay by `fading_factor` before every update.
class FadingConfusionMatrix {
  public:
	FadingConfusionMatrix(std::size_t label_count, double fading_factor);

	void update(std::size_t true_label, std::size_t predicted_label);
	/// Mean per-label F1 over labels with non-zero row or column mass.
	double f1_macro() const;

	double at(std::size_t true_label, std::size_t predicted_label) const {
		return cells_[true_label * labels_ + predicted_label];
	}
	std::size_t label_count() const noexcept { return labels_; }

  private:
	std::size_t labels_;
	double f_;
	std::vector<double> cells_;
	std::uint64_t updates_ = 0;
};

} // namespace mbf

#endif
