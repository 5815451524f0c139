#ifndef MBF_STREAM_HPP
#define MBF_STREAM_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace mbf {

using Label = std::uint32_t;

struct DataPoint {
	std::vector<double> features;
	Label label = 0;

	bool operator==(const DataPoint &) const = default;
};

struct StreamSpec {
	std::size_t feature_count = 0;
	std::size_t label_count = 0;
	std::size_t length = 0;
};

struct Dataset {
	std::vector<DataPoint> points;
	StreamSpec spec;
};

struct CsvOptions {
	// Negative counts from the end; -1 is the last column.
	int label_column = -1;
	bool has_header = false;
};

// Reads a comma-separated file. Throws ParseError (with the 1-based data row)
// on ragged rows, non-numeric cells, negative labels or an empty file.
Dataset csv_load(const std::filesystem::path &path, const CsvOptions &options = {});

// Non-overlapping windows over raw sensor rows. Each output point carries the
// per-axis means followed by the per-axis population standard deviations and
// the window's most frequent label (lowest on ties). A trailing partial window
// is dropped.
std::vector<DataPoint> window_features(std::span<const DataPoint> samples, std::size_t window_size);

struct RbfGeneratorConfig {
	std::size_t centroid_count = 50;
	std::size_t feature_count = 12;
	std::size_t label_count = 33;
	double drift_speed = 0.0;
	std::uint64_t seed = 1;
};

struct RbfCentroid {
	std::vector<double> center;
	std::vector<double> direction; // unit drift direction
	double radius = 0.0;
	Label label = 0;
};

/**
 * Random radial-basis-function stream.
 *
 * Centroids get uniform centers in [0,1]^F, radii uniform in [0, 0.1] and
 * round-robin labels. Each point picks a centroid uniformly and is displaced
 * from its center along a random unit direction by |N(0,1)| * radius. With a
 * positive drift speed every center moves along its own direction after each
 * emitted point, bouncing off the faces of the unit cube.
 */
class RbfGenerator {
  public:
	explicit RbfGenerator(const RbfGeneratorConfig &config);

	DataPoint next();
	const std::vector<RbfCentroid> &centroids() const noexcept { return centroids_; }
	StreamSpec spec(std::size_t length) const { return {config_.feature_count, config_.label_count, length}; }

  private:
	void random_direction(std::vector<double> &out);
	void drift();

	RbfGeneratorConfig config_;
	std::mt19937_64 rng_;
	std::vector<RbfCentroid> centroids_;
};

std::vector<DataPoint> rbf_generate(const RbfGeneratorConfig &config, std::size_t n);

// Labels of points at index >= n/2 become (label + shift) mod label_count.
// Requires 1 <= shift < label_count.
std::vector<DataPoint> inject_label_drift(std::vector<DataPoint> points, std::size_t label_count,
										  std::size_t shift);

// Seeded Fisher-Yates permutation.
std::vector<DataPoint> shuffle(std::vector<DataPoint> points, std::uint64_t seed);

} // namespace mbf

#endif
