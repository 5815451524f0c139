#include "mbf/stream.hpp"

#include "mbf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

namespace mbf {

namespace {

std::string_view trim(std::string_view s)
{
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
		s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
		s.remove_suffix(1);
	return s;
}

std::vector<std::string_view> split_row(std::string_view line)
{
	std::vector<std::string_view> cells;
	std::size_t start = 0;
	for (;;) {
		const std::size_t comma = line.find(',', start);
		cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
		if (comma == std::string_view::npos)
			break;
		start = comma + 1;
	}
	return cells;
}

template <typename T>
bool parse_number(std::string_view cell, T &out)
{
	if (cell.empty())
		return false;
	if (cell.front() == '+')
		cell.remove_prefix(1);
	const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
	return ec == std::errc() && ptr == cell.data() + cell.size();
}

} // namespace

Dataset csv_load(const std::filesystem::path &path, const CsvOptions &options)
{
	std::ifstream in(path);
	if (!in)
		throw ParseError("cannot open " + path.string());

	Dataset data;
	std::size_t columns = 0;
	std::size_t label_col = 0;
	std::size_t row = 0;
	bool header_pending = options.has_header;
	Label max_label = 0;
	std::string line;
	while (std::getline(in, line)) {
		if (trim(line).empty())
			continue;
		if (header_pending) {
			header_pending = false;
			continue;
		}
		++row;
		const auto cells = split_row(line);
		if (columns == 0) {
			columns = cells.size();
			if (columns < 2)
				throw ParseError("need at least one feature column and a label column", row);
			const long idx = options.label_column < 0 ? static_cast<long>(columns) + options.label_column
													  : options.label_column;
			if (idx < 0 || idx >= static_cast<long>(columns))
				throw ParseError("label column " + std::to_string(options.label_column) + " out of range", row);
			label_col = static_cast<std::size_t>(idx);
		} else if (cells.size() != columns) {
			throw ParseError("expected " + std::to_string(columns) + " columns, found " +
								 std::to_string(cells.size()),
							 row);
		}

		DataPoint p;
		p.features.reserve(columns - 1);
		for (std::size_t c = 0; c < columns; ++c) {
			if (c == label_col) {
				long long label = 0;
				if (!parse_number(cells[c], label) || label < 0 || label > 0xFFFFFFFELL)
					throw ParseError("label '" + std::string(cells[c]) + "' is not a non-negative integer", row);
				p.label = static_cast<Label>(label);
				continue;
			}
			double v = 0.0;
			if (!parse_number(cells[c], v) || !std::isfinite(v))
				throw ParseError("feature '" + std::string(cells[c]) + "' in column " + std::to_string(c + 1) +
									 " is not a number",
								 row);
			p.features.push_back(v);
		}
		max_label = std::max(max_label, p.label);
		data.points.push_back(std::move(p));
	}
	if (data.points.empty())
		throw ParseError("no data rows in " + path.string());

	data.spec.feature_count = columns - 1;
	data.spec.label_count = std::max<std::size_t>(std::size_t{max_label} + 1, 2);
	data.spec.length = data.points.size();
	return data;
}

std::vector<DataPoint> window_features(std::span<const DataPoint> samples, std::size_t window_size)
{
	if (window_size == 0)
		throw ConfigError("window size must be positive");
	std::vector<DataPoint> out;
	if (samples.empty())
		return out;
	const std::size_t axes = samples.front().features.size();
	const std::size_t windows = samples.size() / window_size;
	out.reserve(windows);
	std::vector<double> sum(axes), sq(axes);
	for (std::size_t w = 0; w < windows; ++w) {
		const auto window = samples.subspan(w * window_size, window_size);
		std::ranges::fill(sum, 0.0);
		std::map<Label, std::size_t> votes;
		for (const auto &s : window) {
			if (s.features.size() != axes)
				throw ParseError("raw sample has " + std::to_string(s.features.size()) + " axes, expected " +
								 std::to_string(axes));
			for (std::size_t a = 0; a < axes; ++a)
				sum[a] += s.features[a];
			++votes[s.label];
		}
		DataPoint p;
		p.features.resize(2 * axes);
		const double n = static_cast<double>(window_size);
		for (std::size_t a = 0; a < axes; ++a)
			p.features[a] = sum[a] / n;
		std::ranges::fill(sq, 0.0);
		for (const auto &s : window)
			for (std::size_t a = 0; a < axes; ++a) {
				const double d = s.features[a] - p.features[a];
				sq[a] += d * d;
			}
		for (std::size_t a = 0; a < axes; ++a)
			p.features[axes + a] = std::sqrt(sq[a] / n);
		// std::map iterates labels in ascending order, so strict > keeps the lowest on ties
		std::size_t best = 0;
		for (const auto &[label, count] : votes)
			if (count > best) {
				best = count;
				p.label = label;
			}
		out.push_back(std::move(p));
	}
	return out;
}

RbfGenerator::RbfGenerator(const RbfGeneratorConfig &config) : config_(config), rng_(config.seed)
{
	if (config.centroid_count < 1 || config.feature_count < 1 || config.label_count < 2)
		throw ConfigError("RBF generator needs >= 1 centroid, >= 1 feature and >= 2 labels");
	if (!(config.drift_speed >= 0.0) || !std::isfinite(config.drift_speed))
		throw ConfigError("drift speed must be a finite non-negative value");

	std::uniform_real_distribution<double> unit(0.0, 1.0);
	std::uniform_real_distribution<double> radius(0.0, 0.1);
	centroids_.resize(config.centroid_count);
	for (std::size_t c = 0; c < centroids_.size(); ++c) {
		auto &ct = centroids_[c];
		ct.center.resize(config.feature_count);
		for (double &v : ct.center)
			v = unit(rng_);
		ct.radius = radius(rng_);
		ct.label = static_cast<Label>(c % config.label_count);
		random_direction(ct.direction);
	}
}

void RbfGenerator::random_direction(std::vector<double> &out)
{
	std::normal_distribution<double> gauss(0.0, 1.0);
	out.resize(config_.feature_count);
	double norm = 0.0;
	do {
		norm = 0.0;
		for (double &v : out) {
			v = gauss(rng_);
			norm += v * v;
		}
	} while (norm == 0.0);
	norm = std::sqrt(norm);
	for (double &v : out)
		v /= norm;
}

DataPoint RbfGenerator::next()
{
	std::uniform_int_distribution<std::size_t> pick(0, centroids_.size() - 1);
	std::normal_distribution<double> gauss(0.0, 1.0);
	const auto &ct = centroids_[pick(rng_)];

	DataPoint p;
	random_direction(p.features);
	const double magnitude = std::abs(gauss(rng_)) * ct.radius;
	for (std::size_t d = 0; d < p.features.size(); ++d)
		p.features[d] = ct.center[d] + p.features[d] * magnitude;
	p.label = ct.label;

	if (config_.drift_speed > 0.0)
		drift();
	return p;
}

void RbfGenerator::drift()
{
	for (auto &ct : centroids_)
		for (std::size_t d = 0; d < ct.center.size(); ++d) {
			double &x = ct.center[d];
			x += config_.drift_speed * ct.direction[d];
			if (x < 0.0) {
				x = -x;
				ct.direction[d] = -ct.direction[d];
			} else if (x > 1.0) {
				x = 2.0 - x;
				ct.direction[d] = -ct.direction[d];
			}
		}
}

std::vector<DataPoint> rbf_generate(const RbfGeneratorConfig &config, std::size_t n)
{
	RbfGenerator gen(config);
	std::vector<DataPoint> out;
	out.reserve(n);
	for (std::size_t i = 0; i < n; ++i)
		out.push_back(gen.next());
	return out;
}

std::vector<DataPoint> inject_label_drift(std::vector<DataPoint> points, std::size_t label_count, std::size_t shift)
{
	if (shift < 1 || shift >= label_count)
		throw ConfigError("label shift must lie in [1, label_count)");
	for (std::size_t i = points.size() / 2; i < points.size(); ++i)
		points[i].label = static_cast<Label>((points[i].label + shift) % label_count);
	return points;
}

std::vector<DataPoint> shuffle(std::vector<DataPoint> points, std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	for (std::size_t i = points.size(); i > 1; --i) {
		std::uniform_int_distribution<std::size_t> pick(0, i - 1);
		std::swap(points[i - 1], points[pick(rng)]);
	}
	return points;
}

} // namespace mbf
