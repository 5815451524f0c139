#ifndef MBF_ERROR_HPP
#define MBF_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbf {

// Invalid user-facing configuration (memory too small, bad flag combination).
class ConfigError : public std::invalid_argument {
  public:
	using std::invalid_argument::invalid_argument;
};

// Malformed input data. `row()` is 1-based, 0 when not row-specific.
class ParseError : public std::runtime_error {
  public:
	ParseError(const std::string &msg, std::size_t row = 0)
		: std::runtime_error(row ? "row " + std::to_string(row) + ": " + msg : msg), row_(row) {}
	std::size_t row() const noexcept { return row_; }

  private:
	std::size_t row_;
};

// Broken internal invariant (double free, foreign node, trimming a root).
// The run cannot continue.
class InvariantViolation : public std::logic_error {
  public:
	using std::logic_error::logic_error;
};

} // namespace mbf

#endif
