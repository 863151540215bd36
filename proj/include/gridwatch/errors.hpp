#pragma once

#include <stdexcept>
#include <string>

namespace gridwatch {

/// Base class for all gridwatch failures. `category()` groups errors for
/// process exit codes: input (2), config (3), numeric (4).
class Error : public std::runtime_error {
 public:
  enum class Category { input, config, numeric };

  Error(Category cat, const std::string& msg) : std::runtime_error(msg), cat_(cat) {}
  Category category() const noexcept { return cat_; }

 private:
  Category cat_;
};

struct ZeroVarianceRow : Error {
  explicit ZeroVarianceRow(int row)
      : Error(Category::numeric, "constant row " + std::to_string(row) +
                                     ": standardization undefined, inject noise first"),
        row_index(row) {}
  int row_index;
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error(Category::config, "shape mismatch: " + msg) {}
};

struct InvalidRatio : Error {
  explicit InvalidRatio(double c)
      : Error(Category::config, "dimension ratio c=" + std::to_string(c) + " outside (0, 1]") {}
};

struct ConvergenceFailure : Error {
  explicit ConvergenceFailure(const std::string& what) : Error(Category::numeric, "eigensolver failed: " + what) {}
};

struct EmptySpectrum : Error {
  EmptySpectrum() : Error(Category::numeric, "empty eigenvalue spectrum") {}
};

struct DegenerateSeries : Error {
  DegenerateSeries() : Error(Category::numeric, "constant series cannot be min-max normalized") {}
};

struct DegenerateEigenvalue : Error {
  explicit DegenerateEigenvalue(int k)
      : Error(Category::numeric, "eigenvalue " + std::to_string(k) + " is not simple (gap below tolerance)") {}
};

struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& msg) : Error(Category::config, "index out of range: " + msg) {}
};

struct InsufficientHistory : Error {
  InsufficientHistory(long tick, int t)
      : Error(Category::input, "tick " + std::to_string(tick) + " has no full window of width " + std::to_string(t)) {}
};

struct MalformedRow : Error {
  MalformedRow(long line, const std::string& why)
      : Error(Category::input, "malformed CSV row at line " + std::to_string(line) + ": " + why),
        line_number(line),
        reason(why) {}
  long line_number;
  std::string reason;
};

struct MissingTick : Error {
  MissingTick(const std::string& device, long long ts)
      : Error(Category::input, "device " + device + " missing sample at timestamp " + std::to_string(ts)) {}
};

struct NonMonotonicTimestamps : Error {
  explicit NonMonotonicTimestamps(const std::string& why)
      : Error(Category::input, "non-monotonic timestamps: " + why) {}
};

struct InvalidSpec : Error {
  explicit InvalidSpec(const std::string& why) : Error(Category::config, "invalid scenario spec: " + why) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& why) : Error(Category::config, "config error: " + why) {}
};

struct IoError : Error {
  explicit IoError(const std::string& why) : Error(Category::input, "io error: " + why) {}
};

}  // namespace gridwatch
