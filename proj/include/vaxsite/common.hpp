#pragma once

// Shared vocabulary for the vaxsite core: the error type every module throws
// and a small dense row-major matrix.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vaxsite {

using Count = std::int64_t;

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kEmptyFile,
  kMalformedRow,
  kDuplicateDistrict,
  kUnknownDistrict,
  kNegativeCount,
  kCommutersExceedPopulation,
  kMissingPair,
  kNegativeTime,
  kNonZeroDiagonal,
  kPeriodOutOfRange,
  kNegativeDoses,
  kSiteNotOpen,
  kStateOutOfRange,
  kNonFiniteState,
  kDegenerateForce,
  kZeroPrevalence,
  kZeroFlow,
  kZeroCapacity,
  kInfeasibleByConstruction,
  kBadK,
  kNegativeWeight,
  kTooManySites,
  kInfeasiblePlan,
  kTooLarge,
  kInfeasible,
  kUnknownVariable,
  kNonIntegralValue,
  kLengthMismatch,
  kOptimizerDiverged,
  kInsufficientData,
  kConfigError,
  kInvariantBreach,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace vaxsite
