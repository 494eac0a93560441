#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lidarsim {

enum class ErrorCode {
  kIo,
  kMalformedFile,
  kMalformedRecord,
  kMissingField,
  kArity,
  kLineParse,
  kUnsupportedFormat,
  kRowOverflow,
  kBounds,
  kInvalidDepth,
  kBehindCamera,
  kEmptyProjection,
  kShape,
  kEmptyCloud,
  kConfig,
  kUnmappedClass,
  kDegeneratePose,
  kInsufficientSamples,
  kNonPsd,
  kEmptyValidSet,
  kValidation,
  kFrame,
};

std::string_view to_string(ErrorCode code);

/// Base of every exception thrown by the library. The code is stable and
/// is what callers (and the CLI exit-code mapping) should branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class MalformedRecordError : public Error {
 public:
  MalformedRecordError(std::size_t record_index, const std::string& what);
  std::size_t record_index() const noexcept { return record_index_; }

 private:
  std::size_t record_index_;
};

class MissingFieldError : public Error {
 public:
  explicit MissingFieldError(std::string key);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class LineParseError : public Error {
 public:
  LineParseError(std::size_t line_number, const std::string& what);
  /// 1-based.
  std::size_t line_number() const noexcept { return line_number_; }

 private:
  std::size_t line_number_;
};

class RowOverflowError : public Error {
 public:
  RowOverflowError(std::size_t rows_detected, std::size_t num_rows);
  std::size_t rows_detected() const noexcept { return rows_detected_; }

 private:
  std::size_t rows_detected_;
};

class UnmappedClassError : public Error {
 public:
  explicit UnmappedClassError(std::vector<std::int64_t> values);
  /// Sorted, unique source values that had no mapping entry.
  const std::vector<std::int64_t>& values() const noexcept { return values_; }

 private:
  std::vector<std::int64_t> values_;
};

/// Wraps a component failure with the id of the frame being processed.
class FrameError : public Error {
 public:
  FrameError(std::string frame_id, ErrorCode cause, const std::string& what);
  const std::string& frame_id() const noexcept { return frame_id_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string frame_id_;
  ErrorCode cause_;
};

}  // namespace lidarsim
