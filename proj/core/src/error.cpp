#include "lidarsim/error.hpp"

#include <sstream>

namespace lidarsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedFile: return "malformed-file";
    case ErrorCode::kMalformedRecord: return "malformed-record";
    case ErrorCode::kMissingField: return "missing-field";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kLineParse: return "line-parse";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kRowOverflow: return "row-overflow";
    case ErrorCode::kBounds: return "bounds";
    case ErrorCode::kInvalidDepth: return "invalid-depth";
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kEmptyProjection: return "empty-projection";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kEmptyCloud: return "empty-cloud";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kUnmappedClass: return "unmapped-class";
    case ErrorCode::kDegeneratePose: return "degenerate-pose";
    case ErrorCode::kInsufficientSamples: return "insufficient-samples";
    case ErrorCode::kNonPsd: return "non-psd";
    case ErrorCode::kEmptyValidSet: return "empty-valid-set";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kFrame: return "frame";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

MalformedRecordError::MalformedRecordError(std::size_t record_index, const std::string& what)
    : Error(ErrorCode::kMalformedRecord, "record " + std::to_string(record_index) + ": " + what),
      record_index_(record_index) {}

MissingFieldError::MissingFieldError(std::string key)
    : Error(ErrorCode::kMissingField, "missing key '" + key + "'"), key_(std::move(key)) {}

LineParseError::LineParseError(std::size_t line_number, const std::string& what)
    : Error(ErrorCode::kLineParse, "line " + std::to_string(line_number) + ": " + what),
      line_number_(line_number) {}

RowOverflowError::RowOverflowError(std::size_t rows_detected, std::size_t num_rows)
    : Error(ErrorCode::kRowOverflow, std::to_string(rows_detected) +
                                         " scan lines detected, sensor has " +
                                         std::to_string(num_rows)),
      rows_detected_(rows_detected) {}

namespace {
std::string format_values(const std::vector<std::int64_t>& values) {
  std::ostringstream os;
  os << "unmapped source values:";
  for (auto v : values) os << ' ' << v;
  return os.str();
}
}  // namespace

UnmappedClassError::UnmappedClassError(std::vector<std::int64_t> values)
    : Error(ErrorCode::kUnmappedClass, format_values(values)), values_(std::move(values)) {}

FrameError::FrameError(std::string frame_id, ErrorCode cause, const std::string& what)
    : Error(ErrorCode::kFrame, "frame " + frame_id + ": " + what),
      frame_id_(std::move(frame_id)),
      cause_(cause) {}

}  // namespace lidarsim
