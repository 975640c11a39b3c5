#pragma once

#include <stdexcept>
#include <string>

namespace streamoverlap {

// Bad input: malformed files, invalid parameters, inconsistent lexicons.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A document sequence that is not sorted by timestamp.
class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure inside one pipeline stage, tagged with the stage and stream.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string stream, const std::string& what)
      : std::runtime_error(stage + (stream.empty() ? "" : " [" + stream + "]") + ": " + what),
        stage_(std::move(stage)),
        stream_(std::move(stream)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& stream() const noexcept { return stream_; }

 private:
  std::string stage_;
  std::string stream_;
};

}  // namespace streamoverlap
