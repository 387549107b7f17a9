#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpart {

enum class ErrorKind {
  validation,
  insufficient_split,
  coverage_failure,
  merge_conflict,
  no_signal,
  degenerate_gap,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that the experiment
/// runner can tag a failed trial without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hpart
