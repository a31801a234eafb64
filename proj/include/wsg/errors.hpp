#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wsg {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation point outside the chart of the background (conformal factor
/// nonpositive or non-finite).
struct ChartDomainError : Error {
  using Error::Error;
};

/// Malformed or invalid embedding document.
struct ValidationError : Error {
  using Error::Error;
};

/// Induced metric degenerate (or wrong signature) at the listed nodes.
struct DegenerateWorldsheetError : Error {
  std::vector<std::pair<int, int>> nodes;
  DegenerateWorldsheetError(const std::string& what, std::vector<std::pair<int, int>> bad)
      : Error(what), nodes(std::move(bad)) {}
};

struct CausalityError : Error {
  std::vector<std::pair<int, int>> nodes;
  CausalityError(const std::string& what, std::vector<std::pair<int, int>> bad)
      : Error(what), nodes(std::move(bad)) {}
};

/// An end worldline whose tangent norm is below the null threshold. This is
/// the expected classification for a standard tension-only string end, so it
/// carries the flagged nodes for reporting rather than signalling corruption.
struct NullEndError : Error {
  std::vector<int> nodes;  // indices along the end
  NullEndError(const std::string& what, std::vector<int> bad) : Error(what), nodes(std::move(bad)) {}
};

struct FrameSeedError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

/// Coupling set inconsistent with the boundary-value algebra
/// (e.g. alpha <= 0 with beta != 0, or mu <= 0).
struct ConsistencyError : Error {
  using Error::Error;
};

}  // namespace wsg
