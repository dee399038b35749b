#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tasep/speed.hpp"

namespace tasep::io {

/// Error raised for malformed input files; `what()` names the offending field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `{"rates": [r1, ..., rL], "breakpoints": [a1, ..., a(L-1)]}`.
/// `breakpoints` may be omitted for a constant speed.
SpeedFunction parse_speed(std::string_view json_text);
SpeedFunction load_speed(const std::filesystem::path& path);
std::string speed_to_json(const SpeedFunction& speed);

/// `{"densities": [...], "breakpoints": [...]}`, or the shorthand `const:<rho>`
/// accepted by load_initial_profile.
InitialProfile parse_initial_profile(std::string_view json_text);
InitialProfile load_initial_profile(const std::string& path_or_const);

std::string read_file(const std::filesystem::path& path);

/// Parses `lo:hi:step` into an evenly spaced grid including both ends
/// (up to rounding of the last point).
struct Grid {
  double lo;
  double hi;
  double step;
  std::size_t size() const;
  double at(std::size_t k) const { return lo + static_cast<double>(k) * step; }
};
Grid parse_grid(std::string_view spec);

}  // namespace tasep::io
