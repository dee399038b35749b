#include "tasep/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tasep::io {

namespace {

using nlohmann::json;

json parse_object(std::string_view text, const char* what) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  return j;
}

std::vector<double> number_array(const json& j, const char* key, const char* what, bool required) {
  if (!j.contains(key)) {
    if (required) throw ParseError(std::string(what) + ": missing field '" + key + "'");
    return {};
  }
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ParseError(std::string(what) + ": field '" + key + "' must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number()) {
      throw ParseError(std::string(what) + ": " + key + "[" + std::to_string(k) + "] is not a number");
    }
    out.push_back(arr[k].get<double>());
  }
  return out;
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string(what) + ": cannot parse '" + std::string(s) + "' as a number");
  }
  return v;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpeedFunction parse_speed(std::string_view json_text) {
  const auto j = parse_object(json_text, "speed");
  auto rates = number_array(j, "rates", "speed", true);
  auto bps = number_array(j, "breakpoints", "speed", false);
  try {
    return SpeedFunction(std::move(bps), std::move(rates));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

SpeedFunction load_speed(const std::filesystem::path& path) { return parse_speed(read_file(path)); }

std::string speed_to_json(const SpeedFunction& speed) {
  json j;
  j["rates"] = std::vector<double>(speed.rates().begin(), speed.rates().end());
  j["breakpoints"] = std::vector<double>(speed.breakpoints().begin(), speed.breakpoints().end());
  return j.dump();
}

InitialProfile parse_initial_profile(std::string_view json_text) {
  const auto j = parse_object(json_text, "rho0");
  auto dens = number_array(j, "densities", "rho0", true);
  auto bps = number_array(j, "breakpoints", "rho0", false);
  try {
    return InitialProfile(std::move(bps), std::move(dens));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

InitialProfile load_initial_profile(const std::string& path_or_const) {
  constexpr std::string_view prefix = "const:";
  if (path_or_const.starts_with(prefix)) {
    const double rho = parse_double(std::string_view(path_or_const).substr(prefix.size()), "rho0");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ParseError("rho0: constant density must lie in [0, 1]");
    return InitialProfile::constant(rho);
  }
  return parse_initial_profile(read_file(path_or_const));
}

std::size_t Grid::size() const {
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

Grid parse_grid(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw ParseError("grid: expected lo:hi:step, got '" + std::string(spec) + "'");
  Grid g{parse_double(spec.substr(0, c1), "grid"), parse_double(spec.substr(c1 + 1, c2 - c1 - 1), "grid"),
         parse_double(spec.substr(c2 + 1), "grid")};
  if (!(g.step > 0.0) || !(g.hi >= g.lo)) throw ParseError("grid: need hi >= lo and step > 0");
  return g;
}

}  // namespace tasep::io
