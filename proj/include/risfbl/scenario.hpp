#pragma once

/**
 * Scenario configuration: an INI-style text file (sections of key = value
 * lines) with defaults for the reference deployment, a canonical serializer
 * and a content hash.
 *
 *   [geometry]   ap_x ap_y ac_x ac_y ris_x ris_y                  (meters)
 *   [link]       tx_power_mw bandwidth_hz noise_density_dbm_hz noise_figure_db
 *                include_noise_figure direct_link
 *   [ris]        n_elements quant_bits amplitude include_unadjusted
 *   [fbl]        epsilon blocklength_r payload_bits_L
 *   [simulation] samples seed
 *   [sweep]      n_list d_grid d_sweep_elements
 *
 * quant_bits is "perfect" or a comma list of quantizer resolutions; the
 * perfect-phase mode is always simulated as well. '#' and ';' start comments.
 */

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "risfbl/channel.hpp"
#include "risfbl/error.hpp"
#include "risfbl/montecarlo.hpp"
#include "risfbl/rate.hpp"

namespace risfbl {

inline constexpr const char *tool_version = "risfbl 1.0.0";

struct ScenarioConfig {
  Geometry geometry{};
  double tx_power_mw = 200.0;
  double bandwidth_hz = 2e5;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 3.0;
  bool include_noise_figure = false;
  bool direct_link = false;

  std::int64_t n_elements = 1024;
  std::vector<int> quant_bits{1, 2, 3}; // empty = perfect phases only
  double amplitude = 1.0;
  bool include_unadjusted = false;

  double epsilon = 1e-9;
  std::int64_t blocklength_r = 100;
  std::int64_t payload_bits_L = 80;

  std::int64_t samples = 10000;
  std::uint64_t seed = 1;

  std::vector<std::int64_t> n_list{16, 64, 256, 1024, 4096};
  std::vector<double> d_grid{5, 10, 15, 20, 25, 30, 35, 40, 45, 50,
                             55, 60, 65, 70, 75, 80, 85, 90, 95};
  std::int64_t d_sweep_elements = 4096;

  LinkBudget budget() const {
    const double noise_w_per_hz = std::pow(10.0, (noise_density_dbm_hz - 30.0) / 10.0);
    return LinkBudget::make(tx_power_mw * 1e-3, noise_w_per_hz, bandwidth_hz,
                            include_noise_figure ? db_to_linear(noise_figure_db) : 1.0);
  }

  FblParams fbl() const { return {blocklength_r, payload_bits_L, epsilon}; }

  /// Perfect phases first, then each quantizer, then the unadjusted baseline.
  std::vector<PhaseMode> modes() const {
    std::vector<PhaseMode> m{PhaseMode::perfect()};
    for (int b : quant_bits)
      m.push_back(PhaseMode::quantized(b));
    if (include_unadjusted)
      m.push_back(PhaseMode::unadjusted());
    return m;
  }

  /// Geometry with the RIS moved to x = d.
  Geometry geometry_at(double d) const {
    Geometry g = geometry;
    g.ris.x = d;
    return g;
  }

  SimScenario scenario(std::int64_t n, bool direct, const Geometry &geom) const {
    SimScenario s;
    s.gains = link_gains(geom, direct ? DirectLink::present : DirectLink::blocked);
    s.rho = budget().rho;
    s.n_elements = static_cast<std::size_t>(n);
    s.amplitude = amplitude;
    s.fbl = fbl();
    return s;
  }
  SimScenario scenario() const { return scenario(n_elements, direct_link, geometry); }

  void validate() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    out.push_back(trim(item));
  return out;
}

template <class T> T parse_number(const std::string &text, int line, const std::string &field) {
  T value{};
  const char *first = text.data();
  const char *last = first + text.size();
  if (!text.empty() && *first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw ConfigError("line " + std::to_string(line) + ": field '" + field +
                          "': cannot parse '" + text + "' as a number",
                      line, field);
  return value;
}

inline bool parse_bool(const std::string &text, int line, const std::string &field) {
  if (text == "true" || text == "yes" || text == "1")
    return true;
  if (text == "false" || text == "no" || text == "0")
    return false;
  throw ConfigError("line " + std::to_string(line) + ": field '" + field +
                        "': expected true or false, got '" + text + "'",
                    line, field);
}

/// Shortest text that parses back to the same double.
inline std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T> std::string join(const std::vector<T> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_shortest(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

} // namespace detail

inline void ScenarioConfig::validate() const {
  auto fail = [](const std::string &field, const std::string &why) {
    throw ConfigError("field '" + field + "': " + why, 0, field);
  };
  try {
    geometry.validate();
  } catch (const DomainError &e) {
    fail("geometry", e.what());
  }
  if (!(tx_power_mw > 0.0) || !std::isfinite(tx_power_mw))
    fail("link.tx_power_mw", "must be positive");
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
    fail("link.bandwidth_hz", "must be positive");
  if (!std::isfinite(noise_density_dbm_hz))
    fail("link.noise_density_dbm_hz", "must be finite");
  if (!(noise_figure_db >= 0.0) || !std::isfinite(noise_figure_db))
    fail("link.noise_figure_db", "must be >= 0 dB");
  if (n_elements < 1 || n_elements > (std::int64_t{1} << 31))
    fail("ris.n_elements", "must be in [1, 2^31]");
  for (int b : quant_bits)
    if (b < 1 || b > 30)
      fail("ris.quant_bits", "each entry must be in [1, 30]");
  if (quant_bits.size() + 2 > 16)
    fail("ris.quant_bits", "at most 14 quantizers");
  if (!(amplitude >= 0.0 && amplitude <= 1.0))
    fail("ris.amplitude", "must lie in [0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    fail("fbl.epsilon", "must lie in (0, 1)");
  if (blocklength_r < 100)
    fail("fbl.blocklength_r", "must be >= 100");
  if (payload_bits_L < 1)
    fail("fbl.payload_bits_L", "must be >= 1");
  if (samples < 1)
    fail("simulation.samples", "must be >= 1");
  if (n_list.empty())
    fail("sweep.n_list", "must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i)
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1]))
      fail("sweep.n_list", "must be positive and strictly ascending");
  if (d_grid.empty())
    fail("sweep.d_grid", "must not be empty");
  for (std::size_t i = 0; i < d_grid.size(); ++i)
    if (!(d_grid[i] >= 5.0 && d_grid[i] <= 95.0) || (i > 0 && d_grid[i] <= d_grid[i - 1]))
      fail("sweep.d_grid", "must lie in [5, 95] and be strictly ascending");
  if (d_sweep_elements < 1)
    fail("sweep.d_sweep_elements", "must be >= 1");
  try {
    for (double d : d_grid)
      geometry_at(d).validate();
  } catch (const DomainError &e) {
    fail("sweep.d_grid", e.what());
  }
}

/// Parses configuration text on top of the defaults. Every key is optional;
/// unknown sections or keys, duplicates and malformed values are errors that
/// carry the line number and the offending field.
inline ScenarioConfig parse_scenario(const std::string &text) {
  ScenarioConfig c;
  using Setter = std::function<void(const std::string &, int, const std::string &)>;
  auto num = [](auto &target) {
    return Setter([&target](const std::string &v, int line, const std::string &f) {
      target = detail::parse_number<std::remove_reference_t<decltype(target)>>(v, line, f);
    });
  };
  auto flag = [](bool &target) {
    return Setter([&target](const std::string &v, int line, const std::string &f) {
      target = detail::parse_bool(v, line, f);
    });
  };
  auto list = [](auto &target) {
    return Setter([&target](const std::string &v, int line, const std::string &f) {
      using T = typename std::remove_reference_t<decltype(target)>::value_type;
      target.clear();
      for (const auto &item : detail::split_list(v))
        target.push_back(detail::parse_number<T>(item, line, f));
    });
  };
  const std::map<std::string, Setter> setters{
      {"geometry.ap_x", num(c.geometry.ap.x)},
      {"geometry.ap_y", num(c.geometry.ap.y)},
      {"geometry.ac_x", num(c.geometry.ac.x)},
      {"geometry.ac_y", num(c.geometry.ac.y)},
      {"geometry.ris_x", num(c.geometry.ris.x)},
      {"geometry.ris_y", num(c.geometry.ris.y)},
      {"link.tx_power_mw", num(c.tx_power_mw)},
      {"link.bandwidth_hz", num(c.bandwidth_hz)},
      {"link.noise_density_dbm_hz", num(c.noise_density_dbm_hz)},
      {"link.noise_figure_db", num(c.noise_figure_db)},
      {"link.include_noise_figure", flag(c.include_noise_figure)},
      {"link.direct_link", flag(c.direct_link)},
      {"ris.n_elements", num(c.n_elements)},
      {"ris.quant_bits",
       Setter([&c](const std::string &v, int line, const std::string &f) {
         c.quant_bits.clear();
         if (v == "perfect")
           return;
         for (const auto &item : detail::split_list(v))
           c.quant_bits.push_back(detail::parse_number<int>(item, line, f));
       })},
      {"ris.amplitude", num(c.amplitude)},
      {"ris.include_unadjusted", flag(c.include_unadjusted)},
      {"fbl.epsilon", num(c.epsilon)},
      {"fbl.blocklength_r", num(c.blocklength_r)},
      {"fbl.payload_bits_L", num(c.payload_bits_L)},
      {"simulation.samples", num(c.samples)},
      {"simulation.seed", num(c.seed)},
      {"sweep.n_list", list(c.n_list)},
      {"sweep.d_grid", list(c.d_grid)},
      {"sweep.d_sweep_elements", num(c.d_sweep_elements)},
  };

  std::istringstream in(text);
  std::string raw, section;
  std::map<std::string, int> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos)
      line.erase(comment);
    line = detail::trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header",
                          line_no, line);
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      const bool known = std::any_of(setters.begin(), setters.end(), [&](const auto &kv) {
        return kv.first.compare(0, section.size() + 1, section + ".") == 0;
      });
      if (!known)
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]",
                          line_no, section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no,
                        line);
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    const std::string field = section.empty() ? key : section + "." + key;
    const auto it = setters.find(field);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown field '" + field + "'",
                        line_no, field);
    if (const auto prev = seen.find(field); prev != seen.end())
      throw ConfigError("line " + std::to_string(line_no) + ": field '" + field +
                            "' already set on line " + std::to_string(prev->second),
                        line_no, field);
    seen[field] = line_no;
    it->second(value, line_no, field);
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_scenario(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'", 0, "--config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Canonical text form; parse_scenario(serialize_scenario(c)) reproduces c.
inline std::string serialize_scenario(const ScenarioConfig &c) {
  using detail::format_shortest;
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "[geometry]\n"
    << "ap_x = " << format_shortest(c.geometry.ap.x) << "\n"
    << "ap_y = " << format_shortest(c.geometry.ap.y) << "\n"
    << "ac_x = " << format_shortest(c.geometry.ac.x) << "\n"
    << "ac_y = " << format_shortest(c.geometry.ac.y) << "\n"
    << "ris_x = " << format_shortest(c.geometry.ris.x) << "\n"
    << "ris_y = " << format_shortest(c.geometry.ris.y) << "\n\n"
    << "[link]\n"
    << "tx_power_mw = " << format_shortest(c.tx_power_mw) << "\n"
    << "bandwidth_hz = " << format_shortest(c.bandwidth_hz) << "\n"
    << "noise_density_dbm_hz = " << format_shortest(c.noise_density_dbm_hz) << "\n"
    << "noise_figure_db = " << format_shortest(c.noise_figure_db) << "\n"
    << "include_noise_figure = " << b(c.include_noise_figure) << "\n"
    << "direct_link = " << b(c.direct_link) << "\n\n"
    << "[ris]\n"
    << "n_elements = " << c.n_elements << "\n"
    << "quant_bits = " << (c.quant_bits.empty() ? "perfect" : detail::join(c.quant_bits)) << "\n"
    << "amplitude = " << format_shortest(c.amplitude) << "\n"
    << "include_unadjusted = " << b(c.include_unadjusted) << "\n\n"
    << "[fbl]\n"
    << "epsilon = " << format_shortest(c.epsilon) << "\n"
    << "blocklength_r = " << c.blocklength_r << "\n"
    << "payload_bits_L = " << c.payload_bits_L << "\n\n"
    << "[simulation]\n"
    << "samples = " << c.samples << "\n"
    << "seed = " << c.seed << "\n\n"
    << "[sweep]\n"
    << "n_list = " << detail::join(c.n_list) << "\n"
    << "d_grid = " << detail::join(c.d_grid) << "\n"
    << "d_sweep_elements = " << c.d_sweep_elements << "\n";
  return o.str();
}

inline std::uint64_t fnv1a_64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of everything that determines an output: the producing command and
/// the canonical scenario text (seed and sample count included).
inline std::string scenario_hash(const ScenarioConfig &c, std::string_view command) {
  const std::string text = std::string(command) + "\n" + serialize_scenario(c);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a_64(text)));
  return buf;
}

} // namespace risfbl
