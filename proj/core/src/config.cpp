#include "dynamo/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dynamo {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Throws std::invalid_argument with a short description; the caller adds
// the location.
double to_double(std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(out)) {
    throw std::invalid_argument(fmt::format("'{}' is not a finite number", v));
  }
  return out;
}

std::size_t to_size(std::string_view v) {
  std::size_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument(fmt::format("'{}' is not a non-negative integer", v));
  }
  return out;
}

template <class E>
E to_enum(std::string_view v, std::initializer_list<std::pair<const char*, E>> table) {
  std::string names;
  for (const auto& [name, value] : table) {
    if (v == name) return value;
    names += names.empty() ? name : fmt::format(", {}", name);
  }
  throw std::invalid_argument(fmt::format("'{}' is not one of: {}", v, names));
}

using Setter = std::function<void(std::string_view)>;
using Section = std::map<std::string, Setter, std::less<>>;

Setter real(double& dst) { return [&dst](std::string_view v) { dst = to_double(v); }; }
Setter count(std::size_t& dst) { return [&dst](std::string_view v) { dst = to_size(v); }; }

std::map<std::string, Section, std::less<>> sections(RunConfig& c) {
  auto& e = c.evolve;
  auto& cv = c.curvature;
  auto& f = c.fluxrope;
  std::map<std::string, Section, std::less<>> out;
  out["evolve"] = Section{
      {"lambda", [&e](std::string_view v) {
         e.lambda = v == "catmap" ? -1.0 : to_double(v);
       }},
      {"flow_speed", real(e.flow_speed)},
      {"resistivity", real(e.resistivity)},
      {"omega", [&e](std::string_view v) {
         e.omega = to_enum<OmegaKind>(v, {{"identity", OmegaKind::identity},
                                         {"constant", OmegaKind::constant},
                                         {"exponential", OmegaKind::exponential}});
       }},
      {"omega_param", real(e.omega_param)},
      {"n_p", count(e.grid.n_p)},
      {"n_q", count(e.grid.n_q)},
      {"n_z", count(e.grid.n_z)},
      {"z_min", real(e.grid.z_min)},
      {"z_max", real(e.grid.z_max)},
      {"t_end", real(e.t_end)},
      {"dt", real(e.dt)},
      {"courant", real(e.courant)},
      {"sample_every", count(e.sample_every)},
      {"window_lo", real(e.window_lo)},
      {"window_hi", real(e.window_hi)},
      {"fit_start", real(e.fit_start)},
      {"fit_end", real(e.fit_end)},
      {"component", [&e](std::string_view v) {
         e.component = to_enum<Axis>(v, {{"p", Axis::p}, {"q", Axis::q}, {"z", Axis::z}});
       }},
      {"drift", [&e](std::string_view v) {
         e.drift = to_enum<ConformalDrift>(
             v, {{"geometric", ConformalDrift::geometric}, {"reversed", ConformalDrift::reversed}});
       }},
      {"initial", [&e](std::string_view v) {
         e.initial = to_enum<InitialKind>(v, {{"q_slot", InitialKind::q_slot},
                                             {"p_slot", InitialKind::p_slot},
                                             {"mixed", InitialKind::mixed},
                                             {"random", InitialKind::random}});
       }},
      {"wave_number", real(e.wave_number)},
      {"random_modes", count(e.random_modes)},
  };
  out["curvature"] = Section{
      {"metric", [&cv](std::string_view v) {
         cv.metric = to_enum<CurvatureMetric>(
             v, {{"flat", CurvatureMetric::flat},
                 {"arnold", CurvatureMetric::arnold},
                 {"constant_conformal", CurvatureMetric::constant_conformal},
                 {"exponential_conformal", CurvatureMetric::exponential_conformal},
                 {"stretched_coframe", CurvatureMetric::stretched_coframe},
                 {"line_element", CurvatureMetric::line_element}});
       }},
      {"lambda", real(cv.lambda)},
      {"omega_param", real(cv.omega_param)},
      {"alpha", real(cv.alpha)},
      {"z_min", real(cv.z_min)},
      {"z_max", real(cv.z_max)},
      {"samples", count(cv.samples)},
  };
  out["fluxrope"] = Section{
      {"kappa", real(f.kappa)}, {"tau", real(f.tau)},       {"s_max", real(f.s_max)},
      {"ds", real(f.ds)},       {"r", real(f.r)},           {"theta_r", real(f.theta_r)},
      {"omega", real(f.omega)}, {"gamma", real(f.gamma)},   {"v_theta0", real(f.v_theta0)},
      {"v_s", real(f.v_s)},     {"b0", real(f.b0)},         {"b1", real(f.b1)},
      {"b_zero", real(f.b_zero)}, {"t", real(f.t)},
  };
  out["catmap"] = Section{};
  out["verify"] = Section{{"criteria", [&c](std::string_view v) {
                             c.verify.criteria.clear();
                             while (!v.empty()) {
                               const auto comma = v.find(',');
                               const auto item = trim(v.substr(0, comma));
                               const auto n = to_size(item);
                               if (n < 1 || n > 8) {
                                 throw std::invalid_argument(
                                     fmt::format("criterion {} is outside 1-8", n));
                               }
                               c.verify.criteria.push_back(static_cast<int>(n));
                               v = comma == std::string_view::npos ? std::string_view{}
                                                                   : v.substr(comma + 1);
                             }
                           }}};
  return out;
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "evolve") return Command::evolve;
  if (name == "curvature") return Command::curvature;
  if (name == "fluxrope") return Command::fluxrope;
  if (name == "catmap") return Command::catmap;
  if (name == "verify-all") return Command::verify_all;
  throw ValidationError(fmt::format(
      "unknown command '{}' (expected evolve, curvature, fluxrope, catmap or verify-all)", name));
}

const char* command_name(Command c) {
  switch (c) {
    case Command::evolve: return "evolve";
    case Command::curvature: return "curvature";
    case Command::fluxrope: return "fluxrope";
    case Command::catmap: return "catmap";
    case Command::verify_all: return "verify-all";
  }
  return "unknown";
}

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : ValidationError(fmt::format("{}:{}: {}", source, line, message)), line_(line) {}

void parse_config(std::string_view text, const std::string& source, RunConfig& config) {
  auto table = sections(config);
  Section* current = nullptr;
  std::string current_name;
  std::set<std::string> seen_sections;
  std::set<std::string> seen_keys;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      const auto it = table.find(name);
      if (it == table.end()) {
        throw ConfigError(source, line_no, fmt::format("unknown section [{}]", name));
      }
      if (!seen_sections.insert(std::string(name)).second) {
        throw ConfigError(source, line_no, fmt::format("duplicate section [{}]", name));
      }
      current = &it->second;
      current_name = std::string(name);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source, line_no, "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (current == nullptr) {
      throw ConfigError(source, line_no, fmt::format("key '{}' appears before any section", key));
    }
    if (key.empty()) throw ConfigError(source, line_no, "empty key");
    if (value.empty()) throw ConfigError(source, line_no, fmt::format("key '{}' has no value", key));
    const auto setter = current->find(key);
    if (setter == current->end()) {
      throw ConfigError(source, line_no,
                        fmt::format("unknown key '{}' in section [{}]", key, current_name));
    }
    if (!seen_keys.insert(current_name + "." + std::string(key)).second) {
      throw ConfigError(source, line_no, fmt::format("duplicate key '{}'", key));
    }
    try {
      setter->second(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line_no, fmt::format("{}.{}: {}", current_name, key, e.what()));
    }
  }
}

void load_config(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  parse_config(buf.str(), path.string(), config);
}

}  // namespace dynamo
