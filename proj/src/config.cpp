#include "tangle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "tangle/csv.hpp"

namespace tangle {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::string normalized = value;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<std::string> items;
  std::string item;
  while (in >> item) items.push_back(item);
  return items;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& s, long long& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

// Does lambda*h come out a whole number of steps >= 1?
bool whole_product(double lambda, double h) {
  const double product = lambda * h;
  const double rounded = std::llround(product);
  return rounded >= 1.0 &&
         std::fabs(product - rounded) <= 1e-9 * std::max(1.0, product);
}

bool divides(double h, double dt) {
  if (!(dt > 0.0)) return false;
  const double ratio = h / dt;
  const double rounded = std::llround(ratio);
  return rounded >= 1.0 &&
         std::fabs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio);
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::fluid: return "fluid";
    case Mode::sweep: return "sweep";
    case Mode::decay: return "decay";
  }
  return "?";
}

std::optional<Mode> mode_from_name(std::string_view s) {
  if (s == "simulate") return Mode::simulate;
  if (s == "fluid") return Mode::fluid;
  if (s == "sweep") return Mode::sweep;
  if (s == "decay") return Mode::decay;
  return std::nullopt;
}

RunConfig parse_config_raw(const std::string& text,
                           std::vector<std::string>& errors,
                           bool* mode_seen) {
  RunConfig cfg;
  if (mode_seen) *mode_seen = false;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) +
                       ": expected `key = value`");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back("line " + std::to_string(line_no) +
                       ": expected `key = value`");
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back(key + ": duplicate key");
      continue;
    }

    auto bad = [&](const std::string& why) { errors.push_back(key + ": " + why); };
    if (key == "mode") {
      const auto mode = mode_from_name(value);
      if (!mode) {
        bad("must be one of simulate|fluid|sweep|decay");
      } else {
        cfg.mode = *mode;
        if (mode_seen) *mode_seen = true;
      }
    } else if (key == "lambda") {
      if (!parse_double(value, cfg.lambda)) bad("not a number");
    } else if (key == "lambdas") {
      for (const std::string& item : split_list(value)) {
        double v = 0.0;
        if (!parse_double(item, v)) {
          bad("entry `" + item + "` is not a number");
        } else {
          cfg.lambdas.push_back(v);
        }
      }
    } else if (key == "h") {
      if (!parse_double(value, cfg.h)) bad("not a number");
    } else if (key == "T") {
      if (!parse_double(value, cfg.horizon)) bad("not a number");
    } else if (key == "dt") {
      if (!parse_double(value, cfg.dt)) bad("not a number");
    } else if (key == "replicas") {
      long long v = 0;
      if (!parse_int(value, v)) {
        bad("not an integer");
      } else {
        cfg.replicas = static_cast<int>(v);
      }
    } else if (key == "base_seed") {
      if (!parse_u64(value, cfg.base_seed)) bad("not an unsigned integer");
    } else if (key == "max_tries") {
      long long v = 0;
      if (!parse_int(value, v)) {
        bad("not an integer");
      } else {
        cfg.max_tries = static_cast<int>(v);
      }
    } else if (key == "a_h") {
      if (!parse_double(value, cfg.a_start)) bad("not a number");
    } else if (key == "u") {
      const auto items = split_list(value);
      for (std::size_t i = 0; i < items.size(); ++i) {
        double v = 0.0;
        if (!parse_double(items[i], v)) {
          errors.push_back("u[" + std::to_string(i) + "]: `" + items[i] +
                           "` is not a number");
        } else {
          cfg.u.push_back(v);
        }
      }
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "workers") {
      long long v = 0;
      if (!parse_int(value, v)) {
        bad("not an integer");
      } else {
        cfg.workers = static_cast<int>(v);
      }
    } else {
      bad("unknown key");
    }
  }
  return cfg;
}

std::vector<std::string> finalize_config(RunConfig& cfg,
                                         std::vector<std::string>* warnings) {
  std::vector<std::string> errors;

  if (!(cfg.h > 0.0)) errors.push_back("h: must be positive");
  if (cfg.horizon == 0.0 && cfg.h > 0.0) cfg.horizon = 10.0 * cfg.h;
  if (cfg.dt == 0.0 && cfg.h > 0.0) cfg.dt = cfg.h / 1000.0;

  if (!(cfg.a_start > 0.0)) errors.push_back("a_h: required and must be positive");
  if (cfg.u.empty()) {
    errors.push_back("u: required (profile values on [0, h])");
  } else {
    for (std::size_t i = 0; i < cfg.u.size(); ++i) {
      if (!(cfg.u[i] >= 0.0 && cfg.u[i] <= 2.0)) {
        errors.push_back("u[" + std::to_string(i) + "]: value " +
                         format_double(cfg.u[i]) + " outside [0, 2]");
      }
    }
  }

  const bool needs_discrete =
      cfg.mode == Mode::simulate || cfg.mode == Mode::sweep;
  const bool needs_solver = cfg.mode != Mode::simulate;

  if (cfg.mode == Mode::simulate) {
    if (!(cfg.lambda > 0.0)) {
      errors.push_back("lambda: required and must be positive");
    } else if (cfg.h > 0.0 && !whole_product(cfg.lambda, cfg.h)) {
      errors.push_back("lambda: lambda*h is not a whole number of steps");
    }
  }
  if (cfg.mode == Mode::sweep) {
    if (cfg.lambdas.empty() && cfg.lambda > 0.0) {
      cfg.lambdas.push_back(cfg.lambda);
    }
    if (cfg.lambdas.empty()) {
      errors.push_back("lambdas: required for sweep mode");
    } else {
      std::set<double> unique;
      for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        const double lambda = cfg.lambdas[i];
        if (!(lambda > 0.0)) {
          errors.push_back("lambdas[" + std::to_string(i) +
                           "]: must be positive");
        } else if (cfg.h > 0.0 && !whole_product(lambda, cfg.h)) {
          errors.push_back("lambdas[" + std::to_string(i) +
                           "]: lambda*h is not a whole number of steps");
        }
        if (!unique.insert(lambda).second) {
          errors.push_back("lambdas[" + std::to_string(i) +
                           "]: duplicate value");
        }
      }
    }
  }
  if (needs_solver && cfg.h > 0.0 && !divides(cfg.h, cfg.dt)) {
    errors.push_back("dt: must divide h exactly");
  }
  if (cfg.h > 0.0) {
    const double floor = cfg.mode == Mode::decay ? 5.0 : 2.0;
    if (cfg.mode == Mode::simulate) {
      if (!(cfg.horizon > cfg.h)) errors.push_back("T: must exceed h");
    } else if (!(cfg.horizon >= floor * cfg.h - 1e-12)) {
      errors.push_back("T: must be at least " +
                       std::string(cfg.mode == Mode::decay ? "5h" : "2h"));
    }
  }
  if (needs_discrete && cfg.mode == Mode::sweep && cfg.replicas < 1) {
    errors.push_back("replicas: must be >= 1");
  }
  if (cfg.max_tries < 1) errors.push_back("max_tries: must be >= 1");
  if (cfg.workers < 1) errors.push_back("workers: must be >= 1");
  if (cfg.out.empty()) errors.push_back("out: must not be empty");

  if (warnings && cfg.a_start > 0.0 && cfg.h > 0.0 &&
      cfg.a_start < cfg.h / 100.0) {
    warnings->push_back(
        "a_h: far below h; deviation constants degrade near a(h) = 0");
  }
  return errors;
}

ParseResult parse_config(const std::string& text,
                         std::optional<Mode> mode_override) {
  ParseResult result;
  bool mode_seen = false;
  RunConfig cfg = parse_config_raw(text, result.errors, &mode_seen);
  if (mode_override) {
    cfg.mode = *mode_override;
  } else if (!mode_seen) {
    result.errors.insert(result.errors.begin(), "mode: missing");
  }
  auto more = finalize_config(cfg, &result.warnings);
  result.errors.insert(result.errors.end(), more.begin(), more.end());
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "mode = " << mode_name(cfg.mode) << '\n';
  if (cfg.mode == Mode::simulate) {
    out << "lambda = " << format_double(cfg.lambda) << '\n';
  }
  if (cfg.mode == Mode::sweep) {
    out << "lambdas =";
    for (double lambda : cfg.lambdas) out << ' ' << format_double(lambda);
    out << '\n';
  }
  out << "h = " << format_double(cfg.h) << '\n'
      << "T = " << format_double(cfg.horizon) << '\n'
      << "dt = " << format_double(cfg.dt) << '\n'
      << "replicas = " << cfg.replicas << '\n'
      << "base_seed = " << cfg.base_seed << '\n'
      << "max_tries = " << cfg.max_tries << '\n'
      << "a_h = " << format_double(cfg.a_start) << '\n'
      << "u =";
  for (double v : cfg.u) out << ' ' << format_double(v);
  out << '\n'
      << "workers = " << cfg.workers << '\n'
      << "out = " << cfg.out << '\n';
  return out.str();
}

}  // namespace tangle
