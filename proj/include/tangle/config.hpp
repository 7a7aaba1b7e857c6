#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tangle {

enum class Mode { simulate, fluid, sweep, decay };

const char* mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view s);

// Everything a run needs, assembled from a key-value config file plus
// command-line overrides. Zero/empty means "not set" for the fields with
// mode-dependent defaults (horizon, dt) or no default (lambda, a_h, u).
struct RunConfig {
  Mode mode = Mode::simulate;
  double lambda = 0.0;           // simulate; also the sweep fallback
  std::vector<double> lambdas;   // sweep
  double h = 1.0;
  double horizon = 0.0;          // key `T`; defaults to 10h
  double dt = 0.0;               // defaults to h/1000
  int replicas = 50;
  std::uint64_t base_seed = 1;   // key `base_seed`, flag `--seed`
  int max_tries = 64;
  double a_start = 0.0;          // key `a_h`
  std::vector<double> u;         // profile cell values
  std::string out = "out";
  bool force = false;            // flag only
  int workers = 1;
};

struct ParseResult {
  std::optional<RunConfig> config;     // set iff errors is empty
  std::vector<std::string> errors;     // every violation, naming its key
  std::vector<std::string> warnings;
};

// Syntax/type pass over `key = value` lines ('#' starts a comment). Unknown
// and duplicate keys are errors. No invariant checking; fields keep their
// "not set" sentinels so callers can apply overrides first. mode_seen, when
// given, reports whether the text itself set a mode.
RunConfig parse_config_raw(const std::string& text,
                           std::vector<std::string>& errors,
                           bool* mode_seen = nullptr);

// Applies defaults (T = 10h, dt = h/1000) and returns every invariant
// violation for the config's mode: lambda*h whole for the discrete modes,
// dt dividing h where the solver runs, profile values in [0,2], a_h > 0,
// horizon floors, positive replicas/max_tries/workers.
std::vector<std::string> finalize_config(RunConfig& cfg,
                                         std::vector<std::string>* warnings =
                                             nullptr);

// parse_config_raw + finalize in one step. `mode` must come from the text
// unless mode_override supplies it.
ParseResult parse_config(const std::string& text,
                         std::optional<Mode> mode_override = std::nullopt);

// Stable `key = value` echo of a finalized config, for the run manifest.
std::string canonical_config(const RunConfig& cfg);

}  // namespace tangle
