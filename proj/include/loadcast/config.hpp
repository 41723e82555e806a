#pragma once

#include <cstdint>
#include <string>

#include "loadcast/bench.hpp"

namespace loadcast {

// Everything the CLI needs, with defaults that reproduce the full protocol
// on synthetic data. An empty config file (or none at all) is valid.
struct AppConfig {
    std::string data_csv;              // empty -> synthesize instead
    std::size_t synthetic_days = 183;
    std::uint64_t synthetic_seed = 1;  // generation seed, separate from bench.seed
    std::string out_dir = "bench_out";
    BenchConfig bench;
};

// Key map (all optional; unknown keys are errors):
//   data                  string   CSV path; wins over synthetic_* when set
//   synthetic_days        int >= 1
//   synthetic_seed        integer
//   seed                  integer  master seed for window draws and training
//   runs                  int >= 1 windows per term
//   horizon               int >= 1 steps ahead
//   out                   string   output directory
//   models                ["svr"|"sbc"|"brnn", ...]
//   terms                 ["vstelf"|"stelf"|"mtelf", ...]
//   svr                   { c, epsilon, tol, max_iter, cache_mb }
//   kernel                { type: "linear"|"rbf"|"anova_rbf", sigma, degree }
//   sbc                   { radius, squash, accept_ratio, reject_ratio }
//   fcm                   { m, tol, max_iter }
//   nn                    { hidden, lookback, epochs, batch, learning_rate, patience }
//   vstelf/stelf/mtelf    { sampling_minutes, train_len, verification_len, test_len }
//
// Throws UnknownKey (dotted path, e.g. "svr.epsilonn"), TypeMismatch, or
// ToolkitError for values the validators reject.
AppConfig parse_config_text(const std::string& text);

// Reads the file and delegates to parse_config_text. Throws FileNotFound.
AppConfig parse_config(const std::string& path);

} // namespace loadcast
