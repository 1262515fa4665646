// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "fastlk/frontend.hpp"

namespace fastlk {

// Flat key = value configuration. Recognized keys:
//   epsilon, N, score_kind (sad_b|sad_a|mt),
//   l, w, h, n (grid levels, cell width units, cell height units, radius),
//   target_count, redetect_ratio,
//   param_mode (translation|translation_offset|translation_gain|full),
//   max_iterations, convergence_epsilon, threads.
// Blank lines and lines starting with '#' are ignored. Unknown keys or
// malformed values raise ConfigError.

/// Applies a single key = value entry to the configuration.
void apply_config_entry(FrontendConfig* cfg, const std::string& key,
                        const std::string& value);

/// Parses a configuration file on top of the given defaults.
void load_config_file(FrontendConfig* cfg, const std::string& path);

ScoreKind parse_score_kind(const std::string& text);
ParamMode parse_param_mode(const std::string& text);
const char* to_string(ScoreKind kind);

}  // namespace fastlk
