// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/config.hpp"

#include <fstream>

#include "fastlk/error.hpp"

namespace fastlk {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': '" + value + "'");
  }
}

}  // namespace

ScoreKind parse_score_kind(const std::string& text) {
  if (text == "sad_b") return ScoreKind::kSadB;
  if (text == "sad_a") return ScoreKind::kSadA;
  if (text == "mt") return ScoreKind::kMt;
  throw ConfigError("unknown score_kind '" + text +
                    "' (expected sad_b, sad_a, or mt)");
}

const char* to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kSadB: return "sad_b";
    case ScoreKind::kSadA: return "sad_a";
    case ScoreKind::kMt: return "mt";
  }
  return "unknown";
}

ParamMode parse_param_mode(const std::string& text) {
  if (text == "translation") return ParamMode::kTranslation;
  if (text == "translation_offset") return ParamMode::kTranslationOffset;
  if (text == "translation_gain") return ParamMode::kTranslationGain;
  if (text == "full") return ParamMode::kFull;
  throw ConfigError("unknown param_mode '" + text + "'");
}

void apply_config_entry(FrontendConfig* cfg, const std::string& key,
                        const std::string& value) {
  if (key == "epsilon") {
    cfg->fast.epsilon = parse_int(key, value);
  } else if (key == "N") {
    cfg->fast.arc_length = parse_int(key, value);
  } else if (key == "score_kind") {
    cfg->fast.score = parse_score_kind(value);
  } else if (key == "l") {
    cfg->grid.num_levels = parse_int(key, value);
  } else if (key == "w") {
    cfg->grid.cell_width_units = parse_int(key, value);
  } else if (key == "h") {
    cfg->grid.cell_height_units = parse_int(key, value);
  } else if (key == "n") {
    cfg->grid.nms_radius = parse_int(key, value);
  } else if (key == "target_count") {
    cfg->target_count = parse_int(key, value);
  } else if (key == "redetect_ratio") {
    cfg->redetect_ratio = parse_double(key, value);
  } else if (key == "param_mode") {
    cfg->tracker.mode = parse_param_mode(value);
  } else if (key == "max_iterations") {
    cfg->tracker.max_iterations = parse_int(key, value);
  } else if (key == "convergence_epsilon") {
    cfg->tracker.convergence_epsilon = parse_double(key, value);
  } else if (key == "threads") {
    cfg->threads = parse_int(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void load_config_file(FrontendConfig* cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(path + ": cannot open configuration file");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace fastlk
