// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "isomedia/fit.hpp"
#include "isomedia/oracle.hpp"

namespace isomedia {

struct ProjectPaths {
  std::filesystem::path data = "data";          // dataset written by synth, read by fit
  std::filesystem::path output = "out";         // renders, reports, history
  std::filesystem::path checkpoint = "out/fields.ckpt";
};

struct AppSettings {
  double width_real = 6.0;  // metres spanned by an orthographic image
  std::vector<double> depth_scales{1.0 / 3.0, 3.0};
};

struct InitialMedium {
  Spectrum sigma_attn{0.5, 0.5, 0.5};
  Spectrum sigma_scat{0.5, 0.5, 0.5};
  Spectrum phi{1.0, 1.0, 1.0};
};

struct ProjectConfig {
  Condition condition = Condition::kUnderwater;
  std::uint64_t seed = 0;
  OracleScene scene;
  FieldSet::Options fields;
  InitialMedium medium;
  FitConfig fit;
  ProjectPaths paths;
  AppSettings apps;
  std::string source_hash;  // FNV-1a of the config text

  FieldSet initial_field() const;
};

// Parses a JSON config ('//' and '/* */' comments allowed). Relative paths
// resolve against the config file's directory. A missing or malformed file
// and any invalid value raise ConfigError.
ProjectConfig load_config(const std::filesystem::path& path);
ProjectConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

std::string fnv1a_hex(const std::string& text);

// Camera description shared by configs and dataset manifests.
CameraModel camera_from_json_text(const std::string& json_text, ImageSize size);
std::string camera_to_json_text(const CameraModel& camera);

}  // namespace isomedia
