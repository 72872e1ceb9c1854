// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "isomedia/fit.hpp"

namespace isomedia {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

// Entry point of the `isomedia` tool: synth | fit | render | metrics | apps.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Dataset layout written by synth: manifest.json, poses.txt and per-view
// PFM layers named view_NNN_<layer>.pfm.
std::string view_name(std::size_t index);

struct Dataset {
  ImageSize size;
  std::vector<CameraModel> cameras;
  std::vector<std::string> names;
  FitData fit_data;
};
// Reads cameras and observations (plus depth priors when present). Throws
// IoError for missing or malformed files.
Dataset load_dataset(const std::filesystem::path& dir);

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRow>& history);

}  // namespace isomedia
