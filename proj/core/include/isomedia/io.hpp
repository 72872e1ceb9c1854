// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "isomedia/camera.hpp"
#include "isomedia/field_set.hpp"
#include "isomedia/image.hpp"

namespace isomedia {

// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Portable float map, little-endian, 1 or 3 channels. Rows are stored top to
// bottom in memory and flipped on disk as the format requires.
void write_pfm(const std::filesystem::path& path, const Image& image);
Image read_pfm(const std::filesystem::path& path);

// 8-bit binary PPM with sRGB encoding, for viewing only.
void write_ppm_srgb(const std::filesystem::path& path, const Image& image);

struct NamedPose {
  std::string name;
  Pose pose;
};
// One line per image: name followed by the 16 entries of the row-major 4x4
// world-from-camera matrix. '#' starts a comment.
void write_poses(const std::filesystem::path& path, const std::vector<NamedPose>& poses);
std::vector<NamedPose> read_poses(const std::filesystem::path& path);

// Versioned binary checkpoint: magic, version, JSON header length, JSON
// header (resolutions, activations, scales, medium parameters), then the raw
// grid parameters as little-endian doubles.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void write_checkpoint(const std::filesystem::path& path, const FieldSet& field, const std::string& extra_json = "{}");
FieldSet read_checkpoint(const std::filesystem::path& path, std::string* extra_json = nullptr);

}  // namespace isomedia
