// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "isomedia/errors.hpp"
#include "json.hpp"

namespace isomedia {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move '" + tmp.string() + "' into place");
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_atomic(path, [&](std::ostream& o) { o << text; });
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_pfm(const fs::path& path, const Image& image) {
  if (image.empty()) throw InputError("cannot write an empty image");
  if (image.channels() != 1 && image.channels() != 3) throw InputError("PFM holds 1 or 3 channels");
  write_atomic(path, [&](std::ostream& o) {
    o << (image.channels() == 3 ? "PF" : "Pf") << "\n" << image.width() << " " << image.height() << "\n-1.0\n";
    std::vector<float> row(static_cast<std::size_t>(image.width() * image.channels()));
    for (int r = image.height() - 1; r >= 0; --r) {
      for (int c = 0; c < image.width(); ++c)
        for (int ch = 0; ch < image.channels(); ++ch)
          row[static_cast<std::size_t>(c * image.channels() + ch)] = static_cast<float>(image.at(r, c, ch));
      o.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
  });
}

Image read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in || (magic != "PF" && magic != "Pf") || w < 1 || h < 1 || scale == 0.0)
    throw IoError("'" + path.string() + "' is not a valid PFM file");
  in.get();
  const int ch = magic == "PF" ? 3 : 1;
  Image img(h, w, ch);
  std::vector<float> row(static_cast<std::size_t>(w * ch));
  for (int r = h - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("'" + path.string() + "' is truncated");
    if (scale > 0.0)
      for (float& f : row) f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
    for (int c = 0; c < w; ++c)
      for (int k = 0; k < ch; ++k) img.at(r, c, k) = row[static_cast<std::size_t>(c * ch + k)];
  }
  return img;
}

void write_ppm_srgb(const fs::path& path, const Image& image) {
  write_atomic(path, [&](std::ostream& o) {
    o << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    for (int r = 0; r < image.height(); ++r)
      for (int c = 0; c < image.width(); ++c) {
        const Spectrum v = image.rgb(r, c);
        for (std::size_t k = 0; k < 3; ++k) {
          const double x = std::clamp(v[k], 0.0, 1.0);
          const double s = x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
          o.put(static_cast<char>(static_cast<unsigned char>(std::lround(s * 255.0))));
        }
      }
  });
}

void write_poses(const fs::path& path, const std::vector<NamedPose>& poses) {
  std::ostringstream o;
  o.precision(17);
  o << "# name then row-major 4x4 world-from-camera matrix\n";
  for (const NamedPose& p : poses) {
    o << p.name;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) o << " " << p.pose.rotation(r, c);
      o << " " << p.pose.translation[static_cast<std::size_t>(r)];
    }
    o << " 0 0 0 1\n";
  }
  write_text_atomic(path, o.str());
}

std::vector<NamedPose> read_poses(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<NamedPose> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    NamedPose p;
    if (!(ls >> p.name)) continue;
    double m[16];
    for (double& v : m)
      if (!(ls >> v)) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 16 matrix entries");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) p.pose.rotation(r, c) = m[r * 4 + c];
      p.pose.translation[static_cast<std::size_t>(r)] = m[r * 4 + 3];
    }
    out.push_back(p);
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'I', 'S', 'O', 'M', 'C', 'K', 'P', 'T'};

json grid_header(const VoxelField& f) {
  return {{"resolution", {f.nx(), f.ny(), f.nz()}},
          {"channels", f.channels()},
          {"activation", std::string(to_string(f.activation()))},
          {"scale", f.scale()}};
}

json spectrum_json(const Spectrum& s) { return json::array({s[0], s[1], s[2]}); }

Spectrum spectrum_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("checkpoint spectrum must have three entries");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

VoxelField grid_from(const json& h) {
  const auto res = h.at("resolution");
  return VoxelField(res.at(0).get<int>(), res.at(1).get<int>(), res.at(2).get<int>(), h.at("channels").get<int>(),
                    activation_from_string(h.at("activation").get<std::string>()), h.at("scale").get<double>());
}

}  // namespace

void write_checkpoint(const fs::path& path, const FieldSet& field, const std::string& extra_json) {
  json header;
  header["format"] = "isomedia-fields";
  header["object_density"] = grid_header(field.object_density);
  header["object_color"] = grid_header(field.object_color);
  header["media_density"] = grid_header(field.media_density);
  header["downwelling_grid"] = grid_header(field.downwelling.grid);
  header["medium"] = {{"sigma_attn", spectrum_json(field.medium.sigma_attn)},
                      {"sigma_scat", spectrum_json(field.medium.sigma_scat)},
                      {"phi", spectrum_json(field.medium.phi)},
                      {"mode", std::string(to_string(field.medium.mode))}};
  header["downwelling"] = {{"kind", std::string(to_string(field.downwelling.kind))},
                           {"surface_height", field.downwelling.surface_height}};
  header["extra"] = json::parse(extra_json);
  const std::string text = header.dump();
  write_atomic(path, [&](std::ostream& o) {
    o.write(kMagic, sizeof kMagic);
    const std::uint32_t version = kCheckpointVersion;
    const auto len = static_cast<std::uint64_t>(text.size());
    o.write(reinterpret_cast<const char*>(&version), sizeof version);
    o.write(reinterpret_cast<const char*>(&len), sizeof len);
    o.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const VoxelField* g : {&field.object_density, &field.object_color, &field.media_density,
                                &field.downwelling.grid}) {
      const auto raw = g->raw();
      o.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size_bytes()));
    }
  });
}

FieldSet read_checkpoint(const fs::path& path, std::string* extra_json) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path.string() + "'");
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError("'" + path.string() + "' is not a checkpoint");
  if (version != kCheckpointVersion)
    throw IoError("checkpoint version " + std::to_string(version) + " is not supported");
  if (len > (1u << 26)) throw IoError("checkpoint header is implausibly large");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw IoError("checkpoint header is truncated");
  FieldSet f;
  try {
    const json h = json::parse(text);
    f.object_density = grid_from(h.at("object_density"));
    f.object_color = grid_from(h.at("object_color"));
    f.media_density = grid_from(h.at("media_density"));
    f.downwelling.grid = grid_from(h.at("downwelling_grid"));
    const json& m = h.at("medium");
    f.medium.sigma_attn = spectrum_from(m.at("sigma_attn"));
    f.medium.sigma_scat = spectrum_from(m.at("sigma_scat"));
    f.medium.phi = spectrum_from(m.at("phi"));
    f.medium.mode = medium_mode_from_string(m.at("mode").get<std::string>());
    f.downwelling.kind = downwelling_kind_from_string(h.at("downwelling").at("kind").get<std::string>());
    f.downwelling.surface_height = h.at("downwelling").at("surface_height").get<double>();
    if (extra_json) *extra_json = h.value("extra", json::object()).dump();
  } catch (const json::exception& e) {
    throw IoError("checkpoint header is malformed: " + std::string(e.what()));
  } catch (const ConfigError& e) {
    throw IoError("checkpoint header is malformed: " + std::string(e.what()));
  }
  for (VoxelField* g : {&f.object_density, &f.object_color, &f.media_density, &f.downwelling.grid}) {
    auto raw = g->raw_mut();
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size_bytes()));
    if (!in) throw IoError("checkpoint payload is truncated");
  }
  f.update_activation();
  try {
    f.validate();
  } catch (const InputError& e) {
    throw IoError("checkpoint content is invalid: " + std::string(e.what()));
  }
  return f;
}

}  // namespace isomedia
