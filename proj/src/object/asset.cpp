#include "object/asset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sogtrack {
namespace {

struct PlyLayout {
  size_t vertex_count = 0;
  size_t stride = 0;                       // bytes per vertex
  std::map<std::string, size_t> offsets;   // property name -> byte offset
};

size_t property_size(const std::string& type) {
  if (type == "float" || type == "float32" || type == "int" || type == "int32" ||
      type == "uint" || type == "uint32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  throw std::runtime_error("unsupported PLY property type: " + type);
}

PlyLayout parse_header(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw std::runtime_error("not a PLY file");
  PlyLayout layout;
  bool binary_le = false;
  bool in_vertex = false;
  std::map<std::string, std::string> types;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = (fmt == "binary_little_endian");
    } else if (tok == "element") {
      std::string name;
      size_t count;
      ls >> name >> count;
      in_vertex = (name == "vertex");
      if (in_vertex) layout.vertex_count = count;
    } else if (tok == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      if (type == "list") throw std::runtime_error("unsupported PLY property type: list");
      layout.offsets[name] = layout.stride;
      types[name] = type;
      layout.stride += property_size(type);
    } else if (tok == "end_header") {
      if (!binary_le) throw std::runtime_error("PLY must be binary little-endian");
      for (const auto& [name, type] : types)
        if (type != "float" && type != "float32")
          throw std::runtime_error("PLY property " + name + " must be float32");
      return layout;
    }
  }
  throw std::runtime_error("PLY header has no end_header");
}

float read_float(const char* base, size_t offset) {
  float v;
  std::memcpy(&v, base + offset, sizeof(float));
  return v;
}

std::vector<char> read_vertex_block(std::istream& in, const PlyLayout& layout) {
  std::vector<char> buf(layout.vertex_count * layout.stride);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(in.gcount()) != buf.size())
    throw std::runtime_error("PLY vertex data truncated");
  return buf;
}

size_t require(const PlyLayout& layout, const std::string& name) {
  auto it = layout.offsets.find(name);
  if (it == layout.offsets.end()) throw std::runtime_error("PLY missing property: " + name);
  return it->second;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Vec3 dc_to_rgb(const Vec3& dc) {
  Vec3 rgb = (Vec3::Constant(0.5) + kShC0 * dc).cwiseMax(0.0).cwiseMin(1.0);
  return rgb;
}

DenseGaussianAsset read_gaussian_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PLY file: " + path);
  const PlyLayout layout = parse_header(in);
  if (layout.vertex_count == 0) throw std::runtime_error("PLY has no vertices: " + path);

  static const char* kRequired[] = {"x",       "y",       "z",       "scale_0", "scale_1",
                                    "scale_2", "rot_0",   "rot_1",   "rot_2",   "rot_3",
                                    "opacity", "f_dc_0",  "f_dc_1",  "f_dc_2"};
  size_t off[14];
  for (int i = 0; i < 14; ++i) off[i] = require(layout, kRequired[i]);

  const std::vector<char> buf = read_vertex_block(in, layout);
  DenseGaussianAsset asset;
  asset.centers.reserve(layout.vertex_count);
  for (size_t v = 0; v < layout.vertex_count; ++v) {
    const char* rec = buf.data() + v * layout.stride;
    asset.centers.emplace_back(read_float(rec, off[0]), read_float(rec, off[1]), read_float(rec, off[2]));
    asset.scales.emplace_back(std::exp(read_float(rec, off[3])), std::exp(read_float(rec, off[4])),
                              std::exp(read_float(rec, off[5])));
    asset.rotations.emplace_back(read_float(rec, off[6]), read_float(rec, off[7]),
                                 read_float(rec, off[8]), read_float(rec, off[9]));
    asset.opacities.push_back(sigmoid(read_float(rec, off[10])));
    asset.colors_dc.emplace_back(read_float(rec, off[11]), read_float(rec, off[12]),
                                 read_float(rec, off[13]));
  }
  return asset;
}

void write_gaussian_ply(const std::string& path, const DenseGaussianAsset& asset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PLY file: " + path);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << asset.size() << "\n";
  for (const char* p : {"x", "y", "z", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2",
                        "rot_3", "opacity", "f_dc_0", "f_dc_1", "f_dc_2"})
    out << "property float " << p << "\n";
  out << "end_header\n";
  auto put = [&out](double v) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof(float));
  };
  for (size_t i = 0; i < asset.size(); ++i) {
    for (int k = 0; k < 3; ++k) put(asset.centers[i][k]);
    for (int k = 0; k < 3; ++k) put(std::log(asset.scales[i][k]));
    for (int k = 0; k < 4; ++k) put(asset.rotations[i][k]);
    const double o = std::min(1.0 - 1e-9, std::max(1e-9, asset.opacities[i]));
    put(std::log(o / (1.0 - o)));
    for (int k = 0; k < 3; ++k) put(asset.colors_dc[i][k]);
  }
}

std::vector<Vec3> read_point_set_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PLY file: " + path);
  const PlyLayout layout = parse_header(in);
  const size_t ox = require(layout, "x"), oy = require(layout, "y"), oz = require(layout, "z");
  const std::vector<char> buf = read_vertex_block(in, layout);
  std::vector<Vec3> points;
  points.reserve(layout.vertex_count);
  for (size_t v = 0; v < layout.vertex_count; ++v) {
    const char* rec = buf.data() + v * layout.stride;
    points.emplace_back(read_float(rec, ox), read_float(rec, oy), read_float(rec, oz));
  }
  return points;
}

void write_point_set_ply(const std::string& path, const std::vector<Vec3>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PLY file: " + path);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << points.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "end_header\n";
  for (const Vec3& p : points) {
    for (int k = 0; k < 3; ++k) {
      const float f = static_cast<float>(p[k]);
      out.write(reinterpret_cast<const char*>(&f), sizeof(float));
    }
  }
}

}  // namespace sogtrack
