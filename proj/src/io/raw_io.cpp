#include "io/raw_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sogtrack {

namespace {

std::vector<float> read_floats(const std::string& path, size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open raw file: " + path);
  std::vector<float> data(count);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != count * sizeof(float))
    throw std::runtime_error("raw file truncated: " + path);
  return data;
}

void write_floats(const std::string& path, const float* data, size_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write raw file: " + path);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
  if (!out) throw std::runtime_error("raw file write failed: " + path);
}

}  // namespace

Pointmap read_pointmap_raw(const std::string& path, int width, int height) {
  Pointmap pm;
  pm.width = width;
  pm.height = height;
  pm.points = read_floats(path, static_cast<size_t>(width) * height * 3);
  pm.validity.resize(static_cast<size_t>(width) * height);
  for (size_t i = 0; i < pm.validity.size(); ++i) {
    const float* p = pm.points.data() + 3 * i;
    pm.validity[i] = (std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2])) ? 1 : 0;
  }
  return pm;
}

void write_pointmap_raw(const std::string& path, const Pointmap& pm) {
  write_floats(path, pm.points.data(), pm.points.size());
}

Eigen::MatrixXd read_matrix_raw(const std::string& path, int rows, int cols) {
  const std::vector<float> data = read_floats(path, static_cast<size_t>(rows) * cols);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r) * cols + c];
  return m;
}

void write_matrix_raw(const std::string& path, const Eigen::MatrixXd& m) {
  std::vector<float> data(static_cast<size_t>(m.rows()) * m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      data[static_cast<size_t>(r) * m.cols() + c] = static_cast<float>(m(r, c));
  write_floats(path, data.data(), data.size());
}

}  // namespace sogtrack
