#pragma once

#include <string>

#include "keyframes/keyframes.hpp"
#include "priors/priors.hpp"

namespace sogtrack {

// Pointmaps are little-endian float32 height x width x 3 world coordinates,
// row-major; a pixel is invalid when any channel is NaN.
Pointmap read_pointmap_raw(const std::string& path, int width, int height);
void write_pointmap_raw(const std::string& path, const Pointmap& pm);

// Feature matrices are little-endian float32 N x d row-major.
Eigen::MatrixXd read_matrix_raw(const std::string& path, int rows, int cols);
void write_matrix_raw(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace sogtrack
