#include "io/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace sogtrack {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const char* what) {
  throw std::runtime_error(std::string(what) + ": " + path);
}

// Reads any PNG as 8-bit RGB rows.
std::vector<std::vector<png_byte>> read_rgb_rows(const std::string& path, int& width, int& height) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(path, "cannot open PNG");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "corrupt PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  std::vector<std::vector<png_byte>> rows(height);
  std::vector<png_bytep> row_ptrs(height);
  const size_t rowbytes = png_get_rowbytes(png, info);
  for (int r = 0; r < height; ++r) {
    rows[r].resize(rowbytes);
    row_ptrs[r] = rows[r].data();
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return rows;
}

void write_rows(const std::string& path, int width, int height, int color_type,
                std::vector<png_bytep>& row_ptrs) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(path, "cannot write PNG");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "PNG write failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

ImageRGB read_png(const std::string& path) {
  int width = 0, height = 0;
  const auto rows = read_rgb_rows(path, width, height);
  ImageRGB img;
  img.width = width;
  img.height = height;
  img.data.resize(static_cast<size_t>(width) * height * 3);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width * 3; ++c)
      img.data[static_cast<size_t>(r) * width * 3 + c] = rows[r][c] / 255.0f;
  return img;
}

void write_png(const std::string& path, const ImageRGB& image) {
  std::vector<std::vector<png_byte>> rows(image.height);
  std::vector<png_bytep> ptrs(image.height);
  for (int r = 0; r < image.height; ++r) {
    rows[r].resize(static_cast<size_t>(image.width) * 3);
    for (int c = 0; c < image.width * 3; ++c) {
      const float v = image.data[static_cast<size_t>(r) * image.width * 3 + c];
      rows[r][c] = static_cast<png_byte>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    }
    ptrs[r] = rows[r].data();
  }
  write_rows(path, image.width, image.height, PNG_COLOR_TYPE_RGB, ptrs);
}

Mask read_mask_png(const std::string& path) {
  int width = 0, height = 0;
  const auto rows = read_rgb_rows(path, width, height);
  Mask mask;
  mask.width = width;
  mask.height = height;
  mask.data.resize(static_cast<size_t>(width) * height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      mask.data[static_cast<size_t>(r) * width + c] = rows[r][3 * c] != 0 ? 1 : 0;
  return mask;
}

void write_mask_png(const std::string& path, const Mask& mask) {
  std::vector<std::vector<png_byte>> rows(mask.height);
  std::vector<png_bytep> ptrs(mask.height);
  for (int r = 0; r < mask.height; ++r) {
    rows[r].resize(mask.width);
    for (int c = 0; c < mask.width; ++c)
      rows[r][c] = mask.data[static_cast<size_t>(r) * mask.width + c] != 0 ? 255 : 0;
    ptrs[r] = rows[r].data();
  }
  write_rows(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, ptrs);
}

}  // namespace sogtrack
