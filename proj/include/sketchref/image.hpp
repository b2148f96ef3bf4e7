#ifndef SKETCHREF_IMAGE_HPP_
#define SKETCHREF_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sketchref {

// 8-bit single-channel image, row-major, no padding.
struct ImageRecord {
  std::string id;
  std::filesystem::path path;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }

  bool operator==(const ImageRecord&) const = default;
};

ImageRecord make_image(int width, int height, std::uint8_t fill, std::string id = {});

// Checks width/height > 0 and buffer length; throws Error(kValidation).
void validate_image(const ImageRecord& img);

// ITU-R BT.601 luma with integer weights, rounded half up:
//   Y = (299 R + 587 G + 114 B + 500) / 1000
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Decodes PNG, JPEG or binary PGM/PPM (P5/P6) into grayscale. Colour input is
// reduced with luma_bt601; an alpha channel is composited over white first.
ImageRecord decode_image(std::span<const std::uint8_t> bytes, std::string id = {});
ImageRecord load_image(const std::filesystem::path& path, std::string id = {});

// Lossless 8-bit grayscale PNG.
void save_png(const ImageRecord& img, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace sketchref

#endif  // SKETCHREF_IMAGE_HPP_
