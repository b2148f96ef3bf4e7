#include "sketchref/image.hpp"

#include <png.h>
#include <jpeglib.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sketchref/error.hpp"

namespace sketchref {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kSchemaMismatch: return "schema_mismatch";
    case ErrorCode::kDimMismatch: return "dim_mismatch";
    case ErrorCode::kZeroVector: return "zero_vector";
    case ErrorCode::kKindMismatch: return "kind_mismatch";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kPairing: return "pairing";
    case ErrorCode::kNoTargets: return "no_targets";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

ImageRecord make_image(int width, int height, std::uint8_t fill, std::string id) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kValidation, "image dimensions must be positive");
  }
  ImageRecord img;
  img.id = std::move(id);
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

void validate_image(const ImageRecord& img) {
  if (img.width <= 0 || img.height <= 0) {
    throw Error(ErrorCode::kValidation, "image '" + img.id + "' has non-positive dimensions");
  }
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw Error(ErrorCode::kValidation, "image '" + img.id + "' buffer length != width * height");
  }
}

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const unsigned y = 299u * r + 587u * g + 114u * b + 500u;
  return static_cast<std::uint8_t>(y / 1000u);
}

namespace {

std::uint8_t over_white(std::uint8_t c, std::uint8_t a) {
  const unsigned v = unsigned{c} * a + 255u * (255u - a) + 127u;
  return static_cast<std::uint8_t>(v / 255u);
}

bool has_prefix(std::span<const std::uint8_t> bytes, std::initializer_list<std::uint8_t> sig) {
  if (bytes.size() < sig.size()) return false;
  return std::equal(sig.begin(), sig.end(), bytes.begin());
}

ImageRecord decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kParse, std::string("PNG decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kParse, std::string("PNG decode failed: ") + image.message);
  }
  ImageRecord img = make_image(static_cast<int>(image.width), static_cast<int>(image.height), 0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::uint8_t* p = &rgba[i * 4];
    img.pixels[i] = luma_bt601(over_white(p[0], p[3]), over_white(p[1], p[3]), over_white(p[2], p[3]));
  }
  return img;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

ImageRecord decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  // Everything that must be released on longjmp lives outside this frame.
  std::vector<std::uint8_t> raw;
  int width = 0, height = 0, channels = 0;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::kParse, std::string("JPEG decode failed: ") + jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  channels = cinfo.output_components;
  raw.resize(static_cast<std::size_t>(width) * height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = &raw[static_cast<std::size_t>(cinfo.output_scanline) * width * channels];
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  ImageRecord img = make_image(width, height, 0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (channels == 1) {
      img.pixels[i] = raw[i];
    } else {
      img.pixels[i] = luma_bt601(raw[i * 3], raw[i * 3 + 1], raw[i * 3 + 2]);
    }
  }
  return img;
}

// Binary netpbm: P5 (gray) or P6 (RGB), maxval <= 255.
ImageRecord decode_pnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  auto next_int = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      any = true;
      if (v > 1'000'000) break;
      ++pos;
    }
    if (!any) throw Error(ErrorCode::kParse, "malformed PNM header");
    return v;
  };
  const bool rgb = bytes[1] == '6';
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw Error(ErrorCode::kParse, "unsupported PNM header");
  }
  ++pos;  // single whitespace before raster
  const std::size_t channels = rgb ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (bytes.size() < pos + need) throw Error(ErrorCode::kParse, "truncated PNM raster");
  ImageRecord img = make_image(static_cast<int>(w), static_cast<int>(h), 0);
  auto scale = [maxval](std::uint8_t v) {
    return static_cast<std::uint8_t>((unsigned{v} * 255u + maxval / 2) / maxval);
  };
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::uint8_t* p = &bytes[pos + i * channels];
    img.pixels[i] = rgb ? luma_bt601(scale(p[0]), scale(p[1]), scale(p[2])) : scale(p[0]);
  }
  return img;
}

}  // namespace

ImageRecord decode_image(std::span<const std::uint8_t> bytes, std::string id) {
  ImageRecord img;
  if (has_prefix(bytes, {0x89, 'P', 'N', 'G'})) {
    img = decode_png(bytes);
  } else if (has_prefix(bytes, {0xFF, 0xD8, 0xFF})) {
    img = decode_jpeg(bytes);
  } else if (has_prefix(bytes, {'P', '5'}) || has_prefix(bytes, {'P', '6'})) {
    img = decode_pnm(bytes);
  } else {
    throw Error(ErrorCode::kParse, "unrecognized image format");
  }
  img.id = std::move(id);
  return img;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImageRecord load_image(const std::filesystem::path& path, std::string id) {
  const auto bytes = read_file_bytes(path);
  try {
    ImageRecord img = decode_image(bytes, std::move(id));
    img.path = path;
    return img;
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_png(const ImageRecord& img, const std::filesystem::path& path) {
  validate_image(img);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, "cannot write PNG '" + path.string() + "': " + image.message);
  }
}

}  // namespace sketchref
