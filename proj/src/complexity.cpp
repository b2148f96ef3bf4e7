#include "sketchref/complexity.hpp"

#include <zlib.h>

#include <array>
#include <cmath>
#include <memory>

#include "sketchref/error.hpp"

namespace sketchref {

ComplexityMethod ComplexityMethod::parse(std::string_view name) {
  ComplexityMethod m;
  if (name == "compression_ratio" || name == "cr") {
    m.kind = ComplexityKind::kCompressionRatio;
  } else if (name == "entropy_1d") {
    m.kind = ComplexityKind::kEntropy1d;
  } else if (name == "entropy_2d") {
    m.kind = ComplexityKind::kEntropy2d;
  } else if (name == "harris_density" || name == "harris") {
    m.kind = ComplexityKind::kHarrisDensity;
  } else if (name == "fast_density" || name == "fast") {
    m.kind = ComplexityKind::kFastDensity;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown complexity method '" + std::string(name) + "'");
  }
  return m;
}

std::string ComplexityMethod::name() const {
  switch (kind) {
    case ComplexityKind::kCompressionRatio: return "compression_ratio";
    case ComplexityKind::kEntropy1d: return "entropy_1d";
    case ComplexityKind::kEntropy2d: return "entropy_2d";
    case ComplexityKind::kHarrisDensity: return "harris_density";
    case ComplexityKind::kFastDensity: return "fast_density";
  }
  return "?";
}

void ComplexityMethod::validate() const {
  if (deflate_level < 0 || deflate_level > 9) {
    throw Error(ErrorCode::kInvalidArgument, "deflate level must be in [0, 9]");
  }
  if (!(harris.sigma > 0.0) || harris.sigma > 10.0) {
    throw Error(ErrorCode::kInvalidArgument, "harris sigma must be in (0, 10]");
  }
  if (!(harris.k > 0.0) || harris.k >= 0.25) {
    throw Error(ErrorCode::kInvalidArgument, "harris k must be in (0, 0.25)");
  }
  if (!(harris.rel_threshold >= 0.0) || harris.rel_threshold > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "harris threshold must be in [0, 1]");
  }
  if (fast.threshold < 1 || fast.threshold > 254) {
    throw Error(ErrorCode::kInvalidArgument, "fast threshold must be in [1, 254]");
  }
  if (fast.arc_length < 9 || fast.arc_length > 12) {
    throw Error(ErrorCode::kInvalidArgument, "fast arc length must be in [9, 12]");
  }
}

double complexity_cr(const ImageRecord& img, int level) {
  validate_image(img);
  z_stream zs{};
  // Negative window bits select raw deflate: no header, no checksum.
  if (deflateInit2(&zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kInvalidArgument, "deflateInit2 failed");
  }
  std::vector<unsigned char> out(deflateBound(&zs, static_cast<uLong>(img.size())));
  zs.next_in = const_cast<Bytef*>(img.pixels.data());
  zs.avail_in = static_cast<uInt>(img.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto compressed = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kDegenerate, "deflate did not finish");
  return static_cast<double>(compressed) / static_cast<double>(img.size());
}

namespace {

template <std::size_t N>
double shannon_bits(const std::array<std::uint64_t, N>& counts, std::uint64_t total) {
  double h = 0.0;
  const double inv = 1.0 / static_cast<double>(total);
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) * inv;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // normalise -0.0
}

}  // namespace

double entropy_1d(const ImageRecord& img) {
  validate_image(img);
  std::array<std::uint64_t, 256> hist{};
  for (auto v : img.pixels) ++hist[v];
  return shannon_bits(hist, img.size());
}

double entropy_2d(const ImageRecord& img) {
  validate_image(img);
  if (img.width < 3 || img.height < 3) {
    throw Error(ErrorCode::kInvalidArgument, "entropy_2d requires an image of at least 3x3");
  }
  auto hist = std::make_unique<std::array<std::uint64_t, 256 * 256>>();
  hist->fill(0);
  for (int y = 1; y < img.height - 1; ++y) {
    for (int x = 1; x < img.width - 1; ++x) {
      unsigned sum = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx != 0 || dy != 0) sum += img.at(x + dx, y + dy);
      const unsigned mean = (sum + 4) / 8;
      ++(*hist)[static_cast<std::size_t>(img.at(x, y)) * 256 + mean];
    }
  }
  const std::uint64_t total = static_cast<std::uint64_t>(img.width - 2) * (img.height - 2);
  return shannon_bits(*hist, total);
}

double corner_density(const ImageRecord& img, CornerDetector detector, const HarrisParams& harris,
                      const FastParams& fast) {
  validate_image(img);
  const std::size_t n = detector == CornerDetector::kHarris ? detect_harris(img, harris).size()
                                                           : detect_fast(img, fast).size();
  return static_cast<double>(n) / static_cast<double>(img.size());
}

double complexity(const ImageRecord& img, const ComplexityMethod& method) {
  method.validate();
  switch (method.kind) {
    case ComplexityKind::kCompressionRatio: return complexity_cr(img, method.deflate_level);
    case ComplexityKind::kEntropy1d: return entropy_1d(img);
    case ComplexityKind::kEntropy2d: return entropy_2d(img);
    case ComplexityKind::kHarrisDensity: return corner_density(img, CornerDetector::kHarris, method.harris);
    case ComplexityKind::kFastDensity: return corner_density(img, CornerDetector::kFast, {}, method.fast);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown complexity method");
}

SimplicityResult simplicity_ratio(const ImageRecord& ref, const ImageRecord& sketch,
                                  const ComplexityMethod& method) {
  validate_image(ref);
  validate_image(sketch);
  if (ref.width != sketch.width || ref.height != sketch.height) {
    throw Error(ErrorCode::kDimMismatch,
                "reference is " + std::to_string(ref.width) + "x" + std::to_string(ref.height) + " but sketch is " +
                    std::to_string(sketch.width) + "x" + std::to_string(sketch.height));
  }
  SimplicityResult r;
  r.method = method.name();
  r.c_ref = complexity(ref, method);
  r.c_sketch = complexity(sketch, method);
  if (!(r.c_sketch > 0.0)) {
    throw Error(ErrorCode::kDegenerate, method.name() + ": sketch complexity is zero (degenerate denominator)");
  }
  if (!(r.c_ref > 0.0)) {
    throw Error(ErrorCode::kDegenerate, method.name() + ": reference complexity is zero (SR would be 0)");
  }
  r.sr = r.c_ref / r.c_sketch;
  return r;
}

}  // namespace sketchref
