#ifndef SKETCHREF_COMPLEXITY_HPP_
#define SKETCHREF_COMPLEXITY_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "sketchref/image.hpp"

namespace sketchref {

enum class ComplexityKind {
  kCompressionRatio,
  kEntropy1d,
  kEntropy2d,
  kHarrisDensity,
  kFastDensity,
};

struct HarrisParams {
  double sigma = 1.0;           // Gaussian window
  double k = 0.04;
  double rel_threshold = 0.01;  // fraction of the maximum response
};

struct FastParams {
  int threshold = 20;
  int arc_length = 9;
  bool nonmax = true;
};

// A complexity estimator C(.) together with its fixed parameters.
struct ComplexityMethod {
  ComplexityKind kind = ComplexityKind::kCompressionRatio;
  int deflate_level = 9;  // 0..9
  HarrisParams harris;
  FastParams fast;

  // compression_ratio | entropy_1d | entropy_2d | harris_density | fast_density
  static ComplexityMethod parse(std::string_view name);
  std::string name() const;
  void validate() const;
};

struct Corner {
  int x = 0;
  int y = 0;
  double response = 0.0;
};

// Raw DEFLATE (no zlib/gzip wrapper) of the grayscale buffer at `level`,
// returned as compressed_bytes / (width * height).
double complexity_cr(const ImageRecord& img, int level = 9);

// Shannon entropy of the 256-bin histogram, in bits.
double entropy_1d(const ImageRecord& img);

// Joint entropy of (pixel, round-half-up mean of its 8 neighbours) over
// interior pixels, in bits. Requires width, height >= 3.
double entropy_2d(const ImageRecord& img);

std::vector<Corner> detect_harris(const ImageRecord& img, const HarrisParams& params = {});
std::vector<Corner> detect_fast(const ImageRecord& img, const FastParams& params = {});

enum class CornerDetector { kHarris, kFast };

double corner_density(const ImageRecord& img, CornerDetector detector,
                      const HarrisParams& harris = {}, const FastParams& fast = {});

double complexity(const ImageRecord& img, const ComplexityMethod& method);

struct SimplicityResult {
  double sr = 0.0;
  double c_ref = 0.0;
  double c_sketch = 0.0;
  std::string method;
};

// SR = C(ref) / C(sketch); SR > 1 means the sketch is simpler than the
// reference. Dimensions must match and both complexities must be positive.
SimplicityResult simplicity_ratio(const ImageRecord& ref, const ImageRecord& sketch,
                                  const ComplexityMethod& method);

}  // namespace sketchref

#endif  // SKETCHREF_COMPLEXITY_HPP_
