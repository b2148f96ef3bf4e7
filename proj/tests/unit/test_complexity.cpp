#include <cmath>
#include <random>

#include "doctest.h"
#include "sketchref/complexity.hpp"
#include "sketchref/error.hpp"
#include "sketchref/synthetic.hpp"

using namespace sketchref;

namespace {

ImageRecord flip_horizontal(const ImageRecord& img) {
  ImageRecord out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(img.width - 1 - x, y);
  return out;
}

ImageRecord flip_vertical(const ImageRecord& img) {
  ImageRecord out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(x, img.height - 1 - y);
  return out;
}

// Values with a closed form; see the frozen checks below.
ImageRecord formula_image(int w, int h) {
  ImageRecord img = make_image(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>((x * 37 + y * 91 + x * y * 13) % 256);
  return img;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sketchref::Error");
  return ErrorCode::kInvalidArgument;
}

const std::vector<ComplexityMethod> kAllMethods = {
    ComplexityMethod::parse("compression_ratio"), ComplexityMethod::parse("entropy_1d"),
    ComplexityMethod::parse("entropy_2d"), ComplexityMethod::parse("harris_density"),
    ComplexityMethod::parse("fast_density")};

}  // namespace

TEST_CASE("compression ratio") {
  const ImageRecord white = make_image(224, 224, 255);
  const ImageRecord noise = synthetic::noise_image(224, 224, 42);
  CHECK(complexity_cr(white) < 0.05);
  CHECK(complexity_cr(white) > 0.0);
  CHECK(complexity_cr(noise) > 0.9);
  CHECK(complexity_cr(noise) == complexity_cr(noise));
  CHECK(complexity_cr(white, 1) > 0.0);
}

TEST_CASE("entropy_1d") {
  CHECK(entropy_1d(make_image(32, 32, 17)) == 0.0);

  ImageRecord half = make_image(10, 10, 0);
  for (std::size_t i = 0; i < 50; ++i) half.pixels[i] = 255;
  CHECK(entropy_1d(half) == doctest::Approx(1.0).epsilon(1e-12));

  ImageRecord ramp = make_image(16, 16, 0);
  for (std::size_t i = 0; i < 256; ++i) ramp.pixels[i] = static_cast<std::uint8_t>(i);
  CHECK(std::abs(entropy_1d(ramp) - 8.0) < 1e-12);

  // independent Python histogram oracle
  CHECK(std::abs(entropy_1d(formula_image(9, 7)) - 5.7233116695316655) < 1e-12);
}

TEST_CASE("entropy_2d") {
  CHECK(entropy_2d(make_image(8, 8, 200)) == 0.0);
  // Interior pixels of a 1-pixel checkerboard pair with a neighbour mean of
  // 127.5 -> 128. 5x5 has 5 zeros and 4 whites inside; 6x6 is balanced.
  // Expected values from a brute-force enumeration of the joint histogram.
  CHECK(std::abs(entropy_2d(synthetic::checkerboard(5, 5)) - 0.99107605983822222) < 1e-12);
  CHECK(std::abs(entropy_2d(synthetic::checkerboard(6, 6)) - 1.0) < 1e-12);
  CHECK(std::abs(entropy_2d(formula_image(9, 7)) - 5.0149973026592489) < 1e-12);
  CHECK(code_of([] { entropy_2d(make_image(2, 2, 0)); }) == ErrorCode::kInvalidArgument);
  CHECK_NOTHROW(entropy_2d(make_image(3, 3, 0)));
}

TEST_CASE("property: entropies are flip invariant and bounded") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 3 + static_cast<int>(gen() % 40), h = 3 + static_cast<int>(gen() % 40);
    ImageRecord img = make_image(w, h, 0);
    const unsigned levels = 1 + static_cast<unsigned>(gen() % 256);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() % levels);
    const double e1 = entropy_1d(img), e2 = entropy_2d(img);
    CHECK(e1 >= 0.0);
    CHECK(e1 <= 8.0 + 1e-12);
    CHECK(e2 >= 0.0);
    CHECK(e2 <= 16.0 + 1e-12);
    for (const auto& f : {flip_horizontal(img), flip_vertical(img)}) {
      CHECK(std::abs(entropy_1d(f) - e1) < 1e-9);
      CHECK(std::abs(entropy_2d(f) - e2) < 1e-9);
    }
  }
}

TEST_CASE("compression ratio is nearly flip invariant") {
  const auto fig = synthetic::make_stick_figure();
  for (const ImageRecord& img : {fig.sketch, fig.reference, synthetic::noise_image(224, 224, 1)}) {
    const double c = complexity_cr(img);
    CHECK(std::abs(complexity_cr(flip_horizontal(img)) - c) < 0.02);
    CHECK(std::abs(complexity_cr(flip_vertical(img)) - c) < 0.02);
  }
  const auto& white = make_image(224, 224, 255);
  const SimplicityResult r = simplicity_ratio(fig.reference, fig.sketch, ComplexityMethod::parse("cr"));
  const SimplicityResult rf =
      simplicity_ratio(flip_horizontal(fig.reference), flip_horizontal(fig.sketch), ComplexityMethod::parse("cr"));
  CHECK((r.sr > 1.0) == (rf.sr > 1.0));
  CHECK(complexity_cr(flip_vertical(white)) == complexity_cr(white));
}

TEST_CASE("corner detectors") {
  const ImageRecord flat = make_image(64, 64, 128);
  CHECK(corner_density(flat, CornerDetector::kHarris) == 0.0);
  CHECK(corner_density(flat, CornerDetector::kFast) == 0.0);

  SUBCASE("white square on black has four corners") {
    const ImageRecord sq = synthetic::square_image(64, 64, 20, 20, 24, 0, 255);
    CHECK(detect_harris(sq).size() == 4);
    CHECK(detect_fast(sq).size() == 4);
    CHECK(corner_density(sq, CornerDetector::kHarris) == 4.0 / (64 * 64));
    CHECK(corner_density(sq, CornerDetector::kFast) == 4.0 / (64 * 64));
  }
  SUBCASE("dark square on white also has four corners") {
    const ImageRecord sq = synthetic::square_image(224, 224, 70, 90, 60, 255, 0);
    CHECK(detect_harris(sq).size() == 4);
    CHECK(detect_fast(sq).size() == 4);
  }
  SUBCASE("corner positions sit at the square's corners") {
    const ImageRecord sq = synthetic::square_image(64, 64, 20, 20, 24, 0, 255);
    for (const auto& c : detect_fast(sq)) {
      CHECK((c.x == 20 || c.x == 43));
      CHECK((c.y == 20 || c.y == 43));
    }
    for (const auto& c : detect_harris(sq)) {
      CHECK(std::min(std::abs(c.x - 20), std::abs(c.x - 43)) <= 1);
      CHECK(std::min(std::abs(c.y - 20), std::abs(c.y - 43)) <= 1);
    }
  }
  SUBCASE("deterministic") {
    const auto fig = synthetic::make_stick_figure();
    for (auto det : {CornerDetector::kHarris, CornerDetector::kFast}) {
      const double d = corner_density(fig.sketch, det);
      CHECK(d >= 0.0);
      CHECK(corner_density(fig.sketch, det) == d);
    }
  }
  SUBCASE("fast without non-maximum suppression reports more") {
    const ImageRecord sq = synthetic::square_image(64, 64, 20, 20, 24, 0, 255);
    FastParams p;
    p.nonmax = false;
    CHECK(detect_fast(sq, p).size() > 4);
  }
}

TEST_CASE("simplicity ratio") {
  const ImageRecord white = make_image(224, 224, 255);
  const ImageRecord noise = synthetic::noise_image(224, 224, 42);
  const auto fig = synthetic::make_stick_figure();

  for (const auto& m : kAllMethods) {
    CAPTURE(m.name());
    const auto self = simplicity_ratio(fig.reference, fig.reference, m);
    CHECK(self.sr == 1.0);
    const auto ab = simplicity_ratio(fig.reference, fig.sketch, m);
    const auto ba = simplicity_ratio(fig.sketch, fig.reference, m);
    CHECK(std::abs(ab.sr * ba.sr - 1.0) < 1e-9);
    CHECK(std::abs(ab.sr - ab.c_ref / ab.c_sketch) < 1e-12);
    CHECK(ab.method == m.name());
  }

  const auto cr = simplicity_ratio(noise, white, ComplexityMethod::parse("compression_ratio"));
  CHECK(cr.sr > 10.0);

  CHECK(code_of([&] { simplicity_ratio(noise, make_image(100, 224, 255), ComplexityMethod::parse("cr")); }) ==
        ErrorCode::kDimMismatch);
  CHECK(code_of([&] { simplicity_ratio(fig.sketch, white, ComplexityMethod::parse("harris_density")); }) ==
        ErrorCode::kDegenerate);
}

TEST_CASE("complexity method names and parameter ranges") {
  for (const auto& m : kAllMethods) CHECK(ComplexityMethod::parse(m.name()).kind == m.kind);
  CHECK(code_of([] { ComplexityMethod::parse("icnet"); }) == ErrorCode::kInvalidArgument);
  ComplexityMethod m;
  m.deflate_level = 12;
  CHECK(code_of([&] { m.validate(); }) == ErrorCode::kInvalidArgument);
  m = {};
  m.fast.arc_length = 5;
  CHECK(code_of([&] { m.validate(); }) == ErrorCode::kInvalidArgument);
}
