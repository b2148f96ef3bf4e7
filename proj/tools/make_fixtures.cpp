// Writes the bundled 6-item mini fixture used by the integration and
// acceptance tests:
//
//   make_fixtures <out-dir>
//
// Everything is derived from fixed seeds, so re-running reproduces the
// committed files byte for byte.

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>

#include "sketchref/core.hpp"
#include "sketchref/runner.hpp"
#include "sketchref/synthetic.hpp"

namespace {

using namespace sketchref;
namespace fs = std::filesystem;

using Points = std::vector<std::array<double, 2>>;

ImageRecord textured_background(int size, std::uint64_t seed) {
  ImageRecord img = make_image(size, size, 0);
  std::mt19937_64 gen(seed);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(190 + (gen() >> 58));  // 190..253
  return img;
}

void draw_polyline(ImageRecord& img, const Points& pts, bool closed, double radius, std::uint8_t v) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    synthetic::draw_line(img, pts[i][0], pts[i][1], pts[i + 1][0], pts[i + 1][1], radius, v);
  }
  if (closed && pts.size() > 2) {
    synthetic::draw_line(img, pts.back()[0], pts.back()[1], pts.front()[0], pts.front()[1], radius, v);
  }
}

PredictionFile predictions_for(const ImageRecord& img, const std::string& image_id, const std::string& schema,
                               const Points& joints) {
  TargetKeypoints t;
  double min_x = 1e9, min_y = 1e9, max_x = -1e9, max_y = -1e9;
  for (const auto& j : joints) {
    t.points.push_back({j[0], j[1], 1.0});
    min_x = std::min(min_x, j[0]);
    min_y = std::min(min_y, j[1]);
    max_x = std::max(max_x, j[0]);
    max_y = std::max(max_y, j[1]);
  }
  t.bbox = {min_x - 8, min_y - 8, max_x - min_x + 16, max_y - min_y + 16};
  PredictionFile hints{image_id, schema, {t}};
  PredictionFile out = synthetic::MockJointPredictor().predict(img, hints);
  out.image_id = image_id;
  return out;
}

void write_json(const fs::path& p, const Json& j) { write_text_file(p, j.dump(2) + "\n"); }

EmbeddingRecord embedding(const std::string& key, EmbeddingKind kind, const std::vector<double>& v) {
  return EmbeddingRecord{key, kind, "fixture-8d", v};
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t dim) {
  std::vector<double> v(dim);
  // Values on a 1/64 grid keep the JSON short and exactly representable.
  for (auto& x : v) x = static_cast<double>(static_cast<int>(gen() % 129) - 64) / 64.0;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <out-dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  const fs::path images = root / "images", preds = root / "predictions", embs = root / "embeddings";
  fs::create_directories(images);
  fs::create_directories(preds);
  fs::create_directories(embs);
  constexpr int kSize = 224;
  Json items = Json::array();

  auto add_item = [&](const std::string& id, const char* domain, const char* task, const std::string& label,
                      const char* method) {
    Json j = {{"id", id},
              {"domain", domain},
              {"task", task},
              {"ref_path", "images/" + id + "_ref.png"},
              {"sketch_path", "images/" + id + "_sketch.png"},
              {"method", method}};
    if (!label.empty()) j["class_label"] = label;
    items.push_back(std::move(j));
  };

  // h001: human stick figure.
  {
    const auto fig = synthetic::make_stick_figure();
    save_png(fig.reference, images / "h001_ref.png");
    save_png(fig.sketch, images / "h001_sketch.png");
    PredictionFile ref = fig.ref_preds;
    ref.image_id = "h001_ref";
    write_json(preds / "h001.ref.json", predictions_to_json(ref));
    PredictionFile sk = synthetic::MockJointPredictor().predict(fig.sketch, ref);
    sk.image_id = "h001_sketch";
    write_json(preds / "h001.sketch.json", predictions_to_json(sk));
    add_item("h001", "Human", "Structure", "", "methodA");
  }

  // f001: face outline with 106 contour points; the sketch drops the lower
  // third of the contour.
  {
    Points pts;
    for (int i = 0; i < 106; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 106.0;
      pts.push_back({112.0 + 70.0 * std::cos(t), 112.0 + 90.0 * std::sin(t)});
    }
    ImageRecord ref = textured_background(kSize, 11);
    draw_polyline(ref, pts, true, 3.0, 60);
    synthetic::draw_line(ref, 85, 90, 100, 90, 3.0, 40);
    synthetic::draw_line(ref, 124, 90, 139, 90, 3.0, 40);
    ImageRecord sketch = make_image(kSize, kSize, 255);
    Points upper(pts.begin() + 53, pts.end());  // angles in [pi, 2pi): upper half
    upper.insert(upper.end(), pts.begin(), pts.begin() + 18);
    draw_polyline(sketch, upper, false, 1.0, 0);
    save_png(ref, images / "f001_ref.png");
    save_png(sketch, images / "f001_sketch.png");
    write_json(preds / "f001.ref.json", predictions_to_json(predictions_for(ref, "f001_ref", "face106", pts)));
    write_json(preds / "f001.sketch.json", predictions_to_json(predictions_for(sketch, "f001_sketch", "face106", pts)));
    add_item("f001", "Face", "Structure", "", "methodA");
  }

  // a001: quadruped with 20 joints; the sketch is drawn with a small shift.
  {
    const Points joints = {{60, 70},   {72, 62},   {50, 62},  {66, 50},  {54, 50},  {80, 95},   {150, 95},
                           {90, 120},  {140, 120}, {78, 150}, {155, 150}, {92, 150}, {142, 150}, {78, 185},
                           {155, 185}, {92, 185},  {142, 185}, {115, 92}, {170, 80},  {190, 70}};
    const std::vector<std::pair<int, int>> bones = {{0, 1},   {0, 2},   {1, 3},   {2, 4},   {0, 5},  {5, 17},
                                                    {17, 6},  {6, 18},  {18, 19}, {5, 7},   {6, 8},  {7, 9},
                                                    {7, 11},  {8, 10},  {8, 12},  {9, 13},  {10, 14}, {11, 15},
                                                    {12, 16}};
    ImageRecord ref = textured_background(kSize, 13);
    ImageRecord sketch = make_image(kSize, kSize, 255);
    for (const auto& [a, b] : bones) {
      synthetic::draw_line(ref, joints[a][0], joints[a][1], joints[b][0], joints[b][1], 4.0, 80);
      synthetic::draw_line(sketch, joints[a][0] + 2, joints[a][1] + 1, joints[b][0] + 2, joints[b][1] + 1, 1.0, 0);
    }
    save_png(ref, images / "a001_ref.png");
    save_png(sketch, images / "a001_sketch.png");
    write_json(preds / "a001.ref.json", predictions_to_json(predictions_for(ref, "a001_ref", "animal20", joints)));
    write_json(preds / "a001.sketch.json",
               predictions_to_json(predictions_for(sketch, "a001_sketch", "animal20", joints)));
    add_item("a001", "Animal", "Structure", "", "methodB");
  }

  // Category items: simple object outlines plus synthetic embeddings.
  std::mt19937_64 gen(2024);
  std::map<std::string, std::vector<double>> class_vec;
  for (const char* label : {"dog", "bag", "car"}) {
    class_vec[label] = random_vector(gen, 8);
    write_json(class_embedding_path(embs, label),
               embedding_to_json(embedding(label, EmbeddingKind::kText, class_vec[label])));
  }
  struct CategoryItem {
    const char* id;
    const char* domain;
    const char* label;
    const char* method;
    bool busy_sketch;
  };
  const CategoryItem cats[] = {{"a101", "Animal", "dog", "methodA", false},
                               {"t001", "Things", "bag", "methodA", false},
                               {"t002", "Things", "car", "methodB", true}};
  std::uint64_t seed = 31;
  for (const auto& c : cats) {
    ImageRecord ref = textured_background(kSize, seed++);
    ImageRecord sketch = make_image(kSize, kSize, 255);
    const Points outline = {{50, 80}, {174, 80}, {190, 170}, {34, 170}};
    draw_polyline(ref, outline, true, 5.0, 70);
    draw_polyline(sketch, outline, true, 1.0, 0);
    if (c.busy_sketch) {
      // heavy grain over the whole canvas: a sketch more complex than its photo
      std::mt19937_64 grain(seed++);
      for (auto& p : sketch.pixels) p = std::min<std::uint8_t>(p, static_cast<std::uint8_t>(96 + grain() % 160));
    }
    save_png(ref, images / (std::string(c.id) + "_ref.png"));
    save_png(sketch, images / (std::string(c.id) + "_sketch.png"));
    std::vector<double> v = class_vec[c.label];
    const auto noise = random_vector(gen, 8);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.5 * noise[i];
    write_json(sketch_embedding_path(embs, c.id), embedding_to_json(embedding(c.id, EmbeddingKind::kImage, v)));
    add_item(c.id, c.domain, "Category", c.label, c.method);
  }

  write_json(root / "manifest.json", Json{{"version", 1}, {"items", std::move(items)}});
  std::cout << "fixture written to " << root.string() << "\n";
  return 0;
}
