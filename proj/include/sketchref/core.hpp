#ifndef SKETCHREF_CORE_HPP_
#define SKETCHREF_CORE_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sketchref/image.hpp"

namespace sketchref {

using Json = nlohmann::json;

enum class Domain { kHuman, kFace, kAnimal, kThings };
enum class Task { kCategory, kStructure };

std::string_view to_string(Domain d);
std::string_view to_string(Task t);
Domain parse_domain(std::string_view s);
Task parse_task(std::string_view s);

// One benchmark unit: a reference photo, the sketch synthesized from it, and
// the labels needed to score it. Images are shared read-only.
struct EvalItem {
  std::string id;
  Domain domain = Domain::kHuman;
  Task task = Task::kStructure;
  std::string class_label;
  std::shared_ptr<const ImageRecord> ref;
  std::shared_ptr<const ImageRecord> sketch;
  std::string method;
};

// Throws Error(kValidation) when the task/domain/label combination is not one
// of the five benchmark tasks.
void validate_item(const EvalItem& item);

// Manifest JSON: {version, items:[{id, domain, task, class_label?, ref_path,
// sketch_path, method}]}. Relative paths resolve against the manifest's
// directory. Every referenced image is decoded during loading.
std::vector<EvalItem> load_manifest(const std::filesystem::path& path);
std::vector<EvalItem> parse_manifest(const Json& doc, const std::filesystem::path& base_dir);
Json manifest_to_json(const std::vector<EvalItem>& items);

// ---- keypoints ------------------------------------------------------------

// Falloff constants k_i are used directly in exp(-d^2 / (2 s^2 k_i^2)).
struct KeypointSchema {
  std::string name;
  std::size_t point_count = 0;
  std::vector<double> sigmas;

  bool operator==(const KeypointSchema&) const = default;
};

void validate_schema(const KeypointSchema& schema);

// Built-in schemas: coco17, face106, animal20.
//
// coco17 stores 2x the published COCO per-keypoint sigmas, which is exactly
// the constant the COCO evaluator places in the exponent. face106 and
// animal20 have no standard table and default to a uniform 0.05.
KeypointSchema builtin_schema(std::string_view name);

// Schema lookup with optional sigma overrides loaded from JSON of the form
// {"face106": {"sigmas": [...]}, ...}.
class SchemaRegistry {
 public:
  SchemaRegistry();
  static SchemaRegistry from_file(const std::filesystem::path& path);
  void apply_overrides(const Json& doc);

  const KeypointSchema& get(std::string_view name) const;
  const KeypointSchema& for_domain(Domain d) const;

 private:
  std::map<std::string, KeypointSchema, std::less<>> schemas_;
};

std::string_view schema_name_for_domain(Domain d);

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool operator==(const Keypoint&) const = default;
};

struct TargetKeypoints {
  std::array<double, 4> bbox{};  // x, y, w, h
  double score = 0.0;
  std::vector<Keypoint> points;
  std::optional<std::vector<int>> visibility;

  double area() const { return bbox[2] * bbox[3]; }
  bool operator==(const TargetKeypoints&) const = default;
};

struct PredictionFile {
  std::string image_id;
  std::string schema;
  std::vector<TargetKeypoints> targets;

  bool operator==(const PredictionFile&) const = default;
};

PredictionFile parse_predictions(const Json& doc, const KeypointSchema& schema);
PredictionFile load_predictions(const std::filesystem::path& path, const KeypointSchema& schema);
Json predictions_to_json(const PredictionFile& preds);

// ---- embeddings -------------------------------------------------------------

enum class EmbeddingKind { kImage, kText };

std::string_view to_string(EmbeddingKind k);

struct EmbeddingRecord {
  std::string key;
  EmbeddingKind kind = EmbeddingKind::kImage;
  std::string model_id;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingRecord&) const = default;
};

EmbeddingRecord parse_embedding(const Json& doc);
EmbeddingRecord load_embedding(const std::filesystem::path& path);
Json embedding_to_json(const EmbeddingRecord& rec);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace sketchref

#endif  // SKETCHREF_CORE_HPP_
