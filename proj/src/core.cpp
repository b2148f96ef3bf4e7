#include "sketchref/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sketchref/error.hpp"

namespace sketchref {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::kParse, where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string()) fail(ErrorCode::kParse, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(ErrorCode::kParse, where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ErrorCode::kValidation, where + ": non-finite number");
  return d;
}

// Published COCO keypoint sigmas (nose, eyes, ears, shoulders, elbows,
// wrists, hips, knees, ankles).
constexpr std::array<double, 17> kCocoSigmas = {
    .026, .025, .025, .035, .035, .079, .079, .072, .072,
    .062, .062, .107, .107, .087, .087, .089, .089};

constexpr double kUniformSigma = 0.05;

}  // namespace

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kHuman: return "Human";
    case Domain::kFace: return "Face";
    case Domain::kAnimal: return "Animal";
    case Domain::kThings: return "Things";
  }
  return "?";
}

std::string_view to_string(Task t) {
  return t == Task::kCategory ? "Category" : "Structure";
}

std::string_view to_string(EmbeddingKind k) {
  return k == EmbeddingKind::kImage ? "image" : "text";
}

Domain parse_domain(std::string_view s) {
  const std::string l = lower(s);
  if (l == "human") return Domain::kHuman;
  if (l == "face") return Domain::kFace;
  if (l == "animal") return Domain::kAnimal;
  if (l == "things") return Domain::kThings;
  fail(ErrorCode::kParse, "unknown domain '" + std::string(s) + "'");
}

Task parse_task(std::string_view s) {
  const std::string l = lower(s);
  if (l == "category") return Task::kCategory;
  if (l == "structure") return Task::kStructure;
  fail(ErrorCode::kParse, "unknown task '" + std::string(s) + "'");
}

void validate_item(const EvalItem& item) {
  const std::string where = "item '" + item.id + "'";
  if (item.id.empty()) fail(ErrorCode::kValidation, "item with empty id");
  if (item.task == Task::kCategory) {
    if (item.class_label.empty()) fail(ErrorCode::kValidation, where + ": Category task requires class_label");
    if (item.domain != Domain::kAnimal && item.domain != Domain::kThings) {
      fail(ErrorCode::kValidation, where + ": Category task only defined for Animal and Things");
    }
  } else if (item.domain == Domain::kThings) {
    fail(ErrorCode::kValidation, where + ": Structure task not defined for Things");
  }
}

std::vector<EvalItem> parse_manifest(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail(ErrorCode::kParse, "manifest must be a JSON object");
  require(doc, "version", "manifest");
  const Json& items = require(doc, "items", "manifest");
  if (!items.is_array()) fail(ErrorCode::kParse, "manifest: 'items' must be an array");

  std::vector<EvalItem> out;
  std::set<std::string, std::less<>> seen;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Json& j = items[i];
    const std::string where = "manifest item #" + std::to_string(i);
    if (!j.is_object()) fail(ErrorCode::kParse, where + ": not an object");
    EvalItem item;
    item.id = require_string(j, "id", where);
    if (!seen.insert(item.id).second) fail(ErrorCode::kDuplicateId, "duplicate item id '" + item.id + "'");
    item.domain = parse_domain(require_string(j, "domain", where));
    item.task = parse_task(require_string(j, "task", where));
    if (auto it = j.find("class_label"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) fail(ErrorCode::kParse, where + ": class_label must be a string");
      item.class_label = it->get<std::string>();
    }
    item.method = require_string(j, "method", where);
    validate_item(item);

    auto resolve = [&](const char* key) {
      std::filesystem::path p = require_string(j, key, where);
      if (p.is_relative()) p = base_dir / p;
      if (!std::filesystem::exists(p)) {
        fail(ErrorCode::kIo, where + ": " + key + " '" + p.string() + "' does not exist");
      }
      return p;
    };
    const auto ref_path = resolve("ref_path");
    const auto sketch_path = resolve("sketch_path");
    item.ref = std::make_shared<const ImageRecord>(load_image(ref_path, item.id + ":ref"));
    item.sketch = std::make_shared<const ImageRecord>(load_image(sketch_path, item.id + ":sketch"));
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<EvalItem> load_manifest(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  return parse_manifest(doc, path.parent_path());
}

Json manifest_to_json(const std::vector<EvalItem>& items) {
  Json arr = Json::array();
  for (const auto& item : items) {
    Json j = {
        {"id", item.id},
        {"domain", to_string(item.domain)},
        {"task", to_string(item.task)},
        {"ref_path", item.ref ? item.ref->path.string() : std::string()},
        {"sketch_path", item.sketch ? item.sketch->path.string() : std::string()},
        {"method", item.method},
    };
    if (!item.class_label.empty()) j["class_label"] = item.class_label;
    arr.push_back(std::move(j));
  }
  return Json{{"version", 1}, {"items", std::move(arr)}};
}

// ---- schemas ----------------------------------------------------------------

void validate_schema(const KeypointSchema& schema) {
  static const std::map<std::string, std::size_t, std::less<>> kCounts = {
      {"coco17", 17}, {"face106", 106}, {"animal20", 20}};
  auto it = kCounts.find(schema.name);
  if (it == kCounts.end()) fail(ErrorCode::kValidation, "unknown keypoint schema '" + schema.name + "'");
  if (schema.point_count != it->second) {
    fail(ErrorCode::kValidation, "schema " + schema.name + " must have " + std::to_string(it->second) + " points");
  }
  if (schema.sigmas.size() != schema.point_count) {
    fail(ErrorCode::kValidation, "schema " + schema.name + ": sigma count != point count");
  }
  for (double s : schema.sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCode::kValidation, "schema " + schema.name + ": sigmas must be > 0");
  }
}

KeypointSchema builtin_schema(std::string_view name) {
  KeypointSchema s;
  s.name = std::string(name);
  if (name == "coco17") {
    s.point_count = 17;
    for (double v : kCocoSigmas) s.sigmas.push_back(2.0 * v);
  } else if (name == "face106") {
    s.point_count = 106;
    s.sigmas.assign(106, kUniformSigma);
  } else if (name == "animal20") {
    s.point_count = 20;
    s.sigmas.assign(20, kUniformSigma);
  } else {
    fail(ErrorCode::kValidation, "unknown keypoint schema '" + s.name + "'");
  }
  return s;
}

std::string_view schema_name_for_domain(Domain d) {
  switch (d) {
    case Domain::kHuman: return "coco17";
    case Domain::kFace: return "face106";
    case Domain::kAnimal: return "animal20";
    case Domain::kThings: break;
  }
  fail(ErrorCode::kValidation, "domain Things has no keypoint schema");
}

SchemaRegistry::SchemaRegistry() {
  for (const char* name : {"coco17", "face106", "animal20"}) schemas_.emplace(name, builtin_schema(name));
}

SchemaRegistry SchemaRegistry::from_file(const std::filesystem::path& path) {
  SchemaRegistry reg;
  reg.apply_overrides(read_json_file(path));
  return reg;
}

void SchemaRegistry::apply_overrides(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::kParse, "schema override file must be a JSON object");
  for (const auto& [name, body] : doc.items()) {
    KeypointSchema s = builtin_schema(name);
    const Json& sig = require(body, "sigmas", "schema override '" + name + "'");
    if (!sig.is_array()) fail(ErrorCode::kParse, "schema override '" + name + "': sigmas must be an array");
    s.sigmas.clear();
    for (const auto& v : sig) s.sigmas.push_back(as_number(v, "schema override '" + name + "'"));
    validate_schema(s);
    schemas_[name] = std::move(s);
  }
}

const KeypointSchema& SchemaRegistry::get(std::string_view name) const {
  auto it = schemas_.find(name);
  if (it == schemas_.end()) fail(ErrorCode::kValidation, "unknown keypoint schema '" + std::string(name) + "'");
  return it->second;
}

const KeypointSchema& SchemaRegistry::for_domain(Domain d) const {
  return get(schema_name_for_domain(d));
}

// ---- predictions ------------------------------------------------------------

PredictionFile parse_predictions(const Json& doc, const KeypointSchema& schema) {
  if (!doc.is_object()) fail(ErrorCode::kParse, "prediction file must be a JSON object");
  PredictionFile pf;
  pf.image_id = require_string(doc, "image_id", "prediction file");
  pf.schema = require_string(doc, "schema", "prediction file");
  if (pf.schema != schema.name) {
    fail(ErrorCode::kSchemaMismatch,
         "prediction file '" + pf.image_id + "' declares schema " + pf.schema + ", expected " + schema.name);
  }
  const Json& targets = require(doc, "targets", "prediction file");
  if (!targets.is_array()) fail(ErrorCode::kParse, "prediction file: 'targets' must be an array");

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Json& tj = targets[t];
    const std::string where = "prediction file '" + pf.image_id + "' target #" + std::to_string(t);
    TargetKeypoints target;

    const Json& bbox = require(tj, "bbox", where);
    if (!bbox.is_array() || bbox.size() != 4) fail(ErrorCode::kParse, where + ": bbox must be [x, y, w, h]");
    for (std::size_t i = 0; i < 4; ++i) target.bbox[i] = as_number(bbox[i], where + " bbox");
    if (!(target.bbox[2] > 0.0) || !(target.bbox[3] > 0.0)) {
      fail(ErrorCode::kValidation, where + ": bbox extent must be positive");
    }
    if (auto it = tj.find("score"); it != tj.end()) target.score = as_number(*it, where + " score");

    const Json& kps = require(tj, "keypoints", where);
    if (!kps.is_array()) fail(ErrorCode::kParse, where + ": keypoints must be an array");
    if (kps.size() != schema.point_count) {
      fail(ErrorCode::kSchemaMismatch, where + ": has " + std::to_string(kps.size()) + " keypoints, schema " +
                                           schema.name + " requires " + std::to_string(schema.point_count));
    }
    target.points.reserve(kps.size());
    for (const auto& kp : kps) {
      if (!kp.is_array() || kp.size() != 3) fail(ErrorCode::kParse, where + ": keypoint must be [x, y, conf]");
      Keypoint p{as_number(kp[0], where), as_number(kp[1], where), as_number(kp[2], where)};
      if (p.confidence < 0.0 || p.confidence > 1.0) fail(ErrorCode::kValidation, where + ": confidence outside [0, 1]");
      target.points.push_back(p);
    }

    if (auto it = tj.find("visibility"); it != tj.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != schema.point_count) {
        fail(ErrorCode::kSchemaMismatch, where + ": visibility length must equal point count");
      }
      std::vector<int> vis;
      for (const auto& v : *it) {
        if (!v.is_number_integer()) fail(ErrorCode::kParse, where + ": visibility flags must be integers");
        const int f = v.get<int>();
        if (f < 0 || f > 2) fail(ErrorCode::kValidation, where + ": visibility flag outside {0,1,2}");
        vis.push_back(f);
      }
      target.visibility = std::move(vis);
    }
    pf.targets.push_back(std::move(target));
  }
  return pf;
}

PredictionFile load_predictions(const std::filesystem::path& path, const KeypointSchema& schema) {
  try {
    return parse_predictions(read_json_file(path), schema);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Json predictions_to_json(const PredictionFile& preds) {
  Json targets = Json::array();
  for (const auto& t : preds.targets) {
    Json kps = Json::array();
    for (const auto& p : t.points) kps.push_back({p.x, p.y, p.confidence});
    Json tj = {{"bbox", t.bbox}, {"score", t.score}, {"keypoints", std::move(kps)}};
    if (t.visibility) tj["visibility"] = *t.visibility;
    targets.push_back(std::move(tj));
  }
  return Json{{"image_id", preds.image_id}, {"schema", preds.schema}, {"targets", std::move(targets)}};
}

// ---- embeddings -------------------------------------------------------------

EmbeddingRecord parse_embedding(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::kParse, "embedding file must be a JSON object");
  EmbeddingRecord rec;
  rec.key = require_string(doc, "key", "embedding");
  const std::string where = "embedding '" + rec.key + "'";
  const std::string kind = require_string(doc, "kind", where);
  if (kind == "image") {
    rec.kind = EmbeddingKind::kImage;
  } else if (kind == "text") {
    rec.kind = EmbeddingKind::kText;
  } else {
    fail(ErrorCode::kParse, where + ": kind must be 'image' or 'text'");
  }
  rec.model_id = require_string(doc, "model_id", where);
  const Json& dim = require(doc, "dim", where);
  if (!dim.is_number_integer() || dim.get<long long>() <= 0) fail(ErrorCode::kValidation, where + ": dim must be a positive integer");
  const Json& values = require(doc, "values", where);
  if (!values.is_array()) fail(ErrorCode::kParse, where + ": values must be an array");
  if (values.size() != dim.get<std::size_t>()) {
    fail(ErrorCode::kDimMismatch, where + ": declares dim " + std::to_string(dim.get<long long>()) + " but has " +
                                      std::to_string(values.size()) + " values");
  }
  rec.values.reserve(values.size());
  double norm2 = 0.0;
  for (const auto& v : values) {
    const double d = as_number(v, where);
    norm2 += d * d;
    rec.values.push_back(d);
  }
  if (!(norm2 > 0.0)) fail(ErrorCode::kZeroVector, where + ": zero vector (cosine undefined)");
  return rec;
}

EmbeddingRecord load_embedding(const std::filesystem::path& path) {
  try {
    return parse_embedding(read_json_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Json embedding_to_json(const EmbeddingRecord& rec) {
  return Json{{"key", rec.key},     {"kind", to_string(rec.kind)}, {"model_id", rec.model_id},
              {"dim", rec.dim()},   {"values", rec.values}};
}

// ---- files --------------------------------------------------------------------

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace sketchref
