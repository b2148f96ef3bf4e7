#ifndef SKETCHREF_RUNNER_HPP_
#define SKETCHREF_RUNNER_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sketchref/aggregation.hpp"
#include "sketchref/complexity.hpp"
#include "sketchref/core.hpp"
#include "sketchref/recognizability.hpp"

namespace sketchref {

// Input file layout expected by the evaluator:
//   <predictions_dir>/<item_id>.ref.json     reference-side keypoints
//   <predictions_dir>/<item_id>.sketch.json  sketch-side keypoints
//   <embeddings_dir>/<item_id>.sketch.json   image embedding of the sketch
//   <embeddings_dir>/class.<label>.json      text embedding of the class label
std::filesystem::path ref_predictions_path(const std::filesystem::path& dir, const std::string& item_id);
std::filesystem::path sketch_predictions_path(const std::filesystem::path& dir, const std::string& item_id);
std::filesystem::path sketch_embedding_path(const std::filesystem::path& dir, const std::string& item_id);
std::filesystem::path class_embedding_path(const std::filesystem::path& dir, const std::string& label);

struct EvalConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path predictions_dir;
  std::filesystem::path embeddings_dir;
  std::string complexity_method = "compression_ratio";
  std::vector<double> alphas{0.0, 1.5};
  // auto: gt_visible_only when every reference target carries visibility
  // flags, all_points otherwise.
  std::string visibility_rule = "auto";
  std::filesystem::path schema_overrides;  // empty: built-in sigmas
  std::size_t jobs = 1;
  std::filesystem::path out_dir;

  void validate() const;
  // Only fields that affect results; jobs and output paths are left out so
  // the echo is identical across worker counts and output locations.
  Json to_json() const;
  // Accepts a bare config object or a report whose metadata carries one.
  static EvalConfig from_json(const Json& j);
};

struct LedgerEntry {
  std::string item_id;
  std::string code;
  std::string message;
};

struct EvalOutcome {
  std::vector<MetricRecord> records;  // sorted by item_id
  std::vector<LedgerEntry> ledger;    // sorted by item_id
  std::optional<BenchmarkReport> report;

  int exit_code() const { return ledger.empty() ? 0 : 1; }
};

// Shared, read-only state for scoring items.
struct EvalContext {
  EvalConfig config;
  ComplexityMethod complexity;
  SchemaRegistry schemas;
};

EvalContext make_context(const EvalConfig& config);

// Scores one item; throws on any per-item failure.
MetricRecord evaluate_item(const EvalItem& item, const EvalContext& ctx);

OksParams resolve_oks_params(const PredictionFile& ref_preds, const KeypointSchema& schema,
                             std::string_view visibility_rule);

// Loads the manifest (aborting on invalid input), scores every item on
// `config.jobs` workers, and aggregates the successful records.
EvalOutcome run_evaluate(const EvalConfig& config);
EvalOutcome run_evaluate(const EvalConfig& config, const std::vector<EvalItem>& items);

// Writes metrics.jsonl, errors.jsonl, report.json and report.md into dir.
void write_outcome(const EvalOutcome& outcome, const std::filesystem::path& dir);

std::vector<double> parse_number_list(std::string_view text);

}  // namespace sketchref

#endif  // SKETCHREF_RUNNER_HPP_
