#ifndef SKETCHREF_AGGREGATION_HPP_
#define SKETCHREF_AGGREGATION_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sketchref/core.hpp"

namespace sketchref {

struct MetricRecord {
  std::string item_id;
  std::string method;
  Domain domain = Domain::kHuman;
  Task task = Task::kStructure;
  double r = 0.0;   // R_c for Category items, R_s for Structure items
  double sr = 0.0;  // simplicity ratio
  std::string complexity_method;

  bool operator==(const MetricRecord&) const = default;
};

void validate_record(const MetricRecord& rec);
Json record_to_json(const MetricRecord& rec);
MetricRecord record_from_json(const Json& j);

// One JSON object per line; blank lines are skipped.
std::string records_to_jsonl(std::span<const MetricRecord> records);
std::vector<MetricRecord> parse_metrics_jsonl(std::string_view text);
std::vector<MetricRecord> load_metrics_jsonl(const std::filesystem::path& path);

// Mean recognizability under simplification:
//   (1/N) * sum_i r_i * [sr_i > alpha]
// Filtered records stay in the denominator. Records must share
// (method, task, domain). The fold runs in item_id order so the result does
// not depend on input order.
double mrs_at_alpha(std::span<const MetricRecord> records, double alpha);

// A benchmark column: one of the five (task, domain) combinations.
struct CellKey {
  Task task = Task::kStructure;
  Domain domain = Domain::kHuman;

  // Column order: Structure Human/Face/Animal, then Category Animal/Things.
  int column() const;
  bool operator<(const CellKey& o) const { return column() < o.column(); }
  bool operator==(const CellKey& o) const = default;
};

struct ReportCell {
  std::size_t n = 0;
  std::map<double, double> mrs;  // alpha -> percentage
};

struct MethodRow {
  std::string method;
  std::map<CellKey, ReportCell> cells;
  std::map<double, double> average;  // alpha -> mean over present cells
};

struct BenchmarkReport {
  std::vector<double> alphas;  // ascending, unique
  std::vector<MethodRow> rows;  // by average at smallest alpha, descending
  Json metadata = Json::object();
};

BenchmarkReport build_report(std::span<const MetricRecord> records, std::vector<double> alphas,
                             Json metadata = Json::object());

std::string format_alpha(double alpha);

Json report_to_json(const BenchmarkReport& report);
std::string render_markdown(const BenchmarkReport& report);
std::string render_csv(const BenchmarkReport& report);

}  // namespace sketchref

#endif  // SKETCHREF_AGGREGATION_HPP_
