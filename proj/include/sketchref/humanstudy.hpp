#ifndef SKETCHREF_HUMANSTUDY_HPP_
#define SKETCHREF_HUMANSTUDY_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sketchref {

enum class ResponseMode { kRating, kRanking };

struct HumanResponse {
  std::string sketch_id;
  ResponseMode mode = ResponseMode::kRating;
  int value = 0;  // 1..5 rating, or 1..5 rank position (1 = best)
};

void validate_response(const HumanResponse& r);

// Frequency-weighted rank score over a five-option ranking. Position p carries
// weight 6 - p, so the result lies in [1, 5].
double average_rank_score(std::span<const HumanResponse> responses);

double mean_rating(std::span<const HumanResponse> responses);

// One score per sketch: mean rating or average rank score depending on the
// sketch's response mode. Sketches with fewer than `min_responses` answers,
// or mixing modes, are rejected.
std::map<std::string, double> aggregate_human_scores(std::span<const HumanResponse> responses,
                                                     std::size_t min_responses = 3);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// Tau-b, computed with Knight's O(n log n) merge-sort algorithm.
double kendall_tau(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
  double rho = 0.0;
  double tau = 0.0;
  std::size_t n = 0;
};

// Aligns the two score maps on shared ids (at least two required).
CorrelationResult correlate(const std::map<std::string, double>& metric_scores,
                            const std::map<std::string, double>& human_scores);

// CSV with header `sketch_id,score`.
std::map<std::string, double> load_score_csv(const std::filesystem::path& path);
// CSV with header `sketch_id,mode,value`; mode is `rating` or `ranking`.
std::vector<HumanResponse> load_response_csv(const std::filesystem::path& path);
// Dispatches on the header of a human-side CSV; response files are reduced
// through aggregate_human_scores.
std::map<std::string, double> load_human_scores(const std::filesystem::path& path, std::size_t min_responses = 3);

}  // namespace sketchref

#endif  // SKETCHREF_HUMANSTUDY_HPP_
