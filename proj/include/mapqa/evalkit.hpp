#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/qgen.hpp"
#include "mapqa/style.hpp"
#include "mapqa/tableqa.hpp"

namespace mapqa {

double jaccard(const AnswerSet& pred, const AnswerSet& gold);

// Fraction of pairs with |pred - gold| < k (strict).
double distance_at_k(const std::vector<double>& preds, const std::vector<double>& golds, double k);

struct Prediction {
  std::string question_id;
  AnswerSet answers;
  std::optional<std::string> error;
};

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::vector<Question> load_questions(const std::filesystem::path& path);

struct ExtractionScores {
  double discrete_accuracy = 0.0;
  std::size_t discrete_regions = 0;
  std::map<double, double> distance_at;
  std::size_t continuous_regions = 0;
};

struct EvalReport {
  // Keys: surface, retrieval, relational, all.
  std::map<std::string, double> jaccard;
  std::map<std::string, std::size_t> counts;
  std::optional<ExtractionScores> extraction;
};

nlohmann::json to_json(const EvalReport& r);

// Missing predictions score 0; answers are normalized before comparison.
EvalReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Question>& questions);

struct StatsReport {
  std::size_t n_images = 0;
  std::size_t n_questions = 0;
  std::map<std::string, std::size_t> per_category;
  double percent_yes_no = 0.0;
  double mean_answers_per_question = 0.0;
  std::size_t n_unique_answers = 0;
  std::size_t max_objects_per_map = 0;
};

nlohmann::json to_json(const StatsReport& r);

StatsReport question_stats(const std::vector<Question>& questions, std::size_t n_images, std::size_t max_objects);
StatsReport dataset_stats(const std::filesystem::path& dataset_dir);

struct SplitRatios {
  double train = 0.6;
  double valid = 0.2;
  double test = 0.2;
};

// Floors every share, then hands the remainder to seed-chosen splits, so each
// size is within one of its exact share.
std::map<std::string, Split> split(const std::vector<std::string>& map_ids, SplitRatios ratios,
                                   const ScalePartition& partition, std::uint64_t seed);

}  // namespace mapqa
