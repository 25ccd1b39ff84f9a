#include "mapqa/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "mapqa/errors.hpp"
#include "mapqa/rng.hpp"
#include "mapqa/strings.hpp"

namespace mapqa {

using nlohmann::json;

double jaccard(const AnswerSet& pred_raw, const AnswerSet& gold_raw) {
  const AnswerSet pred = make_answer_set({pred_raw.begin(), pred_raw.end()});
  const AnswerSet gold = make_answer_set({gold_raw.begin(), gold_raw.end()});
  if (pred.empty() && gold.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& a : pred) inter += gold.count(a);
  return static_cast<double>(inter) / static_cast<double>(pred.size() + gold.size() - inter);
}

double distance_at_k(const std::vector<double>& preds, const std::vector<double>& golds, double k) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                               std::to_string(golds.size()) + " gold values");
  }
  if (preds.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += std::abs(preds[i] - golds[i]) < k ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

json to_json(const Prediction& p) {
  json j = {{"question_id", p.question_id}, {"answers", std::vector<std::string>(p.answers.begin(), p.answers.end())}};
  if (p.error) j["error"] = *p.error;
  return j;
}

Prediction prediction_from_json(const json& j) {
  Prediction p;
  p.question_id = j.at("question_id").get<std::string>();
  p.answers = make_answer_set(j.at("answers").get<std::vector<std::string>>());
  if (j.contains("error")) p.error = j.at("error").get<std::string>();
  return p;
}

namespace {

template <typename T, typename F>
std::vector<T> load_jsonl(const std::filesystem::path& path, F parse) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  return load_jsonl<Prediction>(path, [](const json& j) { return prediction_from_json(j); });
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
  return load_jsonl<Question>(path, [](const json& j) { return question_from_json(j); });
}

json to_json(const EvalReport& r) {
  json j = {{"jaccard", r.jaccard}, {"counts", r.counts}};
  if (r.extraction) {
    json d = json::object();
    for (const auto& [k, v] : r.extraction->distance_at) d[text::fixed_half_up(k, 2)] = v;
    j["extraction"] = {{"discrete_accuracy", r.extraction->discrete_accuracy},
                       {"discrete_regions", r.extraction->discrete_regions},
                       {"distance_at", d},
                       {"continuous_regions", r.extraction->continuous_regions}};
  } else {
    j["extraction"] = nullptr;
  }
  return j;
}

EvalReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Question>& questions) {
  std::map<std::string, const Question*> by_id;
  for (const auto& q : questions) by_id[q.id] = &q;
  std::map<std::string, const Prediction*> preds;
  for (const auto& p : predictions) {
    if (!by_id.count(p.question_id)) throw Error(ErrorKind::UnknownQuestion, "unknown question id '" + p.question_id + "'");
    if (!preds.emplace(p.question_id, &p).second) {
      throw Error(ErrorKind::DuplicatePrediction, "duplicate prediction for '" + p.question_id + "'");
    }
  }
  EvalReport r;
  std::map<std::string, double> sums;
  for (const char* key : {"surface", "retrieval", "relational", "all"}) {
    sums[key] = 0.0;
    r.counts[key] = 0;
  }
  for (const auto& [id, q] : by_id) {
    const auto it = preds.find(id);
    const double s = it == preds.end() ? 0.0 : jaccard(it->second->answers, q->answers);
    const std::string cat = enum_name(q->category);
    sums[cat] += s;
    sums["all"] += s;
    ++r.counts[cat];
    ++r.counts["all"];
  }
  for (const auto& [key, sum] : sums) {
    r.jaccard[key] = r.counts[key] ? sum / static_cast<double>(r.counts[key]) : 0.0;
  }
  return r;
}

json to_json(const StatsReport& r) {
  return {{"n_images", r.n_images},
          {"n_questions", r.n_questions},
          {"per_category", r.per_category},
          {"percent_yes_no", r.percent_yes_no},
          {"mean_answers_per_question", r.mean_answers_per_question},
          {"n_unique_answers", r.n_unique_answers},
          {"max_objects_per_map", r.max_objects_per_map}};
}

StatsReport question_stats(const std::vector<Question>& questions, std::size_t n_images, std::size_t max_objects) {
  StatsReport r;
  r.n_images = n_images;
  r.n_questions = questions.size();
  r.max_objects_per_map = max_objects;
  for (const char* key : {"surface", "retrieval", "relational"}) r.per_category[key] = 0;
  std::set<std::string> unique;
  std::size_t yes_no = 0;
  std::size_t answers = 0;
  for (const auto& q : questions) {
    ++r.per_category[enum_name(q.category)];
    if (q.answers == AnswerSet{kYes} || q.answers == AnswerSet{kNo}) ++yes_no;
    answers += q.answers.size();
    unique.insert(q.answers.begin(), q.answers.end());
  }
  r.n_unique_answers = unique.size();
  if (!questions.empty()) {
    r.percent_yes_no = 100.0 * static_cast<double>(yes_no) / static_cast<double>(questions.size());
    r.mean_answers_per_question = static_cast<double>(answers) / static_cast<double>(questions.size());
  }
  return r;
}

StatsReport dataset_stats(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir / "gold") || !fs::is_directory(dir / "questions")) {
    throw Error(ErrorKind::ParseError, dir.string() + " is not a dataset directory");
  }
  std::size_t n_images = 0;
  std::size_t max_objects = 0;
  for (const auto& e : fs::directory_iterator(dir / "gold")) {
    if (e.path().extension() != ".json") continue;
    std::ifstream in(e.path());
    try {
      const json g = json::parse(in);
      ++n_images;
      max_objects = std::max(max_objects, g.at("table").at("values").size());
    } catch (const json::exception& ex) {
      throw Error(ErrorKind::ParseError, e.path().string() + ": " + ex.what());
    }
  }
  std::vector<Question> all;
  for (Split s : kAllSplits) {
    const auto path = dir / "questions" / (enum_name(s) + ".jsonl");
    if (!fs::exists(path)) continue;
    auto qs = load_questions(path);
    all.insert(all.end(), std::make_move_iterator(qs.begin()), std::make_move_iterator(qs.end()));
  }
  return question_stats(all, n_images, max_objects);
}

std::map<std::string, Split> split(const std::vector<std::string>& map_ids, SplitRatios ratios,
                                   const ScalePartition& partition, std::uint64_t seed) {
  const std::vector<double> shares = {ratios.train, ratios.valid, ratios.test};
  if (std::any_of(shares.begin(), shares.end(), [](double r) { return r < 0.0; }) ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorKind::ConfigError, "split ratios must be nonnegative and sum to 1");
  }
  for (Split s : kAllSplits) {
    const auto it = partition.find(s);
    if (it == partition.end() || it->second.empty()) {
      throw Error(ErrorKind::EmptyPartitionCell, "scale partition has no scales for '" + enum_name(s) + "'");
    }
  }
  const std::size_t n = map_ids.size();
  std::vector<std::size_t> sizes;
  std::size_t assigned = 0;
  for (double r : shares) {
    sizes.push_back(static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9)));
    assigned += sizes.back();
  }
  Rng rng(mix_seed(seed, "split"));
  std::vector<std::size_t> order = {0, 1, 2};
  rng.shuffle(order);
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];

  std::vector<std::string> ids = map_ids;
  std::sort(ids.begin(), ids.end());
  rng.shuffle(ids);
  std::map<std::string, Split> out;
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < sizes[s]; ++i) out[ids[cursor++]] = kAllSplits[s];
  }
  return out;
}

}  // namespace mapqa
