// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero if
// any criterion fails. Tolerances are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "../support.hpp"
#include "mapqa/evalkit.hpp"
#include "mapqa/extract.hpp"
#include "mapqa/ocrbridge.hpp"
#include "mapqa/pipeline.hpp"

using namespace mapqa;
using namespace mapqa::testing;
namespace fs = std::filesystem;

namespace {

constexpr int kDeterminismMaps = 500;
constexpr double kDeterminismBudgetSeconds = 300.0;
constexpr int kCorpusMaps = 1200;
constexpr int kMinRoundTripMaps = 100;
constexpr double kMinDistance001 = 0.99;
constexpr double kMinOverallJaccard = 0.95;
constexpr double kMissingLo = 0.25, kMissingHi = 0.31;
constexpr double kYesBalanceTolerance = 0.02;
constexpr double kYesNoLo = 0.20, kYesNoHi = 0.35;
constexpr int kClassifierTables = 1000;
constexpr double kMinNoisyRecovery = 0.90;
constexpr std::uint64_t kSeed = 20221;
constexpr std::uint64_t kNoiseSeed = 99;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator()(const std::string& key, const T& v) {
    if (!s_.str().empty()) s_ << ", ";
    s_ << key << '=' << v;
    return *this;
  }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).string();
    if (rel != "config.json") out[rel] = read_file(e.path());
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PipelineConfig corpus_config(const fs::path& out, int n) {
  PipelineConfig c;
  c.n_maps = n;
  c.master_seed = kSeed;
  c.output_dir = out;
  return c;
}

LegendEntries gold_entries(const MapInstance& m) { return {legend_entries(m), m.style.legend_kind}; }

// Legend text as drawn: swatch descriptions or colorbar labels.
std::vector<std::string> drawn_legend(const LayoutManifest& m) {
  std::vector<std::string> out;
  for (const auto& s : m.swatches) out.push_back(s.description);
  if (m.colorbar) out = m.colorbar->labels;
  return out;
}

// The shared corpus for criteria 2 to 7 and 9.
struct Corpus {
  fs::path dir;
  std::map<std::string, GoldRecord> gold;
  std::vector<Question> questions;
  fs::path tables;
};

Outcome determinism(const fs::path& root) {
  const auto t0 = std::chrono::steady_clock::now();
  cmd_generate(corpus_config(root / "a", kDeterminismMaps), 1);
  const double first = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  cmd_generate(corpus_config(root / "b", kDeterminismMaps), 1);
  const double second = seconds_since(t1);
  cmd_generate(corpus_config(root / "c", kDeterminismMaps), 4);

  const auto a = snapshot(root / "a");
  const bool same = a == snapshot(root / "b");
  const bool same_parallel = a == snapshot(root / "c");
  std::size_t pngs = 0;
  for (const auto& [rel, bytes] : a) pngs += fs::path(rel).extension() == ".png";
  fs::remove_all(root / "a");
  fs::remove_all(root / "b");
  fs::remove_all(root / "c");

  Outcome o;
  o.pass = same && same_parallel && pngs == kDeterminismMaps && first < kDeterminismBudgetSeconds &&
           second < kDeterminismBudgetSeconds;
  o.detail = Detail()("files", a.size())("identical", same)("identical_jobs4", same_parallel)("run1_s", first)(
                 "run2_s", second)
                 .str();
  return o;
}

Outcome discrete_round_trip(const Corpus& c) {
  int maps = 0;
  std::size_t regions = 0, wrong = 0, header_wrong = 0;
  for (const auto& [id, g] : c.gold) {
    if (g.map.style.legend_kind != LegendKind::Discrete) continue;
    ++maps;
    const ExtractedTable t = extracted_table_from_json(nlohmann::json::parse(read_file(c.tables / (id + ".json"))));
    const Classification& cls = *g.map.classification;
    header_wrong += t.legend_type != LegendKind::Discrete || t.n_symbols != cls.k ||
                    t.legend_order != g.map.style.legend_order || t.has_missing != g.map.table.has_missing();
    for (const auto& [rid, gold_class] : cls.assignment) {
      ++regions;
      const auto it = t.region_values.find(rid);
      if (it == t.region_values.end() || it->second.missing != !gold_class.has_value() ||
          it->second.class_index != gold_class) {
        ++wrong;
      }
    }
  }
  Outcome o;
  o.pass = maps >= kMinRoundTripMaps && wrong == 0 && header_wrong == 0;
  o.detail = Detail()("maps", maps)("regions", regions)("region_errors", wrong)("header_errors", header_wrong).str();
  return o;
}

Outcome continuous_round_trip(const Corpus& c) {
  int maps = 0;
  std::size_t missing_flag_errors = 0;
  std::vector<double> preds, golds;
  for (const auto& [id, g] : c.gold) {
    if (g.map.style.legend_kind != LegendKind::Continuous) continue;
    ++maps;
    const ExtractedTable t = extracted_table_from_json(nlohmann::json::parse(read_file(c.tables / (id + ".json"))));
    const double lo = g.map.table.observed_min();
    const double hi = g.map.table.observed_max();
    for (const auto& [rid, v] : g.map.table.values) {
      const ExtractedValue& e = t.region_values.at(rid);
      if (e.missing != !v.has_value()) ++missing_flag_errors;
      if (!v) continue;
      golds.push_back(hi > lo ? (*v - lo) / (hi - lo) : 0.0);
      preds.push_back(e.relative_value.value_or(-1.0));
    }
  }
  const double d01 = distance_at_k(preds, golds, 0.01);
  const double d05 = distance_at_k(preds, golds, 0.05);
  const double d10 = distance_at_k(preds, golds, 0.10);
  Outcome o;
  o.pass = maps >= kMinRoundTripMaps && d01 >= kMinDistance001 && d05 == 1.0 && missing_flag_errors == 0;
  o.detail = Detail()("maps", maps)("regions", golds.size())("d@0.01", d01)("d@0.05", d05)("d@0.10", d10)(
                 "missing_flag_errors", missing_flag_errors)
                 .str();
  return o;
}

Outcome end_to_end(const Corpus& c) {
  cmd_answer(c.dir, c.tables, OcrSource{}, c.dir / "pred_extracted.jsonl", 0);
  const auto preds = load_predictions(c.dir / "pred_extracted.jsonl");
  std::vector<Question> discrete_qs;
  std::set<std::string> discrete_ids;
  for (const auto& q : c.questions) {
    if (c.gold.at(q.map_id).map.style.legend_kind == LegendKind::Discrete) {
      discrete_qs.push_back(q);
      discrete_ids.insert(q.id);
    }
  }
  std::vector<Prediction> discrete_preds;
  for (const auto& p : preds) {
    if (discrete_ids.count(p.question_id)) discrete_preds.push_back(p);
  }
  const EvalReport all = evaluate(preds, c.questions);
  const EvalReport disc = evaluate(discrete_preds, discrete_qs);
  Outcome o;
  o.pass = disc.jaccard.at("all") == 1.0 && all.jaccard.at("all") >= kMinOverallJaccard;
  o.detail = Detail()("questions", c.questions.size())("discrete_questions", discrete_qs.size())(
                 "jaccard_discrete", disc.jaccard.at("all"))("jaccard_all", all.jaccard.at("all"))(
                 "srf", all.jaccard.at("surface"))("rtr", all.jaccard.at("retrieval"))("rlt", all.jaccard.at("relational"))
                 .str();
  return o;
}

Outcome self_consistency(const Corpus& c) {
  const GeoModel& geo = us_geo();
  std::size_t lib_ok = 0, oracle_ok = 0, parse_ok = 0;
  for (const auto& q : c.questions) {
    const MapInstance& m = c.gold.at(q.map_id).map;
    const QaTable view = gold_view(m.table, m.classification, m.style);
    lib_ok += execute(q.logical_form, view, geo) == q.answers;
    oracle_ok += oracle::execute(q.logical_form, view, geo) == q.answers;
    const LegendEntries entries = gold_entries(m);
    try {
      parse_ok += parse_question(preprocess_question(q.text, entries), static_cast<int>(entries.entries.size()), geo) ==
                  q.logical_form;
    } catch (const Error&) {
    }
  }
  // The shipped pipeline, gold tables in, must score exactly one.
  cmd_answer(c.dir, std::nullopt, OcrSource{}, c.dir / "pred_gold.jsonl", 0);
  const EvalReport r = cmd_evaluate(c.dir, c.dir / "pred_gold.jsonl", c.dir / "report_gold.json");
  const std::size_t n = c.questions.size();
  Outcome o;
  o.pass = n > 0 && lib_ok == n && oracle_ok == n && parse_ok == n && r.jaccard.at("all") == 1.0;
  o.detail = Detail()("questions", n)("executor_match", lib_ok)("oracle_match", oracle_ok)("parse_inverts", parse_ok)(
                 "pipeline_jaccard", r.jaccard.at("all"))
                 .str();
  return o;
}

Outcome distribution(const Corpus& c) {
  std::size_t with_missing = 0;
  for (const auto& [id, g] : c.gold) with_missing += g.map.table.has_missing();
  const double missing_frac = static_cast<double>(with_missing) / static_cast<double>(c.gold.size());

  std::map<std::string, std::pair<std::size_t, std::size_t>> yes_no;  // template -> (yes, total)
  for (const auto& q : c.questions) {
    if (q.category != Category::Relational) continue;
    const bool yes = q.answers == AnswerSet{kYes};
    const bool no = q.answers == AnswerSet{kNo};
    if (!yes && !no) continue;
    auto& [y, total] = yes_no[q.template_id];
    y += yes;
    ++total;
  }
  bool balanced = !yes_no.empty();
  Detail d;
  d("maps", c.gold.size())("missing_fraction", missing_frac);
  for (const auto& [tid, counts] : yes_no) {
    const double frac = static_cast<double>(counts.first) / static_cast<double>(counts.second);
    balanced = balanced && std::abs(frac - 0.5) <= kYesBalanceTolerance;
    d("yes[" + tid + "]", std::to_string(counts.first) + "/" + std::to_string(counts.second));
  }
  const StatsReport s = cmd_stats(c.dir);
  const double yn = s.percent_yes_no / 100.0;
  d("yes_no_fraction", yn)("answers_per_question", s.mean_answers_per_question);

  Outcome o;
  o.pass = c.gold.size() >= 1000 && missing_frac >= kMissingLo && missing_frac <= kMissingHi && balanced &&
           yn >= kYesNoLo && yn <= kYesNoHi;
  o.detail = d.str();
  return o;
}

Outcome splits(const Corpus& c) {
  std::map<Split, std::size_t> sizes;
  std::map<Split, std::set<std::string>> scales;
  for (const auto& [id, g] : c.gold) {
    ++sizes[g.map.split];
    scales[g.map.split].insert(g.map.style.scale.id);
  }
  const double n = static_cast<double>(c.gold.size());
  bool sizes_ok = std::abs(sizes[Split::Train] - 0.6 * n) <= 1.0 && std::abs(sizes[Split::Valid] - 0.2 * n) <= 1.0 &&
                  std::abs(sizes[Split::Test] - 0.2 * n) <= 1.0;
  bool disjoint = true;
  for (Split a : kAllSplits) {
    for (Split b : kAllSplits) {
      if (a == b) continue;
      for (const auto& id : scales[a]) disjoint = disjoint && !scales[b].count(id);
    }
  }
  // The split rule itself, over awkward sizes.
  for (int m : {1, 2, 7, 101, 999}) {
    std::vector<std::string> ids;
    for (int i = 0; i < m; ++i) ids.push_back(map_id_for(i));
    std::map<Split, int> got;
    for (const auto& [id, s] : split(ids, {}, default_scale_partition(), 5)) ++got[s];
    sizes_ok = sizes_ok && std::abs(got[Split::Train] - 0.6 * m) <= 1.0 && std::abs(got[Split::Valid] - 0.2 * m) <= 1.0 &&
               std::abs(got[Split::Test] - 0.2 * m) <= 1.0;
  }
  Outcome o;
  o.pass = sizes_ok && disjoint;
  o.detail = Detail()("train", sizes[Split::Train])("valid", sizes[Split::Valid])("test", sizes[Split::Test])(
                 "scales_train", scales[Split::Train].size())("scales_valid", scales[Split::Valid].size())(
                 "scales_test", scales[Split::Test].size())("disjoint", disjoint)
                 .str();
  return o;
}

Outcome metrics() {
  bool examples = std::abs(jaccard({"ny", "ca"}, {"ca", "tx"}) - 1.0 / 3) < 1e-12 && jaccard({"a", "b"}, {"a", "b"}) == 1.0 &&
                  jaccard({"a"}, {"b"}) == 0.0;
  examples = examples && std::abs(distance_at_k({0.10, 0.20, 0.50}, {0.105, 0.30, 0.50}, 0.01) - 2.0 / 3) < 1e-12 &&
             distance_at_k({0.3, 0.7}, {0.3, 0.7}, 0.01) == 1.0;

  Rng rng(kSeed);
  bool monotone = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p, g;
    for (int i = 0; i < 40; ++i) {
      p.push_back(rng.uniform());
      g.push_back(rng.uniform());
    }
    const double a = distance_at_k(p, g, 0.01), b = distance_at_k(p, g, 0.05), d = distance_at_k(p, g, 0.1);
    monotone = monotone && a <= b && b <= d;
  }

  std::size_t checked = 0, mismatches = 0, degenerate = 0;
  for (ClassScheme scheme : {ClassScheme::EqualInterval, ClassScheme::Quantile}) {
    for (int trial = 0; trial < kClassifierTables; ++trial) {
      const int k = static_cast<int>(rng.between(2, 5));
      const auto n = static_cast<std::size_t>(rng.between(2 * k, 16));
      const bool relative = rng.bernoulli(0.5);
      const std::int64_t hi = rng.bernoulli(0.5) ? 20 : 1000;
      UnderlyingTable t;
      t.kind = relative ? DataKind::Relative : DataKind::Absolute;
      t.range = canonical_range(t.kind);
      for (std::size_t i = 0; i < n; ++i) {
        const RegionId id{"r" + std::to_string(100 + i)};
        if (rng.bernoulli(0.1)) {
          t.values[id] = std::nullopt;
        } else {
          const double v = static_cast<double>(rng.between(1, hi));
          t.values[id] = relative ? v / 10.0 : v;
        }
      }
      const auto present = t.present_values();
      if (present.empty()) continue;
      ++checked;
      const auto b = oracle::breaks(present, scheme, k);
      try {
        const Classification cls = classify(t, scheme, k);
        bool ok = cls.boundaries == b;
        for (const auto& [id, v] : t.values) ok = ok && cls.assignment.at(id) == (v ? std::optional<int>(oracle::interval_of(b, *v)) : std::nullopt);
        mismatches += !ok;
      } catch (const Error& e) {
        // Legitimate only when the oracle also finds an empty class or fewer distinct values than k.
        ++degenerate;
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (double v : present) {
          const int i = oracle::interval_of(b, v);
          if (i >= 0) ++sizes[static_cast<std::size_t>(i)];
        }
        const bool empty_class = std::find(sizes.begin(), sizes.end(), 0) != sizes.end();
        std::set<std::string> descs;
        for (int i = 0; i < k; ++i) descs.insert(describe_class(t.kind, b, i));
        const bool legit = e.kind() == ErrorKind::DegenerateData &&
                           (empty_class || static_cast<int>(descs.size()) < k ||
                            static_cast<int>(std::set<double>(present.begin(), present.end()).size()) < k);
        mismatches += !legit;
      }
    }
  }
  Outcome o;
  o.pass = examples && monotone && mismatches == 0 && checked - degenerate >= kClassifierTables;
  o.detail = Detail()("examples", examples)("monotone", monotone)("tables", checked)("classified", checked - degenerate)(
                 "mismatches", mismatches)
                 .str();
  return o;
}

Outcome ocr_bridge(const Corpus& c) {
  // Oracle OCR: answers written in legend tokens map back to the gold strings.
  std::size_t restored = 0, entries_ok = 0;
  for (const auto& q : c.questions) {
    const GoldRecord& g = c.gold.at(q.map_id);
    const LegendEntries e =
        ingest_ocr(oracle_ocr(g.manifest), g.manifest.width, g.manifest.height, g.manifest.legend_bbox, g.manifest.legend_kind);
    AnswerSet tokenized;
    for (const auto& a : q.answers) tokenized.insert(normalize_answer(preprocess_question(a, e)));
    try {
      restored += postprocess_answer(tokenized, e) == q.answers;
    } catch (const Error&) {
    }
  }
  for (const auto& [id, g] : c.gold) {
    const LegendEntries e =
        ingest_ocr(oracle_ocr(g.manifest), g.manifest.width, g.manifest.height, g.manifest.legend_bbox, g.manifest.legend_kind);
    entries_ok += e.entries == drawn_legend(g.manifest);
  }

  // Noisy external OCR files, recovered entry by entry.
  const fs::path noisy = c.dir / "ocr_noisy";
  cmd_export_ocr(c.dir, noisy, kNoiseSeed);
  std::size_t total = 0, recovered = 0, maps_exact = 0;
  for (const auto& [id, g] : c.gold) {
    const auto want = drawn_legend(g.manifest);
    const LegendEntries got = ingest_ocr(load_ocr_tokens(noisy / (id + ".jsonl")), g.manifest.width, g.manifest.height,
                                         g.manifest.legend_bbox, g.manifest.legend_kind);
    std::size_t here = 0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      here += i < got.entries.size() && fuzzy_key(got.entries[i]) == fuzzy_key(want[i]);
    }
    total += want.size();
    recovered += here;
    maps_exact += here == want.size() && got.entries.size() == want.size();
  }
  const double rate = static_cast<double>(recovered) / static_cast<double>(total);

  // End to end through the noisy files, for context.
  cmd_extract(c.dir, OcrSource{noisy}, c.dir / "tables_noisy", 0);
  cmd_answer(c.dir, c.dir / "tables_noisy", OcrSource{noisy}, c.dir / "pred_noisy.jsonl", 0);
  const EvalReport r = evaluate(load_predictions(c.dir / "pred_noisy.jsonl"), c.questions);

  Outcome o;
  o.pass = restored == c.questions.size() && entries_ok == c.gold.size() && rate >= kMinNoisyRecovery;
  o.detail = Detail()("answers_restored", std::to_string(restored) + "/" + std::to_string(c.questions.size()))(
                 "oracle_legends", std::to_string(entries_ok) + "/" + std::to_string(c.gold.size()))(
                 "noisy_entry_recovery", rate)("noisy_maps_exact", static_cast<double>(maps_exact) / c.gold.size())(
                 "noisy_qa_jaccard", r.jaccard.at("all"))
                 .str();
  return o;
}

template <typename F>
bool report(int n, const std::string& name, F&& run) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = run();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  std::printf("[%s] %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), seconds_since(t0), o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main() {
  TempDir root("acceptance");
  bool ok = true;
  ok &= report(1, "determinism", [&] { return determinism(root.path()); });

  Corpus c;
  c.dir = root / "corpus";
  c.tables = c.dir / "tables";
  cmd_generate(corpus_config(c.dir, kCorpusMaps), 0);
  for (const auto& id : list_maps(c.dir)) c.gold.emplace(id, load_gold(c.dir / "gold" / (id + ".json")));
  for (Split s : kAllSplits) {
    auto qs = load_questions(c.dir / "questions" / (enum_name(s) + ".jsonl"));
    c.questions.insert(c.questions.end(), qs.begin(), qs.end());
  }
  cmd_extract(c.dir, OcrSource{}, c.tables, 0);

  ok &= report(2, "discrete round-trip", [&] { return discrete_round_trip(c); });
  ok &= report(3, "continuous round-trip", [&] { return continuous_round_trip(c); });
  ok &= report(4, "end-to-end QA with oracle OCR", [&] { return end_to_end(c); });
  ok &= report(5, "gold self-consistency", [&] { return self_consistency(c); });
  ok &= report(6, "distribution properties", [&] { return distribution(c); });
  ok &= report(7, "split correctness", [&] { return splits(c); });
  ok &= report(8, "metric and classifier suite", [] { return metrics(); });
  ok &= report(9, "OCR bridge", [&] { return ocr_bridge(c); });
  std::printf("%s\n", ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return ok ? 0 : 1;
}
