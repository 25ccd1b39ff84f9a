#include "mapqa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "mapqa/errors.hpp"
#include "mapqa/extract.hpp"
#include "mapqa/ocrbridge.hpp"
#include "mapqa/rng.hpp"

namespace mapqa {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const PipelineConfig& c) {
  return {{"geography", c.geography.string()},
          {"lexicon", c.lexicon.string()},
          {"style_mode", c.style_mode == StyleMode::Uniform ? "uniform" : "varied"},
          {"data_mode", c.csv ? "csv:" + c.csv->string() : std::string("synthetic")},
          {"csv_kind", c.csv_kind},
          {"n_maps", c.n_maps},
          {"questions_per_map", c.questions_per_map},
          {"master_seed", c.master_seed},
          {"output_dir", c.output_dir.string()},
          {"canvas", {c.canvas_width, c.canvas_height}},
          {"scale_partition", partition_to_json(c.scale_partition)},
          {"split_ratios", {c.split_ratios.train, c.split_ratios.valid, c.split_ratios.test}},
          {"missing_map_probability", c.missing_map_probability},
          {"continuous_margin", c.continuous_margin}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    if (j.contains("geography")) c.geography = j.at("geography").get<std::string>();
    if (j.contains("lexicon")) c.lexicon = j.at("lexicon").get<std::string>();
    if (j.contains("style_mode")) {
      const auto mode = j.at("style_mode").get<std::string>();
      if (mode != "uniform" && mode != "varied") throw Error(ErrorKind::ConfigError, "unknown style_mode '" + mode + "'");
      c.style_mode = mode == "uniform" ? StyleMode::Uniform : StyleMode::Varied;
    }
    if (j.contains("data_mode")) {
      const auto mode = j.at("data_mode").get<std::string>();
      if (mode.rfind("csv:", 0) == 0) {
        c.csv = fs::path(mode.substr(4));
      } else if (mode != "synthetic") {
        throw Error(ErrorKind::ConfigError, "unknown data_mode '" + mode + "'");
      }
    }
    if (j.contains("csv_kind")) c.csv_kind = j.at("csv_kind").get<std::string>();
    if (j.contains("n_maps")) c.n_maps = j.at("n_maps").get<int>();
    if (j.contains("questions_per_map")) c.questions_per_map = j.at("questions_per_map").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("canvas")) {
      c.canvas_width = j.at("canvas").at(0).get<int>();
      c.canvas_height = j.at("canvas").at(1).get<int>();
    }
    if (j.contains("scale_partition")) c.scale_partition = partition_from_json(j.at("scale_partition"));
    if (j.contains("split_ratios")) {
      const auto& r = j.at("split_ratios");
      c.split_ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    }
    if (j.contains("missing_map_probability")) c.missing_map_probability = j.at("missing_map_probability").get<double>();
    if (j.contains("continuous_margin")) c.continuous_margin = j.at("continuous_margin").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad config: ") + e.what());
  }
  if (c.n_maps < 1) throw Error(ErrorKind::ConfigError, "n_maps must be positive");
  if (c.csv_kind != "auto" && c.csv_kind != "absolute" && c.csv_kind != "relative") {
    throw Error(ErrorKind::ConfigError, "csv_kind must be auto, absolute or relative");
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::optional<std::size_t> failed_at;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failed_at || i < *failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::string map_id_for(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "map_%06d", index);
  return buf;
}

OcrSource parse_ocr_source(const std::string& arg) {
  if (arg == "oracle") return {};
  return {fs::path(arg)};
}

json gold_json(const MapInstance& map, const LayoutManifest& manifest) {
  return {{"map_id", map.map_id},
          {"split", map.split},
          {"table", to_json(map.table)},
          {"classification", map.classification ? to_json(*map.classification) : json(nullptr)},
          {"style", to_json(map.style)},
          {"manifest", to_json(manifest)}};
}

GoldRecord load_gold(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.string());
  try {
    const json j = json::parse(in);
    GoldRecord g;
    g.map.map_id = j.at("map_id").get<std::string>();
    g.map.split = parse_enum(j.at("split").get<std::string>(), kAllSplits);
    g.map.table = table_from_json(j.at("table"));
    if (!j.at("classification").is_null()) g.map.classification = classification_from_json(j.at("classification"));
    g.map.style = style_from_json(j.at("style"));
    g.manifest = manifest_from_json(j.at("manifest"));
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, file.string() + ": " + e.what());
  }
}

std::vector<std::string> list_maps(const fs::path& dataset) {
  const fs::path gold = dataset / "gold";
  if (!fs::is_directory(gold)) throw Error(ErrorKind::IoError, dataset.string() + " has no gold/ directory");
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(gold)) {
    if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

fs::path map_image_path(const fs::path& dataset, const MapInstance& map) {
  return dataset / "maps" / enum_name(map.split) / (map.map_id + ".png");
}

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
}

std::vector<fs::path> csv_files(const fs::path& source) {
  std::vector<fs::path> files;
  if (fs::is_directory(source)) {
    for (const auto& e : fs::directory_iterator(source)) {
      if (e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(source)) {
    files.push_back(source);
  }
  if (files.empty()) throw Error(ErrorKind::ConfigError, "no CSV input at " + source.string());
  return files;
}

UnderlyingTable load_csv_table(const GeoModel& geo, const fs::path& file, const std::string& kind_name) {
  if (kind_name != "auto") return ingest_table(geo, file, parse_data_kind(kind_name)).table;
  auto abs = ingest_table(geo, file, DataKind::Absolute).table;
  const auto vs = abs.present_values();
  const bool pct = !vs.empty() && *std::max_element(vs.begin(), vs.end()) <= 100.0;
  return pct ? ingest_table(geo, file, DataKind::Relative).table : abs;
}

// Tries the drawn scheme with k, k-1, ..., 2, then the other scheme.
std::optional<Classification> classify_with_fallback(const UnderlyingTable& t, ClassScheme scheme, int k) {
  for (ClassScheme s : {scheme, scheme == ClassScheme::Quantile ? ClassScheme::EqualInterval : ClassScheme::Quantile}) {
    for (int kk = k; kk >= 2; --kk) {
      try {
        return classify(t, s, kk);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateData) throw;
      }
    }
  }
  return std::nullopt;
}

struct MapOutput {
  std::vector<Question> questions;
  std::map<std::string, int> skipped;
  std::vector<std::string> notes;
};

std::vector<Question> load_all_questions(const fs::path& dataset, const std::optional<Split>& only = std::nullopt) {
  std::vector<Question> out;
  for (Split s : kAllSplits) {
    if (only && *only != s) continue;
    const auto path = dataset / "questions" / (enum_name(s) + ".jsonl");
    if (!fs::exists(path)) continue;
    auto qs = load_questions(path);
    out.insert(out.end(), std::make_move_iterator(qs.begin()), std::make_move_iterator(qs.end()));
  }
  return out;
}

PipelineConfig dataset_config(const fs::path& dataset) { return load_config(dataset / "config.json"); }

LegendEntries legend_entries_for(const GoldRecord& g, const OcrSource& ocr) {
  std::vector<OcrToken> tokens;
  if (ocr.dir) {
    const fs::path file = *ocr.dir / (g.map.map_id + ".jsonl");
    if (!fs::exists(file)) throw Error(ErrorKind::MissingOcrFile, "no OCR file for map " + g.map.map_id);
    tokens = load_ocr_tokens(file);
  } else {
    tokens = oracle_ocr(g.manifest);
  }
  return ingest_ocr(tokens, g.manifest.width, g.manifest.height, g.manifest.legend_bbox, g.manifest.legend_kind);
}

}  // namespace

void cmd_generate(const PipelineConfig& config, unsigned jobs) {
  const GeoModel geo = load_geography(config.geography);
  const auto lexicon = load_lexicon(config.lexicon);
  const bool uniform = config.style_mode == StyleMode::Uniform;
  const StyleConfig styles = uniform ? uniform_style_config() : varied_style_config(config.scale_partition);
  validate_partition(styles.partition, uniform);
  const std::vector<fs::path> csvs = config.csv ? csv_files(*config.csv) : std::vector<fs::path>{};

  std::vector<std::string> ids;
  for (int i = 0; i < config.n_maps; ++i) ids.push_back(map_id_for(i + 1));
  const auto splits = split(ids, config.split_ratios, styles.partition, mix_seed(config.master_seed, "split"));

  const fs::path out = config.output_dir;
  for (Split s : kAllSplits) fs::create_directories(out / "maps" / enum_name(s));
  fs::create_directories(out / "gold");
  fs::create_directories(out / "questions");

  QgenConfig qcfg;
  qcfg.per_map_quota = config.questions_per_map;
  qcfg.continuous_margin = config.continuous_margin;
  MissingPolicy missing;
  missing.map_probability = config.missing_map_probability;

  std::vector<MapOutput> outputs(ids.size());
  std::vector<LegendKind> kinds(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    MapInstance map;
    map.map_id = ids[i];
    map.split = splits.at(map.map_id);
    const std::uint64_t seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(i + 1));
    Rng axes(mix_seed(seed, "axes"));
    const DataKind kind = axes.bernoulli(0.5) ? DataKind::Absolute : DataKind::Relative;
    const Distribution dist = axes.bernoulli(0.5) ? Distribution::Uniform : Distribution::Normal;
    const ClassScheme scheme = axes.bernoulli(0.5) ? ClassScheme::EqualInterval : ClassScheme::Quantile;
    const int k = static_cast<int>(axes.between(2, 5));
    try {
      if (csvs.empty()) {
        map.table = sample_table(geo, kind, dist, missing, mix_seed(seed, "data"));
      } else {
        map.table = load_csv_table(geo, csvs[i % csvs.size()], config.csv_kind);
      }
      map.table.title = make_title(map.table.kind, lexicon, mix_seed(seed, "title"));
      map.style = choose_style(styles, map.split, mix_seed(seed, "style"));
      if (map.style.legend_kind == LegendKind::Discrete) {
        map.classification = classify_with_fallback(map.table, scheme, k);
        if (!map.classification) {
          if (uniform) throw Error(ErrorKind::DegenerateData, "too few distinct values to classify");
          map.style.legend_kind = LegendKind::Continuous;
          outputs[i].notes.push_back("classification impossible; drawn with a continuous legend");
        }
      }
      const RenderedMap rendered =
          render_map(geo, map.table, map.classification, map.style, {config.canvas_width, config.canvas_height});
      write_png(rendered.image, map_image_path(out, map));
      write_text(out / "gold" / (map.map_id + ".json"), gold_json(map, rendered.manifest).dump(1) + "\n");
      std::vector<SkippedSlot> skipped;
      outputs[i].questions = generate_questions(map, geo, qcfg, mix_seed(seed, "questions"), &skipped);
      for (const auto& s : skipped) ++outputs[i].skipped[s.reason];
      kinds[i] = map.style.legend_kind;
    } catch (const Error& e) {
      throw Error(e.kind(), map.map_id + ": " + e.what());
    }
  });

  std::map<std::string, LegendKind> kind_of;
  for (std::size_t i = 0; i < ids.size(); ++i) kind_of[ids[i]] = kinds[i];
  json log = {{"skipped_slots", json::object()}, {"notes", json::object()}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const auto& [reason, n] : outputs[i].skipped) {
      log["skipped_slots"][reason] = log["skipped_slots"].value(reason, 0) + n;
    }
    if (!outputs[i].notes.empty()) log["notes"][ids[i]] = outputs[i].notes;
  }
  for (Split s : kAllSplits) {
    std::vector<Question> qs;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (splits.at(ids[i]) != s) continue;
      qs.insert(qs.end(), outputs[i].questions.begin(), outputs[i].questions.end());
    }
    qs = postprocess(std::move(qs), [&](const std::string& id) { return kind_of.at(id); },
                     mix_seed(config.master_seed, "postprocess/" + enum_name(s)));
    std::string body;
    for (const auto& q : qs) body += to_json(q).dump() + "\n";
    write_text(out / "questions" / (enum_name(s) + ".jsonl"), body);
  }
  write_text(out / "generation_log.json", log.dump(1) + "\n");
  write_text(out / "config.json", to_json(config).dump(1) + "\n");
}

void cmd_extract(const fs::path& dataset, const OcrSource& ocr, const fs::path& out_dir, unsigned jobs) {
  const GeoModel geo = load_geography(dataset_config(dataset).geography);
  const auto ids = list_maps(dataset);
  if (ocr.dir) {
    for (const auto& id : ids) {
      if (!fs::exists(*ocr.dir / (id + ".jsonl"))) throw Error(ErrorKind::MissingOcrFile, "no OCR file for map " + id);
    }
  }
  fs::create_directories(out_dir);
  const auto queries = standard_queries(geo);
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const GoldRecord g = load_gold(dataset / "gold" / (ids[i] + ".json"));
    const Image image = read_png(map_image_path(dataset, g.map));
    LegendLayout layout = layout_from_manifest(g.manifest);
    if (ocr.dir) layout.labels = legend_entries_for(g, ocr).entries;
    ExtractedTable t = extract_table(image, layout, queries);
    t.map_id = g.map.map_id;
    write_text(out_dir / (t.map_id + ".json"), to_json(t).dump(1) + "\n");
  });
}

void cmd_answer(const fs::path& dataset, const std::optional<fs::path>& tables_dir, const OcrSource& ocr,
                const fs::path& out_file, unsigned jobs) {
  const GeoModel geo = load_geography(dataset_config(dataset).geography);
  const auto questions = load_all_questions(dataset);
  std::map<std::string, std::vector<const Question*>> by_map;
  for (const auto& q : questions) by_map[q.map_id].push_back(&q);
  std::vector<std::string> map_ids;
  for (const auto& [id, qs] : by_map) map_ids.push_back(id);

  std::vector<std::vector<Prediction>> results(map_ids.size());
  parallel_for(map_ids.size(), jobs, [&](std::size_t i) {
    const std::string& id = map_ids[i];
    const fs::path gold_file = dataset / "gold" / (id + ".json");
    if (!fs::exists(gold_file)) throw Error(ErrorKind::UnknownQuestion, "questions reference unknown map " + id);
    const GoldRecord g = load_gold(gold_file);
    const LegendEntries entries = legend_entries_for(g, ocr);
    QaTable view;
    if (tables_dir) {
      std::ifstream in(*tables_dir / (id + ".json"));
      if (!in) throw Error(ErrorKind::IoError, "no extracted table for map " + id);
      view = extracted_view(extracted_table_from_json(json::parse(in)));
    } else {
      view = gold_view(g.map.table, g.map.classification, g.map.style);
    }
    for (const Question* q : by_map.at(id)) {
      Prediction p;
      p.question_id = q->id;
      try {
        const std::string text = preprocess_question(q->text, entries);
        const LogicalForm lf = parse_question(text, static_cast<int>(entries.entries.size()), geo);
        p.answers = postprocess_answer(execute(lf, view, geo), entries);
      } catch (const Error& e) {
        p.answers = {kNone};
        p.error = std::string(to_string(e.kind())) + ": " + e.what();
      }
      results[i].push_back(std::move(p));
    }
  });
  std::vector<Prediction> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  std::sort(all.begin(), all.end(), [](const Prediction& a, const Prediction& b) { return a.question_id < b.question_id; });
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  std::string body;
  for (const auto& p : all) body += to_json(p).dump() + "\n";
  write_text(out_file, body);
}

ExtractionScores score_extraction(const fs::path& dataset, const fs::path& tables_dir) {
  ExtractionScores s;
  std::size_t correct = 0;
  std::vector<double> preds;
  std::vector<double> golds;
  for (const auto& id : list_maps(dataset)) {
    const GoldRecord g = load_gold(dataset / "gold" / (id + ".json"));
    std::ifstream in(tables_dir / (id + ".json"));
    if (!in) throw Error(ErrorKind::IoError, "no extracted table for map " + id);
    const ExtractedTable t = extracted_table_from_json(json::parse(in));
    const QaTable gold = gold_view(g.map.table, g.map.classification, g.map.style);
    for (const auto& [rid, gr] : gold.regions) {
      if (gr.missing) continue;
      const auto it = t.region_values.find(rid);
      const bool have = it != t.region_values.end() && !it->second.missing;
      if (gold.kind == LegendKind::Discrete) {
        ++s.discrete_regions;
        if (have && it->second.class_index == gr.rank) ++correct;
      } else {
        ++s.continuous_regions;
        golds.push_back(*gr.relative);
        preds.push_back(have && it->second.relative_value ? *it->second.relative_value : -1.0);
      }
    }
  }
  s.discrete_accuracy = s.discrete_regions ? static_cast<double>(correct) / static_cast<double>(s.discrete_regions) : 0.0;
  for (double k : {0.01, 0.05, 0.1}) s.distance_at[k] = distance_at_k(preds, golds, k);
  return s;
}

EvalReport cmd_evaluate(const fs::path& dataset, const fs::path& predictions, const fs::path& report,
                        const std::optional<Split>& split, const std::optional<fs::path>& tables_dir) {
  const auto questions = load_all_questions(dataset, split);
  auto preds = load_predictions(predictions);
  if (split) {
    std::set<std::string> wanted;
    for (const auto& q : questions) wanted.insert(q.id);
    const auto all = load_all_questions(dataset);
    std::set<std::string> known;
    for (const auto& q : all) known.insert(q.id);
    std::vector<Prediction> kept;
    for (auto& p : preds) {
      if (!known.count(p.question_id)) throw Error(ErrorKind::UnknownQuestion, "unknown question id '" + p.question_id + "'");
      if (wanted.count(p.question_id)) kept.push_back(std::move(p));
    }
    preds = std::move(kept);
  }
  EvalReport r = evaluate(preds, questions);
  if (tables_dir) r.extraction = score_extraction(dataset, *tables_dir);
  if (report.has_parent_path()) fs::create_directories(report.parent_path());
  write_text(report, to_json(r).dump(1) + "\n");
  return r;
}

StatsReport cmd_stats(const fs::path& dataset) { return dataset_stats(dataset); }

void cmd_export_ocr(const fs::path& dataset, const fs::path& out_dir, const std::optional<std::uint64_t>& noise_seed) {
  fs::create_directories(out_dir);
  for (const auto& id : list_maps(dataset)) {
    const GoldRecord g = load_gold(dataset / "gold" / (id + ".json"));
    auto tokens = oracle_ocr(g.manifest);
    if (noise_seed) tokens = corrupt_punctuation(tokens, mix_seed(*noise_seed, id));
    write_ocr_tokens(tokens, out_dir / (id + ".jsonl"));
  }
}

}  // namespace mapqa
