#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/evalkit.hpp"
#include "mapqa/qgen.hpp"
#include "mapqa/render.hpp"
#include "mapqa/style.hpp"

namespace mapqa {

enum class StyleMode { Uniform, Varied };

struct PipelineConfig {
  std::filesystem::path geography = std::filesystem::path(MAPQA_DATA_DIR) / "us_states.json";
  std::filesystem::path lexicon = std::filesystem::path(MAPQA_DATA_DIR) / "nouns.txt";
  StyleMode style_mode = StyleMode::Varied;
  // Synthetic sampling when empty; otherwise a CSV file or a directory of CSVs.
  std::optional<std::filesystem::path> csv;
  // "auto" reads percentages when every value is at most 100.
  std::string csv_kind = "auto";
  int n_maps = 100;
  int questions_per_map = 14;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "dataset";
  int canvas_width = 800;
  int canvas_height = 600;
  ScalePartition scale_partition = default_scale_partition();
  SplitRatios split_ratios;
  double missing_map_probability = 0.28;
  double continuous_margin = 0.02;
};

nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware concurrency). If any
// call throws, the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

std::string map_id_for(int index);

struct GoldRecord {
  MapInstance map;
  LayoutManifest manifest;
};

nlohmann::json gold_json(const MapInstance& map, const LayoutManifest& manifest);
GoldRecord load_gold(const std::filesystem::path& file);
// Map ids of a dataset, sorted.
std::vector<std::string> list_maps(const std::filesystem::path& dataset);
std::filesystem::path map_image_path(const std::filesystem::path& dataset, const MapInstance& map);

// "oracle" or a directory holding one {map_id}.jsonl token file per map.
struct OcrSource {
  std::optional<std::filesystem::path> dir;
};
OcrSource parse_ocr_source(const std::string& arg);

void cmd_generate(const PipelineConfig& config, unsigned jobs = 0);
void cmd_extract(const std::filesystem::path& dataset, const OcrSource& ocr, const std::filesystem::path& out_dir,
                 unsigned jobs = 0);
// tables_dir empty means answer from the gold tables.
void cmd_answer(const std::filesystem::path& dataset, const std::optional<std::filesystem::path>& tables_dir,
                const OcrSource& ocr, const std::filesystem::path& out_file, unsigned jobs = 0);
EvalReport cmd_evaluate(const std::filesystem::path& dataset, const std::filesystem::path& predictions,
                        const std::filesystem::path& report, const std::optional<Split>& split = std::nullopt,
                        const std::optional<std::filesystem::path>& tables_dir = std::nullopt);
StatsReport cmd_stats(const std::filesystem::path& dataset);
void cmd_export_ocr(const std::filesystem::path& dataset, const std::filesystem::path& out_dir,
                    const std::optional<std::uint64_t>& noise_seed);

// Extraction accuracy of a tables directory against the dataset's gold files.
ExtractionScores score_extraction(const std::filesystem::path& dataset, const std::filesystem::path& tables_dir);

}  // namespace mapqa
