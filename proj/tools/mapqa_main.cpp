#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapqa/errors.hpp"
#include "mapqa/pipeline.hpp"

namespace {

int fail(std::string_view kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mapqa;
  CLI::App app{"Choropleth map question answering toolkit"};
  app.require_subcommand(1);
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  auto* gen = app.add_subcommand("generate", "Generate a dataset from a config file");
  gen->add_option("--config", config_path)->required();
  gen->add_option("--seed", seed, "Override the master seed");

  std::string dataset;
  std::string ocr = "oracle";
  std::string out;
  auto* ext = app.add_subcommand("extract", "Extract tables from rendered maps");
  ext->add_option("--dataset", dataset)->required();
  ext->add_option("--ocr", ocr, "oracle or a directory of OCR token files");
  ext->add_option("--out", out)->required();

  std::string tables;
  auto* ans = app.add_subcommand("answer", "Answer every question from extracted (or gold) tables");
  ans->add_option("--dataset", dataset)->required();
  ans->add_option("--tables", tables, "Extracted tables directory, or 'gold'")->required();
  ans->add_option("--ocr", ocr, "oracle or a directory of OCR token files");
  ans->add_option("--out", out)->required();

  std::string predictions;
  std::string report;
  std::string split_name;
  auto* ev = app.add_subcommand("evaluate", "Score predictions with the Jaccard index");
  ev->add_option("--dataset", dataset)->required();
  ev->add_option("--predictions", predictions)->required();
  ev->add_option("--report", report)->required();
  ev->add_option("--split", split_name, "train, valid or test");
  ev->add_option("--tables", tables, "Also score an extracted tables directory");

  auto* st = app.add_subcommand("stats", "Print dataset statistics");
  st->add_option("--dataset", dataset)->required();

  std::optional<std::uint64_t> noise_seed;
  auto* ex = app.add_subcommand("export-ocr", "Write oracle OCR token files, optionally with punctuation noise");
  ex->add_option("--dataset", dataset)->required();
  ex->add_option("--out", out)->required();
  ex->add_option("--noise-seed", noise_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      PipelineConfig c = load_config(config_path);
      if (seed) c.master_seed = *seed;
      cmd_generate(c, jobs);
    } else if (ext->parsed()) {
      cmd_extract(dataset, parse_ocr_source(ocr), out, jobs);
    } else if (ans->parsed()) {
      std::optional<std::filesystem::path> t;
      if (tables != "gold") t = tables;
      cmd_answer(dataset, t, parse_ocr_source(ocr), out, jobs);
    } else if (ev->parsed()) {
      std::optional<Split> split;
      if (!split_name.empty()) split = parse_enum(split_name, kAllSplits);
      std::optional<std::filesystem::path> t;
      if (!tables.empty()) t = tables;
      const EvalReport r = cmd_evaluate(dataset, predictions, report, split, t);
      std::cout << to_json(r).dump(1) << std::endl;
    } else if (st->parsed()) {
      std::cout << to_json(cmd_stats(dataset)).dump(1) << std::endl;
    } else if (ex->parsed()) {
      cmd_export_ocr(dataset, out, noise_seed);
    }
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return 0;
}
