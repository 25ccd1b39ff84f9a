#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapqa/raster.hpp"
#include "mapqa/render.hpp"
#include "mapqa/tableqa.hpp"

namespace mapqa {

struct OcrToken {
  std::string text;
  BBox bbox;
};

struct LegendEntries {
  // Reading order: left-right, top-bottom.
  std::vector<std::string> entries;
  LegendKind kind = LegendKind::Discrete;
};

// Legend descriptions (or colorbar endpoint labels) plus the title, exactly
// as drawn.
std::vector<OcrToken> oracle_ocr(const LayoutManifest& manifest);

inline constexpr double kLegendBandFraction = 0.3;

// Without a hint, only tokens centered in the right or bottom 30% band count.
LegendEntries ingest_ocr(const std::vector<OcrToken>& tokens, int image_width, int image_height,
                         const std::optional<BBox>& legend_hint, LegendKind kind);

// Lowercase, unify dashes, drop spaces around dashes and thousands commas.
std::string fuzzy_key(std::string_view s);

std::string preprocess_question(std::string_view text, const LegendEntries& entries);
AnswerSet postprocess_answer(const AnswerSet& answers, const LegendEntries& entries);

std::vector<OcrToken> load_ocr_tokens(const std::filesystem::path& path);
void write_ocr_tokens(const std::vector<OcrToken>& tokens, const std::filesystem::path& path);

// Simulates OCR punctuation noise: dash variants, spaced or split dashes,
// dropped or misread commas.
std::vector<OcrToken> corrupt_punctuation(const std::vector<OcrToken>& tokens, std::uint64_t seed,
                                          double misread_rate = 0.02);

}  // namespace mapqa
