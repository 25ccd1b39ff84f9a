#include "mapqa/ocrbridge.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "mapqa/errors.hpp"
#include "mapqa/rng.hpp"
#include "mapqa/strings.hpp"

namespace mapqa {

using nlohmann::json;

std::vector<OcrToken> oracle_ocr(const LayoutManifest& m) {
  std::vector<OcrToken> out;
  for (const auto& s : m.swatches) out.push_back({s.description, s.text_bbox});
  if (m.colorbar) {
    for (std::size_t i = 0; i < m.colorbar->labels.size(); ++i) {
      out.push_back({m.colorbar->labels[i], m.colorbar->label_bboxes[i]});
    }
  }
  if (!m.title.text.empty()) out.push_back({m.title.text, m.title.bbox});
  return out;
}

LegendEntries ingest_ocr(const std::vector<OcrToken>& tokens, int image_width, int image_height,
                         const std::optional<BBox>& legend_hint, LegendKind kind) {
  std::vector<OcrToken> legend;
  for (const auto& t : tokens) {
    if (text::trim(t.text).empty() || text::iequals(text::trim(t.text), kMissingNote)) continue;
    const Pixel c = t.bbox.center();
    const bool inside = legend_hint ? legend_hint->contains(c)
                                    : c.x >= image_width * (1.0 - kLegendBandFraction) ||
                                          c.y >= image_height * (1.0 - kLegendBandFraction);
    if (inside) legend.push_back(t);
  }
  if (legend.empty()) throw Error(ErrorKind::NoLegendTokens, "no OCR tokens inside the legend region");

  std::sort(legend.begin(), legend.end(), [](const OcrToken& a, const OcrToken& b) {
    return std::tie(a.bbox.y0, a.bbox.x0) < std::tie(b.bbox.y0, b.bbox.x0);
  });
  struct Line {
    int y0;
    int y1;
    std::vector<OcrToken> tokens;
  };
  std::vector<Line> lines;
  for (const auto& t : legend) {
    auto it = std::find_if(lines.begin(), lines.end(), [&](const Line& l) {
      return std::min(l.y1, t.bbox.y1) > std::max(l.y0, t.bbox.y0);
    });
    if (it == lines.end()) {
      lines.push_back({t.bbox.y0, t.bbox.y1, {t}});
    } else {
      it->y0 = std::min(it->y0, t.bbox.y0);
      it->y1 = std::max(it->y1, t.bbox.y1);
      it->tokens.push_back(t);
    }
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.y0 < b.y0; });

  LegendEntries out;
  out.kind = kind;
  for (auto& line : lines) {
    std::sort(line.tokens.begin(), line.tokens.end(),
              [](const OcrToken& a, const OcrToken& b) { return a.bbox.x0 < b.bbox.x0; });
    const int max_gap = 2 * (line.y1 - line.y0);
    std::string current;
    int last_x1 = 0;
    for (const auto& t : line.tokens) {
      if (!current.empty() && t.bbox.x0 - last_x1 > max_gap) {
        out.entries.push_back(current);
        current.clear();
      }
      current += (current.empty() ? "" : " ") + text::trim(t.text);
      last_x1 = t.bbox.x1;
    }
    if (!current.empty()) out.entries.push_back(current);
  }
  return out;
}

namespace {

struct Unit {
  char c;
  std::size_t begin;
  std::size_t end;
};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// Normalized characters, each remembering the source bytes it came from.
std::vector<Unit> fuzzy_units(std::string_view s) {
  static const std::vector<std::string> kDashes = {"‐", "‑", "‒", "–", "—", "−"};
  std::vector<Unit> raw;
  for (std::size_t i = 0; i < s.size();) {
    bool dash = false;
    for (const auto& d : kDashes) {
      if (s.substr(i, d.size()) == d) {
        raw.push_back({'-', i, i + d.size()});
        i += d.size();
        dash = true;
        break;
      }
    }
    if (dash) continue;
    const char c = s[i];
    raw.push_back({std::isspace(static_cast<unsigned char>(c)) ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))), i, i + 1});
    ++i;
  }
  // Thousands commas between digits.
  std::vector<Unit> no_commas;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].c == ',' && i > 0 && i + 1 < raw.size() && is_digit(raw[i - 1].c) && is_digit(raw[i + 1].c)) continue;
    no_commas.push_back(raw[i]);
  }
  // Collapse whitespace and drop it around dashes.
  std::vector<Unit> out;
  for (std::size_t i = 0; i < no_commas.size(); ++i) {
    const Unit& u = no_commas[i];
    if (u.c == ' ') {
      if (out.empty() || out.back().c == ' ' || out.back().c == '-') continue;
      std::size_t j = i;
      while (j < no_commas.size() && no_commas[j].c == ' ') ++j;
      if (j == no_commas.size() || no_commas[j].c == '-') continue;
    }
    out.push_back(u);
  }
  return out;
}

std::string units_text(const std::vector<Unit>& units) {
  std::string s;
  for (const auto& u : units) s += u.c;
  return s;
}

}  // namespace

std::string fuzzy_key(std::string_view s) { return units_text(fuzzy_units(s)); }

std::string preprocess_question(std::string_view text, const LegendEntries& entries) {
  const auto units = fuzzy_units(text);
  const std::string norm = units_text(units);

  std::vector<std::pair<std::string, int>> keys;
  for (std::size_t i = 0; i < entries.entries.size(); ++i) {
    std::string k = fuzzy_key(entries.entries[i]);
    if (!k.empty()) keys.emplace_back(std::move(k), static_cast<int>(i));
  }
  std::stable_sort(keys.begin(), keys.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  struct Replacement {
    std::size_t begin;
    std::size_t end;
    int index;
  };
  std::vector<Replacement> reps;
  std::vector<bool> claimed(norm.size(), false);
  for (const auto& [key, index] : keys) {
    for (std::size_t pos = norm.find(key); pos != std::string::npos; pos = norm.find(key, pos + 1)) {
      const std::size_t after = pos + key.size();
      if (pos > 0 && is_word(norm[pos - 1])) continue;
      if (after < norm.size()) {
        if (is_digit(norm[after])) continue;
        if ((norm[after] == '.' || norm[after] == ',' || norm[after] == '/') && after + 1 < norm.size() &&
            is_digit(norm[after + 1])) {
          continue;
        }
      }
      if (std::any_of(claimed.begin() + static_cast<long>(pos), claimed.begin() + static_cast<long>(after),
                      [](bool b) { return b; })) {
        continue;
      }
      std::fill(claimed.begin() + static_cast<long>(pos), claimed.begin() + static_cast<long>(after), true);
      reps.push_back({units[pos].begin, units[after - 1].end, index});
    }
  }
  std::sort(reps.begin(), reps.end(), [](const Replacement& a, const Replacement& b) { return a.begin < b.begin; });
  std::string out;
  std::size_t cursor = 0;
  for (const auto& r : reps) {
    out.append(text.substr(cursor, r.begin - cursor));
    out += legend_token(r.index);
    cursor = r.end;
  }
  out.append(text.substr(cursor));
  return out;
}

AnswerSet postprocess_answer(const AnswerSet& answers, const LegendEntries& entries) {
  static const std::regex token(R"(^legend_(\d+)$)");
  AnswerSet out;
  for (const auto& a : answers) {
    std::smatch m;
    if (!std::regex_match(a, m, token)) {
      out.insert(a);
      continue;
    }
    const long j = std::stol(m[1].str());
    if (j < 1 || j > static_cast<long>(entries.entries.size())) {
      throw Error(ErrorKind::IndexOutOfRange,
                  a + " refers past the " + std::to_string(entries.entries.size()) + " legend entries");
    }
    out.insert(normalize_answer(entries.entries[static_cast<std::size_t>(j - 1)]));
  }
  return out;
}

std::vector<OcrToken> load_ocr_tokens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open OCR file " + path.string());
  std::vector<OcrToken> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      const auto& b = j.at("bbox");
      out.push_back({j.at("text").get<std::string>(),
                     {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()}});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_ocr_tokens(const std::vector<OcrToken>& tokens, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write OCR file " + path.string());
  for (const auto& t : tokens) {
    out << json{{"text", t.text}, {"bbox", {t.bbox.x0, t.bbox.y0, t.bbox.x1, t.bbox.y1}}}.dump() << '\n';
  }
}

std::vector<OcrToken> corrupt_punctuation(const std::vector<OcrToken>& tokens, std::uint64_t seed,
                                          double misread_rate) {
  static const std::vector<std::string> kDashForms = {"-", "–", "—", " - ", " – "};
  Rng rng(seed);
  std::vector<OcrToken> out;
  for (const auto& t : tokens) {
    std::string s;
    for (std::size_t i = 0; i < t.text.size(); ++i) {
      const char c = t.text[i];
      if (c == '-') {
        s += rng.pick(kDashForms);
      } else if (c == ',') {
        const double u = rng.uniform();
        if (u < misread_rate) {
          s += '.';
        } else if (u < 0.5) {
          s += ',';
        }
      } else {
        s += c;
      }
    }
    // Occasionally the recognizer splits a range into separate words.
    const auto dash = s.find(" - ");
    if (dash != std::string::npos && rng.bernoulli(0.3)) {
      const int char_w = std::max(1, t.bbox.width() / std::max<int>(1, static_cast<int>(t.text.size())));
      const std::string left = s.substr(0, dash);
      const std::string right = s.substr(dash + 3);
      const int lx1 = t.bbox.x0 + static_cast<int>(left.size()) * char_w;
      out.push_back({left, {t.bbox.x0, t.bbox.y0, lx1, t.bbox.y1}});
      out.push_back({"-", {lx1 + char_w, t.bbox.y0, lx1 + 2 * char_w, t.bbox.y1}});
      out.push_back({right, {lx1 + 3 * char_w, t.bbox.y0, std::max(lx1 + 4 * char_w, t.bbox.x1), t.bbox.y1}});
      continue;
    }
    out.push_back({s, t.bbox});
  }
  return out;
}

}  // namespace mapqa
