// Copyright 2026 The VTLayout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vtlayout/corpus/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/parallel.hpp"
#include "vtlayout/common/rng.hpp"
#include "vtlayout/corpus/coco.hpp"

namespace vtlayout {

namespace {

// 5x7 font, one byte per column, bit 0 = top row.
struct GlyphEntry {
  char ch;
  std::array<std::uint8_t, 5> cols;
};

constexpr GlyphEntry kGlyphs[] = {
    {'0', {0x3E, 0x51, 0x49, 0x45, 0x3E}}, {'1', {0x00, 0x42, 0x7F, 0x40, 0x00}},
    {'2', {0x42, 0x61, 0x51, 0x49, 0x46}}, {'3', {0x21, 0x41, 0x45, 0x4B, 0x31}},
    {'4', {0x18, 0x14, 0x12, 0x7F, 0x10}}, {'5', {0x27, 0x45, 0x45, 0x45, 0x39}},
    {'6', {0x3C, 0x4A, 0x49, 0x49, 0x30}}, {'7', {0x01, 0x71, 0x09, 0x05, 0x03}},
    {'8', {0x36, 0x49, 0x49, 0x49, 0x36}}, {'9', {0x06, 0x49, 0x49, 0x29, 0x1E}},
    {'A', {0x7E, 0x11, 0x11, 0x11, 0x7E}}, {'B', {0x7F, 0x49, 0x49, 0x49, 0x36}},
    {'C', {0x3E, 0x41, 0x41, 0x41, 0x22}}, {'D', {0x7F, 0x41, 0x41, 0x22, 0x1C}},
    {'E', {0x7F, 0x49, 0x49, 0x49, 0x41}}, {'F', {0x7F, 0x09, 0x09, 0x09, 0x01}},
    {'G', {0x3E, 0x41, 0x49, 0x49, 0x7A}}, {'H', {0x7F, 0x08, 0x08, 0x08, 0x7F}},
    {'I', {0x00, 0x41, 0x7F, 0x41, 0x00}}, {'J', {0x20, 0x40, 0x41, 0x3F, 0x01}},
    {'K', {0x7F, 0x08, 0x14, 0x22, 0x41}}, {'L', {0x7F, 0x40, 0x40, 0x40, 0x40}},
    {'M', {0x7F, 0x02, 0x0C, 0x02, 0x7F}}, {'N', {0x7F, 0x04, 0x08, 0x10, 0x7F}},
    {'O', {0x3E, 0x41, 0x41, 0x41, 0x3E}}, {'P', {0x7F, 0x09, 0x09, 0x09, 0x06}},
    {'Q', {0x3E, 0x41, 0x51, 0x21, 0x5E}}, {'R', {0x7F, 0x09, 0x19, 0x29, 0x46}},
    {'S', {0x46, 0x49, 0x49, 0x49, 0x31}}, {'T', {0x01, 0x01, 0x7F, 0x01, 0x01}},
    {'U', {0x3F, 0x40, 0x40, 0x40, 0x3F}}, {'V', {0x1F, 0x20, 0x40, 0x20, 0x1F}},
    {'W', {0x3F, 0x40, 0x38, 0x40, 0x3F}}, {'X', {0x63, 0x14, 0x08, 0x14, 0x63}},
    {'Y', {0x07, 0x08, 0x70, 0x08, 0x07}}, {'Z', {0x61, 0x51, 0x49, 0x45, 0x43}},
    {'a', {0x20, 0x54, 0x54, 0x54, 0x78}}, {'b', {0x7F, 0x48, 0x44, 0x44, 0x38}},
    {'c', {0x38, 0x44, 0x44, 0x44, 0x20}}, {'d', {0x38, 0x44, 0x44, 0x48, 0x7F}},
    {'e', {0x38, 0x54, 0x54, 0x54, 0x18}}, {'f', {0x08, 0x7E, 0x09, 0x01, 0x02}},
    {'g', {0x0C, 0x52, 0x52, 0x52, 0x3E}}, {'h', {0x7F, 0x08, 0x04, 0x04, 0x78}},
    {'i', {0x00, 0x44, 0x7D, 0x40, 0x00}}, {'j', {0x20, 0x40, 0x44, 0x3D, 0x00}},
    {'k', {0x7F, 0x10, 0x28, 0x44, 0x00}}, {'l', {0x00, 0x41, 0x7F, 0x40, 0x00}},
    {'m', {0x7C, 0x04, 0x18, 0x04, 0x78}}, {'n', {0x7C, 0x08, 0x04, 0x04, 0x78}},
    {'o', {0x38, 0x44, 0x44, 0x44, 0x38}}, {'p', {0x7C, 0x14, 0x14, 0x14, 0x08}},
    {'q', {0x08, 0x14, 0x14, 0x18, 0x7C}}, {'r', {0x7C, 0x08, 0x04, 0x04, 0x08}},
    {'s', {0x48, 0x54, 0x54, 0x54, 0x20}}, {'t', {0x04, 0x3F, 0x44, 0x40, 0x20}},
    {'u', {0x3C, 0x40, 0x40, 0x20, 0x7C}}, {'v', {0x1C, 0x20, 0x40, 0x20, 0x1C}},
    {'w', {0x3C, 0x40, 0x30, 0x40, 0x3C}}, {'x', {0x44, 0x28, 0x10, 0x28, 0x44}},
    {'y', {0x0C, 0x50, 0x50, 0x50, 0x3C}}, {'z', {0x44, 0x64, 0x54, 0x4C, 0x44}},
    {'.', {0x00, 0x60, 0x60, 0x00, 0x00}}, {',', {0x00, 0x50, 0x30, 0x00, 0x00}},
    {':', {0x00, 0x36, 0x36, 0x00, 0x00}}, {'-', {0x08, 0x08, 0x08, 0x08, 0x08}},
    {'(', {0x00, 0x1C, 0x22, 0x41, 0x00}}, {')', {0x00, 0x41, 0x22, 0x1C, 0x00}},
    {'%', {0x23, 0x13, 0x08, 0x64, 0x62}}, {'=', {0x14, 0x14, 0x14, 0x14, 0x14}},
    {'/', {0x20, 0x10, 0x08, 0x04, 0x02}}, {'+', {0x08, 0x08, 0x3E, 0x08, 0x08}},
};

const std::array<std::uint8_t, 5>* FindGlyph(char c) {
  for (const auto& g : kGlyphs) {
    if (g.ch == c) return &g.cols;
  }
  return nullptr;
}

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;
constexpr int kAdvance = 6;
constexpr int kLinePitch = 10;
constexpr int kMargin = 24;
constexpr int kColumnGap = 16;
constexpr int kBlockGap = 10;
constexpr int kRowHeight = 14;
constexpr int kItemGap = 5;

constexpr const char* kCommonWords[] = {
    "the", "of", "and", "in", "to", "is", "for", "with", "on", "that", "by", "this", "we", "are", "as",
    "be", "from", "at", "an", "which", "or", "these", "model", "data", "results", "method", "analysis",
    "study", "using", "based", "two", "into", "between", "each", "our", "were", "also", "can", "has",
    "have", "was", "not", "been", "more", "than", "used", "show", "cell", "cells", "gene", "protein",
    "expression", "patients", "treatment", "clinical", "group", "groups", "level", "levels", "effect",
    "effects", "sample", "samples", "time", "high", "low", "significant", "observed", "shown", "values",
    "mean", "total", "function", "response", "activity", "human", "health", "risk", "field", "signal",
    "structure", "network", "system", "process", "rate", "changes", "control", "associated", "increased",
    "reduced", "compared", "different", "similar", "specific", "number", "first", "second", "however",
    "further", "while", "both", "during", "after", "before", "under", "within", "therefore", "thus",
    "here", "present", "new", "report", "found", "including", "such", "other", "all", "most", "only",
    "may", "evidence", "role", "factor", "information", "approach", "performance", "training", "image",
    "measured", "population", "years", "age", "women", "men", "disease", "infection", "tissue", "dose",
    "mice", "temperature", "concentration", "growth", "binding", "pathway", "region", "sequence"};

constexpr const char* kListWords[] = {
    "include", "includes", "item", "items", "step", "steps", "select", "add", "remove", "check",
    "ensure", "avoid", "use", "apply", "define", "list", "option", "options", "key", "main", "required",
    "optional", "should", "must", "provide", "support", "example", "examples", "criteria", "point"};

constexpr const char* kHeadingWords[] = {
    "introduction", "methods", "results", "discussion", "conclusion", "conclusions", "background",
    "materials", "abstract", "references", "acknowledgments", "appendix", "overview", "experiments",
    "evaluation", "related", "work", "statistical", "supplementary", "funding", "limitations", "summary",
    "objective", "design", "setting", "participants", "outcomes", "availability", "ethics", "approval",
    "analysis", "data", "study", "model", "procedure", "protocol"};

template <std::size_t N>
std::string Pick(Rng& rng, const char* const (&pool)[N]) {
  return pool[static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(N) - 1))];
}

std::string NumberToken(Rng& rng) {
  switch (rng.UniformInt(0, 3)) {
    case 0: return std::to_string(rng.UniformInt(2, 999));
    case 1: return std::to_string(rng.UniformInt(0, 99)) + "." + std::to_string(rng.UniformInt(0, 99));
    case 2: return "0." + std::to_string(rng.UniformInt(10, 99));
    default: return std::to_string(rng.UniformInt(1, 99)) + "%";
  }
}

struct TextLine {
  int x = 0;
  int y = 0;
  std::string text;
};

enum class BulletKind { kDot, kDash, kNumber };
enum class FigureKind { kBars, kScatter, kGradient, kShapes };

struct BlockLayout {
  Category category = Category::kText;
  BBox bbox;
  std::string text;
  // sizing knobs (shrunk during packing)
  int units = 1;
  int scale = 1;
  bool bold = false;
  int words = 1;
  int columns = 2;
  int fig_width = 0;
  std::vector<int> item_lines;  // lists: lines per item
  // rendering data
  std::uint8_t ink = 20;
  std::vector<TextLine> lines;
  std::vector<std::pair<int, int>> bullets;
  BulletKind bullet = BulletKind::kDot;
  std::vector<int> row_lines;  // y coordinates of horizontal rules
  std::vector<int> col_lines;  // x coordinates of vertical rules
  FigureKind figure = FigureKind::kBars;
  std::uint64_t seed = 0;
};

struct PageLayout {
  int width = 0;
  int height = 0;
  std::uint8_t background = 255;
  double noise = 0.0;  // per-pixel gray noise sigma
  std::uint64_t noise_seed = 0;
  std::vector<BlockLayout> blocks;
};

int BlockHeight(const BlockLayout& b) {
  switch (b.category) {
    case Category::kText: return b.units * kLinePitch - (kLinePitch - kGlyphH);
    case Category::kTitle: return kGlyphH * b.scale;
    case Category::kList: {
      int lines = 0;
      for (int n : b.item_lines) lines += n;
      return lines * kLinePitch + (static_cast<int>(b.item_lines.size()) - 1) * kItemGap - (kLinePitch - kGlyphH);
    }
    case Category::kTable: return b.units * kRowHeight + 1;
    case Category::kFigure: return b.units;
  }
  return 0;
}

bool Shrink(BlockLayout& b) {
  switch (b.category) {
    case Category::kText:
      if (b.units > 1) { --b.units; return true; }
      return false;
    case Category::kList:
      if (b.item_lines.size() > 2) { b.item_lines.pop_back(); return true; }
      return false;
    case Category::kTable:
      if (b.units > 2) { --b.units; return true; }
      return false;
    case Category::kFigure:
      if (b.units > 40) { b.units -= 10; return true; }
      return false;
    case Category::kTitle:
      if (b.scale > 1) { b.scale = 1; return true; }
      return false;
  }
  return false;
}

void PutPixel(Image& img, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::uint8_t* p = img.data.data() + img.offset(x, y);
  p[0] = r;
  p[1] = g;
  p[2] = b;
}

void FillRect(Image& img, int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  for (int yy = y; yy < y + h; ++yy)
    for (int xx = x; xx < x + w; ++xx) PutPixel(img, xx, yy, r, g, b);
}

void FillGray(Image& img, int x, int y, int w, int h, std::uint8_t v) { FillRect(img, x, y, w, h, v, v, v); }

// Generates the lines of a paragraph-like block into `b.lines`.
void FillLines(Rng& rng, BlockLayout& b, int x, int y, int width, int n_lines, int indent_first = 0,
               int indent_rest = 0, double last_fill_min = 0.3, double list_word_rate = 0.0) {
  const int max_chars_full = std::max(4, width / kAdvance);
  for (int l = 0; l < n_lines; ++l) {
    const int indent = l == 0 ? indent_first : indent_rest;
    int max_chars = std::max(4, (width - indent) / kAdvance);
    if (l == n_lines - 1) {
      max_chars = std::max(4, static_cast<int>(max_chars * rng.Uniform(last_fill_min, 1.0)));
    }
    std::string line;
    for (;;) {
      std::string w = list_word_rate > 0.0 && rng.Bernoulli(list_word_rate) ? Pick(rng, kListWords)
                                                                              : Pick(rng, kCommonWords);
      const std::size_t next = line.empty() ? w.size() : line.size() + 1 + w.size();
      if (static_cast<int>(next) > max_chars) break;
      if (!line.empty()) line.push_back(' ');
      line += w;
    }
    if (line.empty()) line = std::string(kCommonWords[0]).substr(0, std::min<std::size_t>(3, max_chars_full));
    b.lines.push_back({x + indent, y + l * kLinePitch, line});
  }
}

void LayoutText(Rng& rng, BlockLayout& b, int x, int y, int width) {
  FillLines(rng, b, x, y, width, b.units, 0, 0);
  int w = 0;
  for (const auto& l : b.lines) w = std::max(w, TextWidth(l.text, 1, false));
  b.bbox = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(w),
            static_cast<double>(BlockHeight(b))};
}

void LayoutTitle(Rng& rng, BlockLayout& b, int x, int y, int width) {
  std::string text;
  if (rng.Bernoulli(0.25)) text = std::to_string(rng.UniformInt(1, 9)) + " ";
  for (int i = 0; i < b.words; ++i) {
    std::string w = rng.Bernoulli(0.7) ? Pick(rng, kHeadingWords) : Pick(rng, kCommonWords);
    const std::string candidate = text.empty() || text.back() == ' ' ? text + w : text + " " + w;
    if (TextWidth(candidate, b.scale, b.bold) > width && i > 0) break;
    text = candidate;
  }
  if (rng.Bernoulli(0.4)) {
    for (auto& c : text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!text.empty()) {
    const std::size_t first = text.find_first_not_of("0123456789 ");
    if (first != std::string::npos) text[first] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[first])));
  }
  while (TextWidth(text, b.scale, b.bold) > width && text.size() > 2) text.pop_back();
  b.lines.push_back({x, y, text});
  b.bbox = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(TextWidth(text, b.scale, b.bold)),
            static_cast<double>(BlockHeight(b))};
}

void LayoutList(Rng& rng, BlockLayout& b, int x, int y, int width) {
  b.bullet = static_cast<BulletKind>(rng.UniformInt(0, 2));
  const int indent = b.bullet == BulletKind::kNumber ? 16 : 10;
  int ly = y;
  for (std::size_t item = 0; item < b.item_lines.size(); ++item) {
    if (b.bullet == BulletKind::kNumber) {
      b.lines.push_back({x, ly, std::to_string(item + 1) + "."});
    } else {
      b.bullets.emplace_back(x + 1, ly + 2);
    }
    // Items stop well short of the column edge.
    const int item_w = indent + static_cast<int>((width - indent) * rng.Uniform(0.45, 0.9));
    BlockLayout tmp;
    FillLines(rng, tmp, x, ly, item_w, b.item_lines[item], indent, indent, 0.4, 0.15);
    for (auto& l : tmp.lines) b.lines.push_back(std::move(l));
    ly += b.item_lines[item] * kLinePitch + kItemGap;
  }
  int w = 0;
  for (const auto& l : b.lines) w = std::max(w, l.x - x + TextWidth(l.text, 1, false));
  b.bbox = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(w),
            static_cast<double>(BlockHeight(b))};
}

void LayoutTable(Rng& rng, BlockLayout& b, int x, int y, int width) {
  const int table_w = static_cast<int>(width * rng.Uniform(0.75, 1.0));
  const int cols = b.columns;
  const int col_w = table_w / cols;
  const bool full_grid = rng.Bernoulli(0.55);
  const int rows = b.units;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::string cell;
      if (r == 0) {
        cell = Pick(rng, kCommonWords);
      } else if (c == 0 && rng.Bernoulli(0.6)) {
        cell = Pick(rng, kCommonWords);
      } else {
        cell = NumberToken(rng);
      }
      const int max_chars = std::max(2, (col_w - 6) / kAdvance);
      if (static_cast<int>(cell.size()) > max_chars) cell.resize(static_cast<std::size_t>(max_chars));
      b.lines.push_back({x + c * col_w + 3, y + r * kRowHeight + 4, cell});
    }
  }
  if (full_grid) {
    for (int r = 0; r <= rows; ++r) b.row_lines.push_back(y + r * kRowHeight);
    for (int c = 0; c <= cols; ++c) b.col_lines.push_back(x + std::min(c * col_w, cols * col_w - 1));
  } else {
    b.row_lines = {y, y + kRowHeight, y + rows * kRowHeight};
  }
  b.bbox = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(cols * col_w),
            static_cast<double>(BlockHeight(b))};
}

void LayoutFigure(Rng& rng, BlockLayout& b, int x, int y, int width) {
  b.figure = static_cast<FigureKind>(rng.UniformInt(0, 3));
  const int w = std::max(40, static_cast<int>(width * rng.Uniform(0.55, 1.0)));
  const int fx = x + (width - w) / 2;
  b.seed = rng.NextU64();
  b.bbox = {static_cast<double>(fx), static_cast<double>(y), static_cast<double>(w),
            static_cast<double>(BlockHeight(b))};
  if ((b.figure == FigureKind::kBars || b.figure == FigureKind::kScatter) && rng.Bernoulli(0.5)) {
    // Axis tick labels along the bottom edge.
    const int ticks = std::clamp(w / 60, 2, 5);
    for (int t = 0; t < ticks; ++t) {
      b.lines.push_back({fx + 12 + t * (w - 24) / ticks, y + b.units - kGlyphH - 1, std::to_string(10 * (t + 1))});
    }
  }
}

void RenderFigure(Image& img, const BlockLayout& b, std::uint8_t ink) {
  Rng rng(b.seed);
  const int x0 = static_cast<int>(b.bbox.x);
  const int y0 = static_cast<int>(b.bbox.y);
  const int w = static_cast<int>(b.bbox.w);
  const int h = static_cast<int>(b.bbox.h);
  auto color = [&rng] {
    return std::array<std::uint8_t, 3>{static_cast<std::uint8_t>(rng.UniformInt(30, 220)),
                                       static_cast<std::uint8_t>(rng.UniformInt(30, 220)),
                                       static_cast<std::uint8_t>(rng.UniformInt(30, 220))};
  };
  switch (b.figure) {
    case FigureKind::kBars: {
      FillGray(img, x0 + 8, y0, 1, h - 10, ink);
      FillGray(img, x0 + 8, y0 + h - 10, w - 8, 1, ink);
      const int bars = static_cast<int>(rng.UniformInt(3, 9));
      const int slot = std::max(3, (w - 16) / bars);
      const auto c = color();
      for (int i = 0; i < bars; ++i) {
        const int bh = static_cast<int>((h - 14) * rng.Uniform(0.2, 1.0));
        const auto cc = rng.Bernoulli(0.5) ? c : color();
        FillRect(img, x0 + 12 + i * slot, y0 + h - 10 - bh, std::max(2, slot - 4), bh, cc[0], cc[1], cc[2]);
      }
      break;
    }
    case FigureKind::kScatter: {
      FillRect(img, x0, y0, w, h, 250, 250, 250);
      FillGray(img, x0 + 8, y0, 1, h - 10, ink);
      FillGray(img, x0 + 8, y0 + h - 10, w - 8, 1, ink);
      const int points = static_cast<int>(rng.UniformInt(20, 80));
      const auto c = color();
      const double slope = rng.Uniform(-0.8, 0.8);
      for (int i = 0; i < points; ++i) {
        const double u = rng.Uniform();
        const double v = std::clamp(0.5 + slope * (u - 0.5) + 0.15 * rng.Normal(), 0.0, 1.0);
        const int px = x0 + 12 + static_cast<int>(u * (w - 20));
        const int py = y0 + 2 + static_cast<int>((1.0 - v) * (h - 16));
        FillRect(img, px - 1, py - 1, 3, 3, c[0], c[1], c[2]);
      }
      break;
    }
    case FigureKind::kGradient: {
      const auto a = color();
      const auto c = color();
      const bool vertical = rng.Bernoulli(0.5);
      for (int yy = 0; yy < h; ++yy) {
        for (int xx = 0; xx < w; ++xx) {
          const double t = vertical ? static_cast<double>(yy) / std::max(1, h - 1)
                                    : static_cast<double>(xx) / std::max(1, w - 1);
          const double wave = 0.1 * std::sin(0.15 * (xx + yy) + rng.Uniform() * 0.05);
          const double tt = std::clamp(t + wave, 0.0, 1.0);
          PutPixel(img, x0 + xx, y0 + yy, static_cast<std::uint8_t>(a[0] + (c[0] - a[0]) * tt),
                   static_cast<std::uint8_t>(a[1] + (c[1] - a[1]) * tt),
                   static_cast<std::uint8_t>(a[2] + (c[2] - a[2]) * tt));
        }
      }
      break;
    }
    case FigureKind::kShapes: {
      FillRect(img, x0, y0, w, h, 235, 235, 235);
      const int shapes = static_cast<int>(rng.UniformInt(2, 6));
      for (int s = 0; s < shapes; ++s) {
        const auto c = color();
        const int sw = static_cast<int>(rng.UniformInt(10, std::max(11, w / 2)));
        const int sh = static_cast<int>(rng.UniformInt(10, std::max(11, h / 2)));
        const int sx = x0 + static_cast<int>(rng.UniformInt(0, std::max(0, w - sw)));
        const int sy = y0 + static_cast<int>(rng.UniformInt(0, std::max(0, h - sh)));
        if (rng.Bernoulli(0.5)) {
          FillRect(img, sx, sy, sw, sh, c[0], c[1], c[2]);
        } else {
          const double cx = sx + sw / 2.0, cy = sy + sh / 2.0;
          for (int yy = sy; yy < sy + sh; ++yy)
            for (int xx = sx; xx < sx + sw; ++xx) {
              const double dx = (xx - cx) / (sw / 2.0), dy = (yy - cy) / (sh / 2.0);
              if (dx * dx + dy * dy <= 1.0) PutPixel(img, xx, yy, c[0], c[1], c[2]);
            }
        }
      }
      break;
    }
  }
  for (const auto& l : b.lines) DrawText(img, l.x, l.y, l.text, 1, false, ink);
}

Image RenderPage(const PageLayout& layout) {
  Image img(layout.width, layout.height, 3, layout.background);
  for (const auto& b : layout.blocks) {
    switch (b.category) {
      case Category::kText:
        for (const auto& l : b.lines) DrawText(img, l.x, l.y, l.text, 1, false, b.ink);
        break;
      case Category::kTitle:
        for (const auto& l : b.lines) DrawText(img, l.x, l.y, l.text, b.scale, b.bold, b.ink);
        break;
      case Category::kList:
        for (const auto& [bx, by] : b.bullets) {
          if (b.bullet == BulletKind::kDot) {
            FillGray(img, bx, by, 4, 4, b.ink);
          } else {
            FillGray(img, bx, by + 1, 5, 2, b.ink);
          }
        }
        for (const auto& l : b.lines) DrawText(img, l.x, l.y, l.text, 1, false, b.ink);
        break;
      case Category::kTable: {
        const int x0 = static_cast<int>(b.bbox.x);
        const int w = static_cast<int>(b.bbox.w);
        const int y0 = static_cast<int>(b.bbox.y);
        const int h = static_cast<int>(b.bbox.h);
        for (int ry : b.row_lines) FillGray(img, x0, ry, w, 1, b.ink);
        for (int cx : b.col_lines) FillGray(img, cx, y0, 1, h, b.ink);
        for (const auto& l : b.lines) DrawText(img, l.x, l.y, l.text, 1, false, b.ink);
        break;
      }
      case Category::kFigure:
        RenderFigure(img, b, b.ink);
        break;
    }
  }
  if (layout.noise > 0.0) {
    Rng rng(layout.noise_seed);
    for (std::size_t i = 0; i < img.data.size(); i += 3) {
      const double d = layout.noise * rng.Normal();
      for (std::size_t k = i; k < i + 3; ++k) {
        img.data[k] = static_cast<std::uint8_t>(std::clamp(std::lround(img.data[k] + d), 0L, 255L));
      }
    }
  }
  return img;
}

class SyntheticPageSource : public PageSource {
 public:
  explicit SyntheticPageSource(std::unordered_map<std::string, PageLayout> layouts)
      : layouts_(std::move(layouts)) {}

  Image Load(const PageInfo& page) const override {
    auto it = layouts_.find(page.page_id);
    if (it == layouts_.end()) Fail(ErrorKind::kLookup, "no synthetic layout for page " + page.page_id);
    return RenderPage(it->second);
  }

 private:
  std::unordered_map<std::string, PageLayout> layouts_;
};

// Places blocks top-to-bottom in `columns` columns, shrinking the tallest
// shrinkable block until everything fits. Returns false if some block had to
// be dropped.
std::vector<std::pair<int, int>> Pack(std::vector<BlockLayout>& blocks, int columns, int top, int bottom) {
  for (;;) {
    std::vector<std::pair<int, int>> placement;  // (column, y)
    int total = 0;
    for (const auto& b : blocks) total += BlockHeight(b) + kBlockGap;
    const int balanced = top + total / columns;
    int col = 0;
    int y = top;
    bool fits = true;
    for (const auto& b : blocks) {
      const int h = BlockHeight(b);
      if (col + 1 < columns && y > top && y + h / 2 > balanced) {
        ++col;
        y = top;
      }
      if (y + h > bottom) {
        if (col + 1 < columns) {
          ++col;
          y = top;
        }
        if (y + h > bottom) {
          fits = false;
          break;
        }
      }
      placement.emplace_back(col, y);
      y += h + kBlockGap;
    }
    if (fits) return placement;
    std::size_t best = blocks.size();
    int best_h = -1;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      BlockLayout probe = blocks[i];
      if (Shrink(probe) && BlockHeight(blocks[i]) > best_h) {
        best = i;
        best_h = BlockHeight(blocks[i]);
      }
    }
    if (best == blocks.size()) {
      blocks.pop_back();
      continue;
    }
    Shrink(blocks[best]);
  }
}

PageLayout LayoutPage(const SynthSpec& spec, std::vector<Category> cats, Rng& rng) {
  PageLayout page;
  page.width = spec.page_width;
  page.height = spec.page_height;
  page.background = rng.Bernoulli(0.75) ? 255 : static_cast<std::uint8_t>(rng.UniformInt(238, 254));
  const auto ink = static_cast<std::uint8_t>(rng.UniformInt(0, 70));
  page.noise = rng.Uniform(2.0, 5.0);
  page.noise_seed = rng.NextU64();
  rng.Shuffle(std::span<Category>(cats));
  const int columns = (cats.size() >= 10 || rng.Bernoulli(0.35)) ? 2 : 1;
  const int usable_w = spec.page_width - 2 * kMargin;
  const int col_w = columns == 1 ? usable_w : (usable_w - kColumnGap) / 2;
  for (Category c : cats) {
    BlockLayout b;
    b.category = c;
    b.ink = ink;
    switch (c) {
      case Category::kText:
        b.units = rng.Bernoulli(0.08) ? 1 : static_cast<int>(rng.UniformInt(2, 8));
        break;
      case Category::kTitle:
        b.scale = rng.Bernoulli(0.4) ? 2 : 1;
        b.bold = rng.Bernoulli(0.85);
        b.words = static_cast<int>(rng.UniformInt(1, 4));
        break;
      case Category::kList:
        for (int i = 0, n = static_cast<int>(rng.UniformInt(3, 6)); i < n; ++i) {
          b.item_lines.push_back(rng.Bernoulli(0.25) ? 2 : 1);
        }
        break;
      case Category::kTable:
        b.units = static_cast<int>(rng.UniformInt(3, 7));
        b.columns = static_cast<int>(rng.UniformInt(2, columns == 1 ? 5 : 3));
        break;
      case Category::kFigure:
        b.units = static_cast<int>(rng.UniformInt(60, 150));
        break;
    }
    page.blocks.push_back(std::move(b));
  }
  const auto placement = Pack(page.blocks, columns, kMargin, spec.page_height - kMargin);
  page.blocks.resize(placement.size());
  for (std::size_t i = 0; i < page.blocks.size(); ++i) {
    auto& b = page.blocks[i];
    const int x = kMargin + placement[i].first * (col_w + kColumnGap);
    const int y = placement[i].second;
    switch (b.category) {
      case Category::kText: LayoutText(rng, b, x, y, col_w); break;
      case Category::kTitle: LayoutTitle(rng, b, x, y, col_w); break;
      case Category::kList: LayoutList(rng, b, x, y, col_w); break;
      case Category::kTable: LayoutTable(rng, b, x, y, col_w); break;
      case Category::kFigure: LayoutFigure(rng, b, x, y, col_w); break;
    }
    std::string text;
    for (const auto& l : b.lines) {
      if (!text.empty()) text.push_back('\n');
      text += l.text;
    }
    b.text = std::move(text);
  }
  return page;
}

}  // namespace

int TextWidth(const std::string& text, int scale, bool bold) {
  if (text.empty()) return 0;
  return static_cast<int>(text.size()) * kAdvance * scale - scale + (bold ? 1 : 0);
}

int DrawText(Image& image, int x, int y, const std::string& text, int scale, bool bold, std::uint8_t ink) {
  int cx = x;
  for (char ch : text) {
    if (const auto* glyph = FindGlyph(ch); glyph != nullptr) {
      for (int col = 0; col < kGlyphW; ++col) {
        for (int row = 0; row < kGlyphH; ++row) {
          if (((*glyph)[col] >> row) & 1U) {
            const int px = cx + col * scale;
            const int py = y + row * scale;
            FillGray(image, px, py, scale + (bold ? 1 : 0), scale, ink);
          }
        }
      }
    }
    cx += kAdvance * scale;
  }
  return cx - x;
}

void ValidateSynthSpec(const SynthSpec& spec) {
  if (spec.pages <= 0) Fail(ErrorKind::kConfiguration, "synthetic corpus needs at least one page");
  if (spec.page_width < 160 || spec.page_height < 160) {
    Fail(ErrorKind::kConfiguration, "synthetic pages must be at least 160x160 pixels");
  }
  double total = 0.0;
  for (double w : spec.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) Fail(ErrorKind::kConfiguration, "category weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) Fail(ErrorKind::kConfiguration, "category weights are all zero");
}

Corpus GenerateSyntheticCorpus(const SynthSpec& spec, std::uint64_t seed) {
  ValidateSynthSpec(spec);
  Rng alloc_rng(MixSeed(seed, 0xA11C));
  std::vector<std::vector<Category>> per_page(static_cast<std::size_t>(spec.pages));
  for (Category c : kAllCategories) {
    const double w = spec.weights[static_cast<std::size_t>(CategoryCode(c))];
    const auto total = static_cast<std::int64_t>(std::llround(w * spec.pages));
    const auto base = static_cast<std::int64_t>(std::floor(w));
    for (auto& page : per_page) page.insert(page.end(), static_cast<std::size_t>(base), c);
    std::int64_t extra = total - base * spec.pages;
    std::vector<std::size_t> order(per_page.size());
    std::iota(order.begin(), order.end(), 0);
    alloc_rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < order.size() && extra > 0; ++i, --extra) per_page[order[i]].push_back(c);
  }

  std::vector<PageInfo> pages;
  std::vector<BlockAnnotation> annotations;
  std::map<std::int64_t, std::string> texts;
  std::unordered_map<std::string, PageLayout> layouts;
  std::int64_t next_id = 1;
  for (int p = 0; p < spec.pages; ++p) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(p) + 1));
    PageLayout layout = LayoutPage(spec, per_page[static_cast<std::size_t>(p)], rng);
    PageInfo info;
    info.page_id = std::to_string(p + 1);
    info.width = spec.page_width;
    info.height = spec.page_height;
    char name[32];
    std::snprintf(name, sizeof(name), "page_%05d.png", p + 1);
    info.file_name = name;
    for (const auto& b : layout.blocks) {
      BlockAnnotation a;
      a.id = next_id++;
      a.page_id = info.page_id;
      a.bbox = b.bbox;
      a.category = b.category;
      annotations.push_back(a);
      texts[a.id] = b.text;
    }
    layouts.emplace(info.page_id, std::move(layout));
    pages.push_back(std::move(info));
  }
  auto source = std::make_shared<SyntheticPageSource>(std::move(layouts));
  return Corpus(std::move(pages), std::move(annotations), Split{SplitKind::kTrain}, std::move(texts),
                std::move(source));
}

void WriteSyntheticCorpus(const Corpus& corpus, const std::filesystem::path& out_dir, double validation_fraction,
                          int workers) {
  std::filesystem::create_directories(out_dir / "images");
  const auto& pages = corpus.pages();
  ParallelFor(pages.size(), workers, [&](std::size_t i) {
    WritePng(out_dir / "images" / pages[i].file_name, corpus.LoadPage(pages[i].page_id).pixels);
  });
  const auto [train, val] = SplitPages(corpus, validation_fraction);
  WriteCoco(out_dir / "train.json", train.pages(), train.annotations());
  WriteCoco(out_dir / "val.json", val.pages(), val.annotations());
  WriteBlockTexts(out_dir / "texts.json", corpus.block_texts());
}

}  // namespace vtlayout
