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

#include "vtlayout/corpus/coco.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "vtlayout/common/error.hpp"

namespace vtlayout {

using nlohmann::json;

namespace {

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

json ParseJson(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(e.what(), static_cast<std::int64_t>(e.byte));
  }
}

const json& RequireArray(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
    Fail(ErrorKind::kSchema, std::string("missing array '") + key + "'");
  }
  return doc[key];
}

std::map<std::int64_t, Category> ParseCategories(const json& doc) {
  std::map<std::int64_t, Category> out;
  for (const auto& c : RequireArray(doc, "categories")) {
    if (!c.contains("id") || !c.contains("name") || !c["name"].is_string()) {
      Fail(ErrorKind::kSchema, "category entry needs id and name");
    }
    const std::string name = c["name"].get<std::string>();
    auto cat = ParseCategory(name);
    if (!cat) Fail(ErrorKind::kSchema, "unknown category name '" + name + "'");
    out[c["id"].get<std::int64_t>()] = *cat;
  }
  return out;
}

BBox ParseBox(const json& a, std::int64_t id) {
  if (!a.contains("bbox") || !a["bbox"].is_array() || a["bbox"].size() != 4) {
    Fail(ErrorKind::kSchema, "annotation " + std::to_string(id) + " has no 4-element bbox");
  }
  const auto& b = a["bbox"];
  BBox box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  if (!(box.w > 0) || !(box.h > 0)) {
    Fail(ErrorKind::kSchema, "annotation " + std::to_string(id) + " has non-positive bbox size");
  }
  return box;
}

}  // namespace

int CocoCategoryId(Category c) {
  switch (c) {
    case Category::kText: return 1;
    case Category::kTitle: return 2;
    case Category::kList: return 3;
    case Category::kTable: return 4;
    case Category::kFigure: return 5;
  }
  return 0;
}

Corpus ParseCocoAnnotations(const std::string& json_text, Split split, std::shared_ptr<const PageSource> source) {
  const json doc = ParseJson(json_text);
  const auto categories = ParseCategories(doc);

  std::vector<PageInfo> pages;
  std::unordered_map<std::int64_t, std::string> image_ids;
  for (const auto& img : RequireArray(doc, "images")) {
    if (!img.contains("id")) Fail(ErrorKind::kSchema, "image entry without id");
    PageInfo p;
    const auto id = img["id"].get<std::int64_t>();
    p.page_id = std::to_string(id);
    p.file_name = img.value("file_name", std::string());
    p.width = img.value("width", 0);
    p.height = img.value("height", 0);
    if (p.width <= 0 || p.height <= 0) Fail(ErrorKind::kSchema, "image " + p.page_id + " has no positive size");
    image_ids[id] = p.page_id;
    pages.push_back(std::move(p));
  }

  std::vector<BlockAnnotation> annotations;
  for (const auto& a : RequireArray(doc, "annotations")) {
    BlockAnnotation ann;
    ann.id = a.value("id", static_cast<std::int64_t>(annotations.size()));
    if (!a.contains("image_id")) Fail(ErrorKind::kSchema, "annotation " + std::to_string(ann.id) + " has no image_id");
    const auto image_id = a["image_id"].get<std::int64_t>();
    auto page = image_ids.find(image_id);
    if (page == image_ids.end()) {
      Fail(ErrorKind::kIntegrity,
           "annotation " + std::to_string(ann.id) + " references missing image " + std::to_string(image_id));
    }
    ann.page_id = page->second;
    ann.bbox = ParseBox(a, ann.id);
    if (!a.contains("category_id")) {
      Fail(ErrorKind::kSchema, "ground-truth annotation " + std::to_string(ann.id) + " has no category_id");
    }
    const auto cat_id = a["category_id"].get<std::int64_t>();
    auto cat = categories.find(cat_id);
    if (cat == categories.end()) {
      Fail(ErrorKind::kSchema, "annotation " + std::to_string(ann.id) + " uses unknown category_id " +
                                   std::to_string(cat_id));
    }
    ann.category = cat->second;
    if (a.contains("score")) ann.score = a["score"].get<double>();
    annotations.push_back(std::move(ann));
  }
  return Corpus(std::move(pages), std::move(annotations), split, {}, std::move(source));
}

Corpus LoadCocoAnnotations(const std::filesystem::path& path, Split split, std::shared_ptr<const PageSource> source) {
  return ParseCocoAnnotations(ReadText(path), split, std::move(source));
}

DetectionMap ParseDetections(const std::string& json_text) {
  const json doc = ParseJson(json_text);
  std::map<std::int64_t, Category> categories;
  if (doc.is_object() && doc.contains("categories")) categories = ParseCategories(doc);
  std::unordered_map<std::int64_t, std::string> image_ids;
  if (doc.is_object() && doc.contains("images")) {
    for (const auto& img : RequireArray(doc, "images")) {
      const auto id = img.at("id").get<std::int64_t>();
      image_ids[id] = std::to_string(id);
    }
  }
  DetectionMap out;
  std::int64_t next_id = 0;
  for (const auto& a : RequireArray(doc, "annotations")) {
    BlockAnnotation ann;
    ann.id = a.value("id", next_id);
    ++next_id;
    if (!a.contains("image_id")) Fail(ErrorKind::kSchema, "detection without image_id");
    const auto image_id = a["image_id"].get<std::int64_t>();
    if (!image_ids.empty() && !image_ids.contains(image_id)) {
      Fail(ErrorKind::kIntegrity, "detection " + std::to_string(ann.id) + " references missing image " +
                                      std::to_string(image_id));
    }
    ann.page_id = std::to_string(image_id);
    ann.bbox = ParseBox(a, ann.id);
    if (!a.contains("score")) Fail(ErrorKind::kSchema, "detection " + std::to_string(ann.id) + " has no score");
    const double score = a["score"].get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
      Fail(ErrorKind::kSchema, "detection " + std::to_string(ann.id) + " score outside [0,1]");
    }
    ann.score = score;
    if (a.contains("category_id") && !a["category_id"].is_null()) {
      auto cat = categories.find(a["category_id"].get<std::int64_t>());
      if (cat == categories.end()) {
        Fail(ErrorKind::kSchema, "detection " + std::to_string(ann.id) + " uses unknown category_id");
      }
      ann.category = cat->second;
    }
    out[ann.page_id].push_back(std::move(ann));
  }
  return out;
}

DetectionMap LoadDetections(const std::filesystem::path& path) { return ParseDetections(ReadText(path)); }

std::string CocoToJson(const std::vector<PageInfo>& pages, const std::vector<BlockAnnotation>& annotations) {
  json doc;
  doc["images"] = json::array();
  for (const auto& p : pages) {
    json img;
    try {
      img["id"] = std::stoll(p.page_id);
    } catch (const std::exception&) {
      Fail(ErrorKind::kSchema, "COCO output needs numeric page ids, got " + p.page_id);
    }
    img["file_name"] = p.file_name;
    img["width"] = p.width;
    img["height"] = p.height;
    doc["images"].push_back(std::move(img));
  }
  doc["annotations"] = json::array();
  for (const auto& a : annotations) {
    json ann;
    ann["id"] = a.id;
    ann["image_id"] = std::stoll(a.page_id);
    ann["bbox"] = {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h};
    ann["area"] = a.bbox.area();
    ann["iscrowd"] = 0;
    if (a.category) ann["category_id"] = CocoCategoryId(*a.category);
    if (a.score) ann["score"] = *a.score;
    doc["annotations"].push_back(std::move(ann));
  }
  doc["categories"] = json::array();
  for (Category c : {Category::kText, Category::kTitle, Category::kList, Category::kTable, Category::kFigure}) {
    std::string name(CategoryName(c));
    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    doc["categories"].push_back({{"id", CocoCategoryId(c)}, {"name", name}, {"supercategory", ""}});
  }
  return doc.dump();
}

void WriteCoco(const std::filesystem::path& path, const std::vector<PageInfo>& pages,
               const std::vector<BlockAnnotation>& annotations) {
  WriteText(path, CocoToJson(pages, annotations));
}

std::map<std::int64_t, std::string> LoadBlockTexts(const std::filesystem::path& path) {
  const json doc = ParseJson(ReadText(path));
  if (!doc.is_object()) Fail(ErrorKind::kSchema, "block text sidecar must be an object");
  std::map<std::int64_t, std::string> out;
  for (const auto& [key, value] : doc.items()) {
    try {
      out[std::stoll(key)] = value.get<std::string>();
    } catch (const std::exception&) {
      Fail(ErrorKind::kSchema, "bad block text entry '" + key + "'");
    }
  }
  return out;
}

void WriteBlockTexts(const std::filesystem::path& path, const std::map<std::int64_t, std::string>& texts) {
  // Written by hand so keys keep numeric order.
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [id, text] : texts) {
    if (!first) os << ',';
    first = false;
    os << '"' << id << "\":" << json(text).dump();
  }
  os << '}';
  WriteText(path, os.str());
}

}  // namespace vtlayout
