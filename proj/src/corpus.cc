// src/corpus.cc

// Copyright 2026  htrpipe authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "htr/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "htr/common.h"

namespace htr {

using nlohmann::json;

const char* ToString(LineStatus s) {
  switch (s) {
    case LineStatus::kAuto: return "auto";
    case LineStatus::kVerified: return "verified";
    case LineStatus::kSelected: return "selected";
    case LineStatus::kDiscarded: return "discarded";
  }
  throw Error("unknown LineStatus");
}

LineStatus LineStatusFromString(const std::string& s) {
  if (s == "auto") return LineStatus::kAuto;
  if (s == "verified") return LineStatus::kVerified;
  if (s == "selected") return LineStatus::kSelected;
  if (s == "discarded") return LineStatus::kDiscarded;
  throw Error("unknown line status '" + s + "'");
}

namespace {

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open file for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(path + ": write failed");
}

json ParseJsonOrThrow(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(origin + ": malformed JSON");
  return j;
}

// Manifests are written as {"schema_version":1, <key>:[...]}; bare arrays
// are accepted on input for interoperability.
json ManifestArray(const json& j, const std::string& key,
                   const std::string& origin) {
  if (j.is_array()) return j;
  if (j.is_object() && j.contains(key) && j[key].is_array()) return j[key];
  throw Error(origin + ": expected a JSON array or an object with '" + key +
              "'");
}

std::string RecordName(const LineRecord& r) {
  return r.page_id + ":" + std::to_string(r.line_index);
}

}  // namespace

void ValidateLineRecords(const std::vector<LineRecord>& lines) {
  std::map<std::string, std::vector<const LineRecord*>> by_page;
  for (const auto& r : lines) {
    if (r.page_id.empty())
      throw Error("line record with empty page_id (index " +
                  std::to_string(r.line_index) + ")");
    if (r.line_index < 0)
      throw Error("line record " + RecordName(r) + ": negative line_index");
    if (r.bbox.w < 1 || r.bbox.h < 1 || r.bbox.x < 0 || r.bbox.y < 0)
      throw Error("line record " + RecordName(r) + ": degenerate bbox");
    if ((r.status == LineStatus::kSelected ||
         r.status == LineStatus::kVerified) &&
        !r.transcript.has_value())
      throw Error("line record " + RecordName(r) + ": status '" +
                  ToString(r.status) + "' requires a transcript");
    if (r.transcript &&
        r.transcript->find_first_of("\n\r") != std::string::npos)
      throw Error("line record " + RecordName(r) +
                  ": transcript contains a line break");
    by_page[r.page_id].push_back(&r);
  }
  for (auto& [page, recs] : by_page) {
    std::sort(recs.begin(), recs.end(),
              [](const LineRecord* a, const LineRecord* b) {
                return a->line_index < b->line_index;
              });
    for (size_t i = 1; i < recs.size(); ++i) {
      if (recs[i]->line_index == recs[i - 1]->line_index)
        throw Error("line record " + RecordName(*recs[i]) +
                    ": duplicate line_index within page");
      double prev_cy = recs[i - 1]->bbox.y + recs[i - 1]->bbox.h / 2.0;
      double cy = recs[i]->bbox.y + recs[i]->bbox.h / 2.0;
      if (cy <= prev_cy)
        throw Error("line record " + RecordName(*recs[i]) +
                    ": line_index order disagrees with bbox vertical center");
    }
  }
}

std::string EncodeCorpusManifest(const std::vector<PageRecord>& pages) {
  json arr = json::array();
  std::set<std::string> ids;
  for (const auto& p : pages) {
    if (p.page_id.empty()) throw Error("page record with empty page_id");
    if (!ids.insert(p.page_id).second)
      throw Error("duplicate page_id '" + p.page_id + "'");
    for (const auto& t : p.transcript)
      if (t.find_first_of("\n\r") != std::string::npos)
        throw Error("page '" + p.page_id +
                    "': transcript line contains a line break");
    arr.push_back({{"page_id", p.page_id},
                   {"image", p.image_path},
                   {"transcript", p.transcript}});
  }
  json root = {{"schema_version", 1}, {"pages", arr}};
  return root.dump(2) + "\n";
}

std::vector<PageRecord> DecodeCorpusManifest(const std::string& text,
                                             const std::string& origin) {
  json root = ParseJsonOrThrow(text, origin);
  json arr = ManifestArray(root, "pages", origin);
  std::vector<PageRecord> pages;
  std::set<std::string> ids;
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("page_id") || !e.contains("image") ||
        !e.contains("transcript"))
      throw Error(origin + ": page entry missing page_id/image/transcript");
    PageRecord p;
    p.page_id = e["page_id"].get<std::string>();
    p.image_path = e["image"].get<std::string>();
    for (const auto& t : e["transcript"]) {
      std::string line = t.get<std::string>();
      if (line.find_first_of("\n\r") != std::string::npos)
        throw Error(origin + ": page '" + p.page_id +
                    "': transcript line contains a line break");
      p.transcript.push_back(std::move(line));
    }
    if (p.page_id.empty()) throw Error(origin + ": empty page_id");
    if (!ids.insert(p.page_id).second)
      throw Error(origin + ": duplicate page_id '" + p.page_id + "'");
    pages.push_back(std::move(p));
  }
  return pages;
}

std::vector<PageRecord> LoadCorpusManifest(const std::string& path) {
  return DecodeCorpusManifest(ReadTextFile(path), path);
}

void SaveCorpusManifest(const std::vector<PageRecord>& pages,
                        const std::string& path) {
  WriteTextFile(path, EncodeCorpusManifest(pages));
}

std::string EncodeLineManifest(const std::vector<LineRecord>& lines) {
  ValidateLineRecords(lines);
  json arr = json::array();
  for (const auto& r : lines) {
    json e = {{"page_id", r.page_id},
              {"line_index", r.line_index},
              {"bbox", {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h}},
              {"image", r.image_path},
              {"status", ToString(r.status)}};
    if (r.transcript) e["transcript"] = *r.transcript;
    arr.push_back(std::move(e));
  }
  json root = {{"schema_version", 1}, {"lines", arr}};
  return root.dump(2) + "\n";
}

std::vector<LineRecord> DecodeLineManifest(const std::string& text,
                                           const std::string& origin) {
  json root = ParseJsonOrThrow(text, origin);
  json arr = ManifestArray(root, "lines", origin);
  std::vector<LineRecord> lines;
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("page_id") || !e.contains("line_index") ||
        !e.contains("bbox") || !e.contains("image") || !e.contains("status"))
      throw Error(origin + ": line entry missing a required field");
    LineRecord r;
    r.page_id = e["page_id"].get<std::string>();
    r.line_index = e["line_index"].get<int>();
    auto bbox = e["bbox"];
    if (!bbox.is_array() || bbox.size() != 4)
      throw Error(origin + ": line " + RecordName(r) +
                  ": bbox must be [x,y,w,h]");
    r.bbox = {bbox[0].get<int>(), bbox[1].get<int>(), bbox[2].get<int>(),
              bbox[3].get<int>()};
    r.image_path = e["image"].get<std::string>();
    r.status = LineStatusFromString(e["status"].get<std::string>());
    if (e.contains("transcript"))
      r.transcript = e["transcript"].get<std::string>();
    lines.push_back(std::move(r));
  }
  ValidateLineRecords(lines);
  return lines;
}

std::vector<LineRecord> LoadLineManifest(const std::string& path) {
  return DecodeLineManifest(ReadTextFile(path), path);
}

void SaveLineManifest(const std::vector<LineRecord>& lines,
                      const std::string& path) {
  WriteTextFile(path, EncodeLineManifest(lines));
}

}  // namespace htr
