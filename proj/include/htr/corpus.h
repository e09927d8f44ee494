// include/htr/corpus.h

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

#ifndef HTR_CORPUS_H_
#define HTR_CORPUS_H_

#include <optional>
#include <string>
#include <vector>

namespace htr {

struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool operator==(const Box&) const = default;
};

// A page with its paragraph transcript: text per line is known, line
// geometry is not.
struct PageRecord {
  std::string page_id;
  std::string image_path;
  std::vector<std::string> transcript;  // one reference line per entry
  bool operator==(const PageRecord&) const = default;
};

enum class LineStatus { kAuto, kVerified, kSelected, kDiscarded };

const char* ToString(LineStatus s);
LineStatus LineStatusFromString(const std::string& s);

struct LineRecord {
  std::string page_id;
  int line_index = 0;  // 0-based, top-to-bottom within the page
  Box bbox;            // page pixel coordinates
  std::string image_path;
  LineStatus status = LineStatus::kAuto;
  std::optional<std::string> transcript;
  bool operator==(const LineRecord&) const = default;
};

// Throws with a diagnostic naming the offending record if any invariant
// fails: nonempty page_id, positive bbox extent, transcript present when
// status is selected/verified, no line breaks in transcripts, and
// line_index order consistent with bbox vertical centers per page.
void ValidateLineRecords(const std::vector<LineRecord>& lines);

// Corpus manifest: {"schema_version":1, "pages":[{page_id, image,
// transcript:[...]}]}. A bare JSON array of page objects is also accepted
// on input.
std::vector<PageRecord> LoadCorpusManifest(const std::string& path);
void SaveCorpusManifest(const std::vector<PageRecord>& pages,
                        const std::string& path);

// Line manifest: {"schema_version":1, "lines":[{page_id, line_index,
// bbox:[x,y,w,h], image, status, transcript?}]}. Bare arrays accepted on
// input. Save validates every record first and writes nothing on failure.
std::vector<LineRecord> LoadLineManifest(const std::string& path);
void SaveLineManifest(const std::vector<LineRecord>& lines,
                      const std::string& path);

// In-memory forms used by both the file functions and the reports.
std::string EncodeCorpusManifest(const std::vector<PageRecord>& pages);
std::vector<PageRecord> DecodeCorpusManifest(const std::string& text,
                                             const std::string& origin);
std::string EncodeLineManifest(const std::vector<LineRecord>& lines);
std::vector<LineRecord> DecodeLineManifest(const std::string& text,
                                           const std::string& origin);

}  // namespace htr

#endif  // HTR_CORPUS_H_
