#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "whow/corpus.hpp"

namespace whow {

enum class SourceFormat { whow_jsonl, insq_json, npr_json };

SourceFormat format_from_string(const std::string& s);
const char* to_string(SourceFormat f);

struct IngestError : std::runtime_error {
  int line = 0;  // 1-based source line, 0 when not line-addressable
  IngestError(const std::string& what, int line_no = 0)
      : std::runtime_error(what), line(line_no) {}
};

// Reads one episode from `in` in the given source format, merges consecutive
// same-speaker turns, fills sentence lists (source segmentation is kept
// verbatim; segment_text is applied only where the source has none) and
// validates the result. Throws IngestError with a line number on malformed
// records, unknown speaker references, or a zero/multiple moderator count.
Episode ingest_transcript(std::istream& in, SourceFormat format);
Episode ingest_file(const std::filesystem::path& path, SourceFormat format);

// Canonical interchange format: one JSON object per line. Line 1 is the
// episode header {"kind":"episode","id":...,"domain":...,"topic":...,
// "split":...,"speakers":[{"id":...,"name":...,"role":...}]}, followed by
// one {"kind":"turn","index":...,"speaker":...,"sentences":[...]} per turn.
// UTF-8, LF newlines.
void write_whow_jsonl(const Episode& ep, std::ostream& out);
std::string to_whow_jsonl(const Episode& ep);

// Every *.jsonl file in `dir`, ingested as whow_jsonl, sorted by episode id.
Corpus load_corpus_dir(const std::filesystem::path& dir);

}  // namespace whow
