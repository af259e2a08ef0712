// SPDX-License-Identifier: Apache-2.0
#include "mvmt/dataset/manifest.hpp"

#include <fstream>
#include <sstream>

#include "mvmt/error.hpp"

namespace mvmt::data {
namespace {

constexpr const char* kHeader = "record_id,labels,note,waveform_path";

// Reads one logical CSV record (quoted fields may span lines). Returns false
// at end of input.
bool read_record(std::istream& in, std::string& record, std::size_t& line_no) {
  record.clear();
  std::string line;
  bool in_quotes = false;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    any = true;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!record.empty() || in_quotes) record += '\n';
    record += line;
    for (char c : line) {
      if (c == '"') in_quotes = !in_quotes;
    }
    if (!in_quotes) return true;
  }
  if (in_quotes) throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted field");
  return any;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_csv(const std::string& field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  return quote_csv(field);
}

std::vector<RecordMeta> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::string record;
  std::size_t line_no = 0;
  if (!read_record(in, record, line_no)) throw ParseError(path.string() + ": no records");
  if (record.rfind("\xEF\xBB\xBF", 0) == 0) record.erase(0, 3);
  if (record != kHeader) {
    throw ParseError(path.string() + ": line 1: expected header '" + std::string(kHeader) + "'");
  }
  std::vector<RecordMeta> out;
  while (true) {
    const std::size_t first_line = line_no + 1;
    if (!read_record(in, record, line_no)) break;
    if (record.empty()) continue;
    const auto where = path.string() + ": line " + std::to_string(first_line);
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(record);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (fields.size() != 4) {
      throw ParseError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(where + ": empty record_id");
    if (fields[3].empty()) throw ParseError(where + ": empty waveform_path");
    RecordMeta meta;
    meta.record_id = fields[0];
    try {
      meta.labels = parse_labels(fields[1]);
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
    meta.note_text = fields[2];
    meta.waveform_path = fields[3];
    out.push_back(std::move(meta));
  }
  if (out.empty()) throw ParseError(path.string() + ": no records");
  return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<RecordMeta>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << kHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.record_id) << ',' << r.labels.to_string() << ',' << quote_csv(r.note_text) << ','
        << csv_field(r.waveform_path) << '\n';
  }
  if (!out) throw IoError("failed writing manifest " + path.string());
}

std::filesystem::path resolve_waveform(const std::filesystem::path& manifest, const std::string& waveform_path) {
  const std::filesystem::path p(waveform_path);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

}  // namespace mvmt::data
