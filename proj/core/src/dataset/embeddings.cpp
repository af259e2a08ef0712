// SPDX-License-Identifier: Apache-2.0
#include "mvmt/dataset/embeddings.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mvmt/dataset/manifest.hpp"

namespace mvmt::data {
namespace {

constexpr char kMagic[] = "MVEMB1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

void insert_checked(EmbeddingTable& table, const std::string& id, std::vector<double> values,
                    const std::string& where) {
  if (values.size() != kEmbeddingDim) {
    throw EmbeddingDimensionError(where + ": record " + id + " has " + std::to_string(values.size()) +
                                  " values, expected " + std::to_string(kEmbeddingDim));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteEmbeddingError(where + ": record " + id + " has a non-finite entry");
  }
  if (!table.emplace(id, std::move(values)).second) {
    throw DuplicateRecordError(where + ": duplicate record_id " + id);
  }
}

EmbeddingTable parse_binary(const std::string& bytes, const std::string& name) {
  EmbeddingTable table;
  std::size_t pos = kMagicLen;
  const std::size_t payload = kEmbeddingDim * 4;
  while (pos < bytes.size()) {
    if (pos + 2 > bytes.size()) throw FormatError(name + ": truncated id length");
    const auto hi = static_cast<unsigned char>(bytes[pos]);
    const auto lo = static_cast<unsigned char>(bytes[pos + 1]);
    const std::size_t id_len = (static_cast<std::size_t>(hi) << 8) | lo;
    pos += 2;
    if (pos + id_len + payload > bytes.size()) throw FormatError(name + ": truncated record");
    std::string id = bytes.substr(pos, id_len);
    pos += id_len;
    std::vector<double> values(kEmbeddingDim);
    for (std::size_t i = 0; i < kEmbeddingDim; ++i, pos += 4) {
      std::uint32_t word = 0;
      for (int b = 3; b >= 0; --b) word = (word << 8) | static_cast<unsigned char>(bytes[pos + b]);
      values[i] = static_cast<double>(std::bit_cast<float>(word));
    }
    insert_checked(table, id, std::move(values), name);
  }
  return table;
}

EmbeddingTable parse_csv(const std::string& bytes, const std::string& name) {
  EmbeddingTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto end = bytes.find('\n', start);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1 && fields.front() == "record_id") continue;
    const std::string where = name + ": line " + std::to_string(line_no);
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto& f = fields[i];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError(where + ": column " + std::to_string(i + 1) + " is not a number: '" + f + "'");
      }
      values.push_back(v);
    }
    insert_checked(table, fields.front(), std::move(values), where);
  }
  return table;
}

void put_f32(std::string& out, double value) {
  const auto word = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((word >> (8 * b)) & 0xFF));
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.compare(0, kMagicLen, kMagic) == 0) return parse_binary(bytes, path.string());
  return parse_csv(bytes, path.string());
}

void save_embeddings(const std::filesystem::path& path, const std::vector<NotesEmbedding>& records) {
  std::string out(kMagic, kMagicLen);
  for (const auto& r : records) {
    if (r.record_id.size() > 0xFFFF) throw ContractError("record id too long: " + r.record_id);
    if (r.vector.size() != kEmbeddingDim) {
      throw EmbeddingDimensionError("record " + r.record_id + " has " + std::to_string(r.vector.size()) +
                                    " values, expected " + std::to_string(kEmbeddingDim));
    }
    out.push_back(static_cast<char>((r.record_id.size() >> 8) & 0xFF));
    out.push_back(static_cast<char>(r.record_id.size() & 0xFF));
    out += r.record_id;
    for (double v : r.vector) put_f32(out, v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !f.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw IoError("cannot write embeddings file " + path.string());
  }
}

void save_embeddings_csv(const std::filesystem::path& path, const std::vector<NotesEmbedding>& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write embeddings file " + path.string());
  char buf[64];
  for (const auto& r : records) {
    f << r.record_id;
    for (double v : r.vector) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      f << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    f << '\n';
  }
  if (!f) throw IoError("failed writing embeddings file " + path.string());
}

std::vector<double> toy_embed(std::string_view note_text) {
  std::vector<double> out(kEmbeddingDim, 0.0);
  std::size_t tokens = 0;
  std::size_t i = 0;
  while (i < note_text.size()) {
    while (i < note_text.size() && !std::isalnum(static_cast<unsigned char>(note_text[i]))) ++i;
    if (i >= note_text.size()) break;
    std::uint64_t h = 0xcbf29ce484222325ULL ^ 0x4d564d54ULL;
    while (i < note_text.size() && std::isalnum(static_cast<unsigned char>(note_text[i]))) {
      h ^= static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(note_text[i])));
      h *= 0x100000001b3ULL;
      ++i;
    }
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    out[h % kEmbeddingDim] += (h >> 63) ? -1.0 : 1.0;
    ++tokens;
  }
  if (tokens == 0) throw ContractError("toy_embed: note text has no tokens");
  double norm = 0.0;
  for (double v : out) norm += v * v;
  norm = std::sqrt(norm);
  // Every token can cancel against another; fall back to the first slot.
  if (norm == 0.0) {
    out[0] = 1.0;
    return out;
  }
  for (double& v : out) v /= norm;
  return out;
}

}  // namespace mvmt::data
