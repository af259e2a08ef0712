// SPDX-License-Identifier: Apache-2.0
#include "mvmt/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "mvmt/error.hpp"

namespace mvmt::model {
namespace {

constexpr std::string_view kMagic = "MVCKPT1\n";

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  std::string str(std::size_t n) { return std::string(take(n), n); }
  double f64() {
    double v;
    std::memcpy(&v, take(8), 8);
    return v;
  }
  bool done() const { return at_ == bytes_.size(); }

 private:
  const char* take(std::size_t n) {
    if (bytes_.size() - at_ < n) throw FormatError(origin_ + ": checkpoint is truncated");
    const char* p = bytes_.data() + at_;
    at_ += n;
    return p;
  }

  const std::string& bytes_;
  std::string origin_;
  std::size_t at_ = 0;
};

}  // namespace

ModelConfig parse_model_config(std::string_view text) {
  ModelConfig config;
  std::size_t at = 0;
  while (at < text.size()) {
    auto end = text.find('\n', at);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(at, end - at);
    at = end + 1;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError("config line without '=': " + std::string(line));
    if (!config.set(line.substr(0, eq), line.substr(eq + 1))) {
      throw FormatError("unknown model config key '" + std::string(line.substr(0, eq)) + "'");
    }
  }
  return config;
}

void save_checkpoint(const std::filesystem::path& path, const Mvmtnet& model) {
  std::string config_text;
  for (const auto& [k, v] : model.config().to_kv()) config_text += k + "=" + v + "\n";
  std::string out(kMagic);
  put_u32(out, static_cast<std::uint32_t>(config_text.size()));
  out += config_text;
  const auto& params = model.parameters();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put_u32(out, static_cast<std::uint32_t>(p.tensor.rank()));
    for (auto d : p.tensor.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    const auto data = p.tensor.data();
    out.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(double));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write checkpoint " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing checkpoint " + path.string());
}

Mvmtnet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  const std::string origin = path.string();
  Reader in(bytes, origin);
  if (in.str(kMagic.size()) != kMagic) throw FormatError(origin + ": not an MVMTnet checkpoint");
  const std::uint32_t config_len = in.u32();
  ModelConfig config;
  try {
    config = parse_model_config(in.str(config_len));
    config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(origin + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(origin + ": " + e.what());
  }
  Mvmtnet model(config, 0);
  std::map<std::string, ad::Tensor> by_name;
  for (const auto& p : model.parameters()) by_name.emplace(p.name, p.tensor);

  const std::uint32_t count = in.u32();
  if (count != by_name.size()) {
    throw FormatError(origin + ": checkpoint holds " + std::to_string(count) + " tensors, config expects " +
                      std::to_string(by_name.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = in.str(in.u32());
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError(origin + ": unexpected tensor '" + name + "'");
    const std::uint32_t rank = in.u32();
    ad::Shape shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(in.u32());
    ad::Tensor& t = it->second;
    if (shape != t.shape()) {
      throw FormatError(origin + ": tensor '" + name + "' has shape " + ad::shape_str(shape) + ", expected " +
                        ad::shape_str(t.shape()));
    }
    auto data = t.mutable_data();
    for (auto& v : data) v = in.f64();
    by_name.erase(it);
  }
  if (!in.done()) throw FormatError(origin + ": trailing bytes after the last tensor");
  return model;
}

}  // namespace mvmt::model
