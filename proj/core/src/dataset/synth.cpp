// SPDX-License-Identifier: Apache-2.0
#include "mvmt/dataset/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "mvmt/dataset/embeddings.hpp"
#include "mvmt/dataset/manifest.hpp"
#include "mvmt/dataset/waveform_io.hpp"
#include "mvmt/error.hpp"
#include "mvmt/random.hpp"

namespace mvmt::data {
namespace {

constexpr std::uint64_t kCentroidSeed = 0x4D564D54'43454E54ULL;
constexpr double kEmbeddingNoise = 0.01;

constexpr std::array<const char*, kNumClasses> kClassPhrases{
    "sinus rhythm, normal ecg", "myocardial infarction with pathological q waves",
    "st segment and t wave changes", "conduction disturbance, bundle branch block",
    "left ventricular hypertrophy by voltage criteria"};
constexpr std::array<const char*, 4> kFillers{"recorded at rest", "unconfirmed report",
                                              "compared with previous tracing", "technically adequate"};

const std::array<std::vector<double>, kNumClasses>& class_centroids() {
  static const auto centroids = [] {
    std::array<std::vector<double>, kNumClasses> out;
    Rng rng(kCentroidSeed);
    for (auto& c : out) {
      c.resize(kEmbeddingDim);
      double norm = 0.0;
      for (auto& v : c) {
        v = rng.normal();
        norm += v * v;
      }
      for (auto& v : c) v /= std::sqrt(norm);
    }
    return out;
  }();
  return centroids;
}

std::vector<double> make_embedding(const LabelVector& labels, bool informative, Rng& rng) {
  std::vector<double> e(kEmbeddingDim, 0.0);
  if (informative) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (!labels.test(c)) continue;
      for (std::size_t i = 0; i < kEmbeddingDim; ++i) e[i] += class_centroids()[c][i];
    }
  } else {
    for (auto& v : e) v = rng.normal();
  }
  double norm = 0.0;
  for (double v : e) norm += v * v;
  norm = std::sqrt(norm);
  for (auto& v : e) v /= norm;
  if (informative) {
    for (auto& v : e) v += rng.normal(0.0, kEmbeddingNoise);
  }
  return e;
}

std::string make_note(const LabelVector& labels, bool informative, Rng& rng) {
  std::string note;
  if (informative) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (!labels.test(c)) continue;
      if (!note.empty()) note += "; ";
      note += kClassPhrases[c];
    }
  } else {
    note = "ecg reviewed";
  }
  note += ", ";
  note += kFillers[rng.index(kFillers.size())];
  return note + ".";
}

std::vector<double> make_waveform(const LabelVector& labels, double snr_db, Rng& rng) {
  using sigproc::kLeads;
  using sigproc::kRawSamples;
  std::vector<double> samples(kLeads * kRawSamples, 0.0);
  const double signal_power = 0.5 * static_cast<double>(labels.count());
  const double noise_sd = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
  for (std::size_t lead = 0; lead < kLeads; ++lead) {
    double* dst = samples.data() + lead * kRawSamples;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (!labels.test(c)) continue;
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double omega = 2.0 * std::numbers::pi * kClassFrequencyHz[c] / sigproc::kSampleRateHz;
      for (std::size_t s = 0; s < kRawSamples; ++s) dst[s] += std::sin(omega * static_cast<double>(s) + phase);
    }
    for (std::size_t s = 0; s < kRawSamples; ++s) dst[s] += rng.normal(0.0, noise_sd);
  }
  return samples;
}

}  // namespace

std::size_t dual_label_count(std::size_t n_per_class) { return (kNumClasses * n_per_class + 5) / 10; }

std::vector<SynthRecord> synth_dataset(const SynthOptions& options) {
  if (options.n_per_class < 1) throw ContractError("synth_dataset: n_per_class must be at least 1");
  Rng rng(options.seed);
  std::vector<LabelVector> label_sets;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (std::size_t k = 0; k < options.n_per_class; ++k) {
      LabelVector v;
      v.set(c);
      label_sets.push_back(v);
    }
  }
  const std::size_t duals = dual_label_count(options.n_per_class);
  for (std::size_t k = 0; k < duals; ++k) {
    const std::size_t a = rng.index(kNumClasses);
    std::size_t b = rng.index(kNumClasses - 1);
    if (b >= a) ++b;
    LabelVector v;
    v.set(a);
    v.set(b);
    label_sets.push_back(v);
  }

  std::vector<SynthRecord> out;
  out.reserve(label_sets.size());
  char id[32];
  for (std::size_t i = 0; i < label_sets.size(); ++i) {
    std::snprintf(id, sizeof(id), "syn%05zu", i);
    const auto& labels = label_sets[i];
    RecordMeta meta{id, labels, make_note(labels, options.notes_informative, rng),
                    std::string("waveforms/") + id + ".f32"};
    auto samples = make_waveform(labels, options.snr_db, rng);
    auto embedding = make_embedding(labels, options.notes_informative, rng);
    out.push_back(SynthRecord{std::move(meta), sigproc::RawEcg(id, std::move(samples)), std::move(embedding)});
  }
  return out;
}

void write_synth_dataset(const std::vector<SynthRecord>& records, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "waveforms");
  std::vector<RecordMeta> metas;
  std::vector<NotesEmbedding> embeddings;
  for (const auto& r : records) {
    write_raw_waveform(dir / r.meta.waveform_path, r.waveform);
    metas.push_back(r.meta);
    embeddings.push_back(NotesEmbedding{r.meta.record_id, r.embedding});
  }
  write_manifest(dir / "manifest.csv", metas);
  save_embeddings(dir / "embeddings.bin", embeddings);
}

}  // namespace mvmt::data
