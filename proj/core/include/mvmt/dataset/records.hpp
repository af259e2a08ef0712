// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "mvmt/dataset/labels.hpp"

namespace mvmt::data {

struct RecordMeta {
  std::string record_id;
  LabelVector labels;
  /// Free-text clinical note; empty means absent.
  std::string note_text;
  /// Waveform file, as written in the manifest (may be relative to it).
  std::string waveform_path;
};

}  // namespace mvmt::data
