// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sray/diff/tensor.hpp"

namespace sray::diff {

// Checkpoint container: a header listing (name, dtype, shape) per entry,
// followed by the raw little-endian values in declaration order. Alongside
// f32/f64 tensors it stores u64 payloads (step counters, RNG state) and u8
// blobs (embedded config) so training resumes exactly.
struct CheckpointEntry {
  enum Kind : uint8_t { F32 = 0, F64 = 1, U64 = 2, U8 = 3 };

  std::string name;
  Kind kind = F64;
  Shape shape;
  std::vector<uint8_t> bytes;

  static CheckpointEntry from_doubles(const std::string& name, const Shape& shape,
                                      const std::vector<double>& values, Kind kind);
  static CheckpointEntry from_u64(const std::string& name, const std::vector<uint64_t>& values);
  static CheckpointEntry from_string(const std::string& name, const std::string& text);

  std::vector<double> to_doubles() const;
  std::vector<uint64_t> to_u64() const;
  std::string to_string() const;
  int64_t count() const { return numel(shape); }
};

void write_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> read_checkpoint(const std::string& path);

const CheckpointEntry& find_entry(const std::vector<CheckpointEntry>& entries,
                                  const std::string& name);
bool has_entry(const std::vector<CheckpointEntry>& entries, const std::string& name);

}  // namespace sray::diff
