// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/diff/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace sray::diff {

namespace {
constexpr char kMagic[8] = {'S', 'R', 'C', 'K', 'P', 'T', '0', '1'};

template <class T>
void append_raw(std::vector<uint8_t>& out, const T& v) {
  const auto* p = reinterpret_cast<const uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

size_t elem_size(CheckpointEntry::Kind k) {
  switch (k) {
    case CheckpointEntry::F32:
      return 4;
    case CheckpointEntry::F64:
      return 8;
    case CheckpointEntry::U64:
      return 8;
    case CheckpointEntry::U8:
      return 1;
  }
  return 0;
}
}  // namespace

CheckpointEntry CheckpointEntry::from_doubles(const std::string& name, const Shape& shape,
                                              const std::vector<double>& values, Kind kind) {
  SRAY_CHECK(kind == F32 || kind == F64, "from_doubles kind must be f32/f64");
  SRAY_CHECK(static_cast<int64_t>(values.size()) == numel(shape), "value count mismatch");
  CheckpointEntry e;
  e.name = name;
  e.kind = kind;
  e.shape = shape;
  if (kind == F32) {
    e.bytes.reserve(values.size() * 4);
    for (double v : values) append_raw(e.bytes, static_cast<float>(v));
  } else {
    e.bytes.reserve(values.size() * 8);
    for (double v : values) append_raw(e.bytes, v);
  }
  return e;
}

CheckpointEntry CheckpointEntry::from_u64(const std::string& name,
                                          const std::vector<uint64_t>& values) {
  CheckpointEntry e;
  e.name = name;
  e.kind = U64;
  e.shape = {static_cast<int64_t>(values.size())};
  for (uint64_t v : values) append_raw(e.bytes, v);
  return e;
}

CheckpointEntry CheckpointEntry::from_string(const std::string& name, const std::string& text) {
  CheckpointEntry e;
  e.name = name;
  e.kind = U8;
  e.shape = {std::max<int64_t>(1, static_cast<int64_t>(text.size()))};
  e.bytes.assign(text.begin(), text.end());
  if (e.bytes.empty()) e.bytes.push_back(0);
  return e;
}

std::vector<double> CheckpointEntry::to_doubles() const {
  std::vector<double> out(static_cast<size_t>(count()));
  if (kind == F32) {
    for (size_t i = 0; i < out.size(); ++i) {
      float f;
      std::memcpy(&f, bytes.data() + i * 4, 4);
      out[i] = f;
    }
  } else if (kind == F64) {
    for (size_t i = 0; i < out.size(); ++i) std::memcpy(&out[i], bytes.data() + i * 8, 8);
  } else {
    throw ValidationError("checkpoint entry " + name + " is not a float tensor");
  }
  return out;
}

std::vector<uint64_t> CheckpointEntry::to_u64() const {
  if (kind != U64) throw ValidationError("checkpoint entry " + name + " is not u64");
  std::vector<uint64_t> out(static_cast<size_t>(count()));
  for (size_t i = 0; i < out.size(); ++i) std::memcpy(&out[i], bytes.data() + i * 8, 8);
  return out;
}

std::string CheckpointEntry::to_string() const {
  if (kind != U8) throw ValidationError("checkpoint entry " + name + " is not a blob");
  return std::string(bytes.begin(), bytes.end());
}

void write_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot open checkpoint for writing: " + path);
  f.write(kMagic, sizeof(kMagic));
  const uint32_t n = static_cast<uint32_t>(entries.size());
  f.write(reinterpret_cast<const char*>(&n), 4);
  for (const auto& e : entries) {
    const uint16_t len = static_cast<uint16_t>(e.name.size());
    f.write(reinterpret_cast<const char*>(&len), 2);
    f.write(e.name.data(), len);
    const uint8_t kind = static_cast<uint8_t>(e.kind);
    const uint8_t rank = static_cast<uint8_t>(e.shape.size());
    f.write(reinterpret_cast<const char*>(&kind), 1);
    f.write(reinterpret_cast<const char*>(&rank), 1);
    for (int64_t d : e.shape) f.write(reinterpret_cast<const char*>(&d), 8);
    SRAY_CHECK(e.bytes.size() == static_cast<size_t>(e.count()) * elem_size(e.kind),
               "entry byte count mismatch: " + e.name);
  }
  for (const auto& e : entries)
    f.write(reinterpret_cast<const char*>(e.bytes.data()),
            static_cast<std::streamsize>(e.bytes.size()));
  if (!f) throw ValidationError("checkpoint write failed: " + path);
}

std::vector<CheckpointEntry> read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open checkpoint: " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0)
    throw ValidationError("bad checkpoint magic: " + path);
  uint32_t n = 0;
  f.read(reinterpret_cast<char*>(&n), 4);
  std::vector<CheckpointEntry> entries(n);
  for (auto& e : entries) {
    uint16_t len = 0;
    f.read(reinterpret_cast<char*>(&len), 2);
    e.name.resize(len);
    f.read(e.name.data(), len);
    uint8_t kind = 0, rank = 0;
    f.read(reinterpret_cast<char*>(&kind), 1);
    f.read(reinterpret_cast<char*>(&rank), 1);
    if (kind > CheckpointEntry::U8) throw ValidationError("bad dtype in checkpoint: " + path);
    e.kind = static_cast<CheckpointEntry::Kind>(kind);
    e.shape.resize(rank);
    for (auto& d : e.shape) f.read(reinterpret_cast<char*>(&d), 8);
    if (!f) throw ValidationError("truncated checkpoint header: " + path);
  }
  for (auto& e : entries) {
    e.bytes.resize(static_cast<size_t>(e.count()) * elem_size(e.kind));
    f.read(reinterpret_cast<char*>(e.bytes.data()), static_cast<std::streamsize>(e.bytes.size()));
    if (!f) throw ValidationError("truncated checkpoint payload: " + path);
  }
  return entries;
}

const CheckpointEntry& find_entry(const std::vector<CheckpointEntry>& entries,
                                  const std::string& name) {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw ValidationError("checkpoint entry missing: " + name);
}

bool has_entry(const std::vector<CheckpointEntry>& entries, const std::string& name) {
  for (const auto& e : entries)
    if (e.name == name) return true;
  return false;
}

}  // namespace sray::diff
