// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/checkpoint.hpp"

#include "slamprune/errors.hpp"
#include "slamprune/io.hpp"

namespace slamprune {

const nn::Tensor& Checkpoint::get(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.tensor;
  }
  fail(ErrorKind::kMissingArtifact, "checkpoint has no tensor '" + std::string(name) + "'");
}

ParamList Checkpoint::with_prefix(std::string_view prefix) const {
  ParamList out;
  for (const auto& t : tensors) {
    if (t.name.starts_with(prefix)) out.push_back({t.name.substr(prefix.size()), t.tensor});
  }
  return out;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kCheckpointMagic);
  io::put_u32(out, kCheckpointVersion);
  io::put_u32(out, static_cast<std::uint32_t>(ckpt.meta.size()));
  out += ckpt.meta;
  io::put_u64(out, ckpt.tensors.size());
  for (const auto& [name, t] : ckpt.tensors) {
    io::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    io::put_u32(out, static_cast<std::uint32_t>(t.shape().size()));
    for (std::size_t d : t.shape()) io::put_u64(out, d);
    for (double v : t.values()) io::put_f64(out, v);
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  io::Reader r(bytes);
  if (r.bytes(kCheckpointMagic.size()) != kCheckpointMagic) {
    fail(ErrorKind::kIo, "not a checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    fail(ErrorKind::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.meta = r.bytes(r.u32());
  const std::uint64_t count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.bytes(r.u32());
    nn::Shape shape(r.u32());
    for (auto& d : shape) d = r.u64();
    std::vector<double> values(nn::numel(shape));
    for (double& v : values) v = r.f64();
    ckpt.tensors.push_back({std::move(name), nn::Tensor::from(std::move(shape), std::move(values))});
  }
  if (!r.done()) fail(ErrorKind::kIo, "trailing bytes after checkpoint tensors");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  io::write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(io::read_file(path));
}

}  // namespace slamprune
