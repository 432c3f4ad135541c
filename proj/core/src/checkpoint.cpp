// Copyright 2026 The SwarmFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Checkpoint file: fixed header followed by a cereal portable-binary payload.
//
//   magic "SWFZCKPT" | u32 version | u32 n + description | u64 payload size
//   | u32 crc32(payload) | payload
//
// Integers in the header are little-endian.
#include <cstring>
#include <fstream>
#include <sstream>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/array.hpp>
#include <cereal/types/optional.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>
#include <zlib.h>

#include "swarmfuzz/campaign.hpp"
#include "swarmfuzz/error.hpp"

namespace cereal {

template <class Archive>
void save(Archive& ar, const swarmfuzz::Rng& rng) {
  ar(rng.serialize());
}
template <class Archive>
void load(Archive& ar, swarmfuzz::Rng& rng) {
  std::string s;
  ar(s);
  rng = swarmfuzz::Rng::deserialize(s);
}

template <class Archive>
void save(Archive& ar, const swarmfuzz::dut::CoverageMap& cov) {
  ar(cov.bits().to_string());
}
template <class Archive>
void load(Archive& ar, swarmfuzz::dut::CoverageMap& cov) {
  std::string s;
  ar(s);
  if (s.size() != swarmfuzz::dut::kNumCoveragePoints) {
    throw swarmfuzz::IntegrityError("checkpoint: coverage map size mismatch");
  }
  cov = swarmfuzz::dut::CoverageMap(swarmfuzz::dut::CoverageMap::Bits(s));
}

template <class Archive>
void save(Archive& ar, const swarmfuzz::isa::TestProgram& p) {
  std::vector<std::uint32_t> words;
  words.reserve(p.instructions.size());
  for (const auto& ins : p.instructions) words.push_back(ins.encoding());
  ar(p.id, words);
}
template <class Archive>
void load(Archive& ar, swarmfuzz::isa::TestProgram& p) {
  std::vector<std::uint32_t> words;
  ar(p.id, words);
  p.instructions.clear();
  for (std::uint32_t w : words) p.instructions.push_back(swarmfuzz::isa::Instruction::decode(w));
}

template <class Archive>
void serialize(Archive& ar, swarmfuzz::pso::Particle& p) {
  ar(p.rows, p.position, p.velocity, p.local_best_position, p.local_best_fitness,
     p.stagnation_count);
}

template <class Archive>
void serialize(Archive& ar, swarmfuzz::pso::SwarmState& s) {
  ar(s.particles, s.global_best_position, s.global_best_fitness);
}

template <class Archive>
void serialize(Archive& ar, swarmfuzz::campaign::ThreadState& t) {
  ar(t.rng, t.base, t.pending, t.coverage_union);
}

template <class Archive>
void serialize(Archive& ar, swarmfuzz::campaign::IterationRecord& r) {
  ar(r.iter, r.tests_total, r.coverage, r.new_points, r.resets_m, r.resets_t,
     r.gbest_fitness, r.velocity_norms);
}

// out_dir and jobs describe the invocation, not the campaign, and are not stored.
template <class Archive>
void save(Archive& ar, const swarmfuzz::campaign::CampaignConfig& c) {
  ar(static_cast<std::uint8_t>(c.variant), c.n_particles, c.program_len, c.k, c.beta_m,
     c.beta_t, c.target_coverage.is_fraction, c.target_coverage.value, c.max_tests,
     c.time_limit_secs, c.rng_seed, c.checkpoint_every, c.bugs,
     c.disable_reset, c.disable_seed_pso);
}
template <class Archive>
void load(Archive& ar, swarmfuzz::campaign::CampaignConfig& c) {
  std::uint8_t variant = 0;
  ar(variant, c.n_particles, c.program_len, c.k, c.beta_m, c.beta_t,
     c.target_coverage.is_fraction, c.target_coverage.value, c.max_tests,
     c.time_limit_secs, c.rng_seed, c.checkpoint_every, c.bugs,
     c.disable_reset, c.disable_seed_pso);
  if (variant >= swarmfuzz::campaign::kAllVariants.size()) {
    throw swarmfuzz::IntegrityError("checkpoint: unknown variant");
  }
  c.variant = static_cast<swarmfuzz::campaign::Variant>(variant);
}

template <class Archive>
void serialize(Archive& ar, swarmfuzz::campaign::CampaignState& s) {
  ar(s.iteration, s.tests_total, s.next_test_id, s.swarm_m, s.swarm_t, s.rng_m, s.rng_t,
     s.threads, s.survival.births(), s.coverage, s.corpus, s.first_detection, s.records,
     s.mismatch_log);
}

}  // namespace cereal

namespace swarmfuzz::campaign {
namespace {

constexpr char kMagic[8] = {'S', 'W', 'F', 'Z', 'C', 'K', 'P', 'T'};
constexpr std::string_view kDescription =
    "swarmfuzz campaign checkpoint: config and state, cereal portable binary, crc32";

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) {
    throw IntegrityError("checkpoint: truncated header");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += static_cast<std::size_t>(bytes);
  return v;
}

std::uint32_t crc_of(const std::string& data) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

void check_consistency(const CampaignConfig& cfg, const CampaignState& st) {
  const VariantPolicy policy = cfg.policy();
  bool ok = st.threads.size() == cfg.n_particles &&
            st.survival.size() == cfg.n_particles &&
            st.records.size() == st.iteration;
  if (policy.swarm) ok = ok && st.swarm_m.particles.size() == cfg.n_particles;
  if (policy.seed_pso) ok = ok && st.swarm_t.particles.size() == cfg.n_particles;
  for (const ThreadState& t : st.threads) {
    ok = ok && t.pending.instructions.size() == cfg.program_len;
  }
  if (!ok) throw IntegrityError("checkpoint: inconsistent campaign state");
}

}  // namespace

void write_checkpoint(const std::filesystem::path& file, const CampaignConfig& cfg,
                      const CampaignState& st) {
  std::ostringstream payload_stream(std::ios::binary);
  {
    cereal::PortableBinaryOutputArchive ar(payload_stream);
    ar(cfg, st);
  }
  const std::string payload = payload_stream.str();

  std::string out(kMagic, sizeof kMagic);
  put_le(out, kCheckpointVersion, 4);
  put_le(out, kDescription.size(), 4);
  out += kDescription;
  put_le(out, payload.size(), 8);
  put_le(out, crc_of(payload), 4);
  out += payload;

  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw ConfigError("cannot write checkpoint " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw ConfigError("cannot move checkpoint into place: " + ec.message());
}

std::pair<CampaignConfig, CampaignState> read_checkpoint(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw IntegrityError("checkpoint: cannot open " + file.string());
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

  if (data.size() < sizeof kMagic || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) {
    throw IntegrityError("checkpoint: bad magic");
  }
  std::size_t pos = sizeof kMagic;
  const auto version = get_le(data, pos, 4);
  if (version != kCheckpointVersion) {
    throw IntegrityError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto desc_len = get_le(data, pos, 4);
  if (pos + desc_len > data.size()) throw IntegrityError("checkpoint: truncated header");
  pos += desc_len;
  const auto size = get_le(data, pos, 8);
  const auto crc = get_le(data, pos, 4);
  if (data.size() - pos != size) throw IntegrityError("checkpoint: payload size mismatch");
  const std::string payload = data.substr(pos);
  if (crc_of(payload) != crc) throw IntegrityError("checkpoint: checksum mismatch");

  CampaignConfig cfg;
  CampaignState st;
  try {
    std::istringstream payload_stream(payload, std::ios::binary);
    cereal::PortableBinaryInputArchive ar(payload_stream);
    ar(cfg, st);
  } catch (const IntegrityError&) {
    throw;
  } catch (const std::exception& e) {
    throw IntegrityError(std::string("checkpoint: malformed payload: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("checkpoint: invalid config: ") + e.what());
  }
  check_consistency(cfg, st);
  return {std::move(cfg), std::move(st)};
}

}  // namespace swarmfuzz::campaign
