#include "genstore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace genstore::synth {

namespace {

void check_rate(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
}

// Evenly interleaved selection of n_pick out of count items.
bool picked(uint64_t i, uint64_t n_pick, uint64_t count) {
  return (i + 1) * n_pick / count > i * n_pick / count;
}

}  // namespace

seqio::ReferenceGenome gen_reference(uint64_t len, uint64_t seed) {
  if (len == 0) throw std::invalid_argument("reference length must be positive");
  Rng rng(seed);
  seqio::ReferenceGenome ref;
  ref.name = "synthref_s" + std::to_string(seed) + "_l" + std::to_string(len) + " " +
             kGeneratorVersion;
  ref.seq.reserve_bases(len);
  for (uint64_t i = 0; i < len; i++) ref.seq.push_code(rng.base());
  return ref;
}

seqio::ReadSet gen_reads(const seqio::ReferenceGenome& ref, uint32_t read_len,
                         uint64_t count, double exact_fraction, double subst_rate,
                         uint64_t seed) {
  if (read_len == 0 || read_len > ref.len())
    throw std::invalid_argument("read_len must be in [1, reference length]");
  check_rate(exact_fraction, "exact_fraction");
  check_rate(subst_rate, "subst_rate");

  Rng rng(seed);
  seqio::ReadSet rs;
  rs.reads.reserve(count);
  uint64_t n_exact = uint64_t(std::llround(exact_fraction * double(count)));
  uint64_t span = ref.len() - read_len + 1;

  for (uint64_t i = 0; i < count; i++) {
    uint64_t start = rng.below(span);
    seqio::Read r;
    r.id = i;
    r.name = "r" + std::to_string(i) + " " + kGeneratorVersion;
    r.seq = ref.seq.subseq(start, read_len);
    if (count > 0 && !picked(i, n_exact, count)) {
      // mutated read: per-base substitutions, at least one forced
      std::string bases = r.seq.to_string();
      bool mutated = false;
      for (auto& c : bases) {
        if (rng.unit() < subst_rate) {
          uint8_t old = uint8_t(seqio::base_code(c));
          c = seqio::base_char(uint8_t((old + 1 + rng.below(3)) & 3));
          mutated = true;
        }
      }
      if (!mutated) {
        uint64_t pos = rng.below(read_len);
        uint8_t old = uint8_t(seqio::base_code(bases[pos]));
        bases[pos] = seqio::base_char(uint8_t((old + 1 + rng.below(3)) & 3));
      }
      r.seq = seqio::PackedSeq::from_string(bases);
    }
    rs.reads.push_back(std::move(r));
  }
  return rs;
}

seqio::ReadSet gen_longreads(const seqio::ReferenceGenome& ref, uint64_t mean_len,
                             uint64_t count, double align_fraction, double error_rate,
                             uint64_t seed, double indel_fraction) {
  if (mean_len < 2) throw std::invalid_argument("mean_len must be >= 2");
  check_rate(align_fraction, "align_fraction");
  check_rate(error_rate, "error_rate");
  check_rate(indel_fraction, "indel_fraction");

  Rng rng(seed);
  seqio::ReadSet rs;
  rs.reads.reserve(count);
  uint64_t n_align = uint64_t(std::llround(align_fraction * double(count)));

  for (uint64_t i = 0; i < count; i++) {
    uint64_t len = mean_len / 2 + rng.below(mean_len + 1);
    seqio::Read r;
    r.id = i;
    r.name = "lr" + std::to_string(i) + " " + kGeneratorVersion;
    if (count > 0 && picked(i, n_align, count)) {
      len = std::min<uint64_t>(len, ref.len());
      uint64_t start = rng.below(ref.len() - len + 1);
      r.seq.reserve_bases(len + 16);
      for (uint64_t p = 0; p < len; p++) {
        uint8_t code = ref.seq.code_at(start + p);
        if (rng.unit() < error_rate) {
          if (rng.unit() < indel_fraction) {
            if (rng.unit() < 0.5) continue;            // deletion
            r.seq.push_code(rng.base());               // insertion
            r.seq.push_code(code);
          } else {
            r.seq.push_code(uint8_t((code + 1 + rng.below(3)) & 3));
          }
        } else {
          r.seq.push_code(code);
        }
      }
      if (r.seq.empty()) r.seq.push_code(rng.base());
    } else {
      r.seq.reserve_bases(len);
      for (uint64_t p = 0; p < len; p++) r.seq.push_code(rng.base());
    }
    rs.reads.push_back(std::move(r));
  }
  return rs;
}

const std::vector<WorkloadPreset>& workload_presets() {
  static const std::vector<WorkloadPreset> presets = {
      {"human-short-80", 0.80},   // short reads, exactly-matching fraction
      {"table1-seqerr-1", 0.474}, // long reads, sequencing-error use case
      {"table1-seqerr-2", 0.693},
      {"table1-rapid-1", 0.600},  // rapidly evolving samples
      {"table1-rapid-2", 0.231},
      {"table1-noref-1", 0.0035}, // no known reference
      {"table1-noref-2", 0.370},
      {"table1-contam", 0.010},   // human-contamination screen
  };
  return presets;
}

double preset_align_fraction(const std::string& name) {
  for (const auto& p : workload_presets())
    if (p.name == name) return p.align_fraction;
  throw std::invalid_argument("unknown workload preset: " + name);
}

}  // namespace genstore::synth
