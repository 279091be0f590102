#ifndef GENSTORE_SYNTH_HPP
#define GENSTORE_SYNTH_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "genstore/seqio.hpp"

namespace genstore::synth {

// Stamped into generated record headers.
inline constexpr const char* kGeneratorVersion = "gsynth:v1";

// Deterministic across platforms: mt19937_64 has a standard-fixed sequence
// and the derived draws below avoid std::uniform_* distributions (whose
// algorithms are implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  uint64_t below(uint64_t n) {  // [0, n)
    return uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double unit() {  // [0, 1)
    return double(next() >> 11) * 0x1.0p-53;
  }

  uint8_t base() { return uint8_t(below(4)); }

 private:
  std::mt19937_64 eng_;
};

seqio::ReferenceGenome gen_reference(uint64_t len, uint64_t seed);

// exact_fraction of the reads (rounded, spread evenly over the file) are
// verbatim substrings; the rest receive at least one substitution.
seqio::ReadSet gen_reads(const seqio::ReferenceGenome& ref, uint32_t read_len,
                         uint64_t count, double exact_fraction, double subst_rate,
                         uint64_t seed);

// Aligning reads are sampled from the reference with per-base errors
// (indel_fraction of errors are insertions/deletions); non-aligning reads
// are uniform random sequences. Lengths are uniform in [mean/2, 3*mean/2].
seqio::ReadSet gen_longreads(const seqio::ReferenceGenome& ref, uint64_t mean_len,
                             uint64_t count, double align_fraction, double error_rate,
                             uint64_t seed, double indel_fraction = 0.05);

// Alignment-rate presets mirroring published long/short read use cases.
struct WorkloadPreset {
  std::string name;
  double align_fraction;
};

const std::vector<WorkloadPreset>& workload_presets();
double preset_align_fraction(const std::string& name);  // throws on unknown

}  // namespace genstore::synth

#endif
