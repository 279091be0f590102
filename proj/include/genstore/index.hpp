#ifndef GENSTORE_INDEX_HPP
#define GENSTORE_INDEX_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genstore/hashes.hpp"
#include "genstore/seqio.hpp"

namespace genstore::index {

// 128-bit strong hash of a packed sequence; the sort key of SRTable/SKIndex.
using Fingerprint = Hash128;

// Fingerprint of the packed 2-bit representation (with the base count mixed
// in, so sequences of different lengths cannot alias byte-wise).
Fingerprint fingerprint(const seqio::PackedSeq& s);

// Fingerprint of the lexicographically smaller of s and revcomp(s).
Fingerprint fingerprint_canonical(const seqio::PackedSeq& s);

struct IndexParams {
  uint32_t k = 15;
  uint32_t w = 10;
  uint32_t max_locations = 495;

  // NM constraint: the packed k-mer must fit one 64-bit word for hash64.
  void validate_nm() const {
    if (k < 1 || k > 31) throw std::invalid_argument("k must be in [1, 31]");
    if (w < 1) throw std::invalid_argument("w must be >= 1");
  }
};

struct SrEntry {
  Fingerprint fp;
  uint64_t read_id = 0;
};

// Sorted read table: one entry per ambiguity-free read, ascending by
// (fingerprint, read_id), raw packed reads kept alongside for forwarding.
class SRTable {
 public:
  uint32_t read_len = 0;
  bool canonical = false;
  std::vector<SrEntry> entries;
  std::vector<uint8_t> raw;  // entries.size() x stride() bytes

  size_t size() const { return entries.size(); }
  size_t stride() const { return row_stride(read_len); }
  std::span<const uint8_t> raw_of(size_t i) const {
    return {raw.data() + i * stride(), stride()};
  }
  seqio::PackedSeq read_seq(size_t i) const;

  static size_t row_stride(uint32_t read_len) {
    size_t packed = (size_t(read_len) + 3) / 4;
    return (packed + 7) & ~size_t(7);
  }
};

// Sorted k-mer index: one entry per distinct read-sized reference k-mer
// fingerprint, strictly ascending, with every occurrence's start position.
// The raw k-mers themselves are not stored.
class SKIndex {
 public:
  uint32_t read_len = 0;
  bool canonical = false;
  std::vector<Fingerprint> fps;
  std::vector<uint64_t> loc_offset;  // fps.size() + 1 prefix offsets
  std::vector<uint64_t> locations;   // 0-based start positions

  size_t size() const { return fps.size(); }
  std::span<const uint64_t> locations_of(size_t i) const {
    return {locations.data() + loc_offset[i], loc_offset[i + 1] - loc_offset[i]};
  }
};

// Minimizer hash -> reference end positions, open addressing with linear
// probing and one minimizer per bucket. Lists longer than max_locations are
// dropped entirely at build time.
class KmerIndex {
 public:
  IndexParams params;

  static KmerIndex from_entries(const IndexParams& params,
                                std::vector<std::pair<uint64_t, std::vector<uint64_t>>> sorted_entries);

  std::span<const uint64_t> lookup(uint64_t minimizer_hash) const;
  size_t distinct_minimizers() const { return n_; }
  size_t bucket_count() const { return keys_.size(); }
  // Footprint used for the modeled in-SSD DRAM residency check.
  uint64_t resident_bytes() const;

  // Entries in ascending key order (serialization and test introspection).
  std::vector<std::pair<uint64_t, std::span<const uint64_t>>> sorted_entries() const;

 private:
  std::vector<uint64_t> keys_;
  std::vector<uint8_t> occupied_;
  std::vector<uint64_t> pool_offset_;  // per bucket: begin offset into pool_
  std::vector<uint32_t> pool_count_;
  std::vector<uint64_t> pool_;
  uint64_t mask_ = 0;
  size_t n_ = 0;
};

// Builders. EM structures operate on fixed-length short reads; reads with
// ambiguous bases must be excluded by the caller (they bypass the filter).
SRTable build_srtable(std::span<const seqio::Read> reads, uint32_t read_len,
                      bool canonical = false);
SKIndex build_skindex(const seqio::ReferenceGenome& ref, uint32_t read_len,
                      bool canonical = false);
KmerIndex build_kmer_index(const seqio::ReferenceGenome& ref, const IndexParams& params);

// Documented projection of the in-SSD SKIndex footprint: assumes 0.95 non-N
// coverage, 0.55 distinct-entry yield per base, and a 20-byte entry payload
// (16-byte fingerprint + 4-byte location). Reproduces the ~32 GB figure for
// a human-scale reference at read length 150.
double skindex_size_estimate_gb(double ref_len_bases, uint32_t read_len);

// ---- binary index files -------------------------------------------------
//
// Layout (little-endian, 8-byte aligned sections):
//   [0)  magic "GSIDX\0", u16 version
//   [8)  u8 kind (1=SRTable, 2=SKIndex, 3=KmerIndex), 7 reserved bytes
//   [16) u32 k, u32 w, u32 max_locations, u32 read_len
//   [32) u64 entry count
//   [40) packed entries
//   then u64 FNV-1a checksum over everything before it.
// For kinds 1-2 the w field carries flags (bit 0: canonical fingerprints).

enum class IoCode {
  bad_magic,
  bad_version,
  bad_kind,
  truncated,
  bad_checksum,
  bad_params,
};

class IndexIoError : public std::runtime_error {
 public:
  IndexIoError(IoCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  IoCode code() const { return code_; }

 private:
  IoCode code_;
};

inline constexpr uint8_t kKindSrTable = 1;
inline constexpr uint8_t kKindSkIndex = 2;
inline constexpr uint8_t kKindKmerIndex = 3;

std::vector<uint8_t> serialize(const SRTable& t);
std::vector<uint8_t> serialize(const SKIndex& x);
std::vector<uint8_t> serialize(const KmerIndex& x);

// On-disk size without materializing the buffer (used by the SSD model).
uint64_t serialized_size(const SRTable& t);
uint64_t serialized_size(const SKIndex& x);
uint64_t serialized_size(const KmerIndex& x);

SRTable deserialize_srtable(std::span<const uint8_t> bytes);
SKIndex deserialize_skindex(std::span<const uint8_t> bytes);
KmerIndex deserialize_kmer_index(std::span<const uint8_t> bytes);

void save_file(const std::string& path, std::span<const uint8_t> bytes);
std::vector<uint8_t> read_file(const std::string& path);
uint8_t peek_kind(std::span<const uint8_t> bytes);

}  // namespace genstore::index

#endif
