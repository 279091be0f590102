#ifndef GENSTORE_EMFILTER_HPP
#define GENSTORE_EMFILTER_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "genstore/index.hpp"

namespace genstore::emfilter {

enum class EmVerdict : uint8_t {
  Forward = 0,
  ExactMatch = 1,
};

struct EmDecision {
  uint64_t read_id = 0;
  EmVerdict verdict = EmVerdict::Forward;
  std::vector<uint64_t> locations;  // filled only when location emission is on
};

struct EmStats {
  uint64_t reads_total = 0;
  uint64_t reads_filtered = 0;
  uint64_t reads_forwarded = 0;
  uint64_t comparator_steps = 0;
};

struct EmOptions {
  bool emit_locations = false;
  // Entries visible to the comparator per fetched batch; 0 streams the whole
  // structure at once. Decisions are identical for any batch size.
  uint64_t srtable_batch_entries = 0;
  uint64_t skindex_batch_entries = 0;
  // Fingerprint-range partitioned scan; output is identical to threads = 1.
  unsigned threads = 1;
};

class UnsortedInputError : public std::runtime_error {
 public:
  UnsortedInputError(const std::string& which, uint64_t offending_index)
      : std::runtime_error(which + " unsorted at entry " + std::to_string(offending_index)),
        index_(offending_index) {}
  uint64_t offending_index() const { return index_; }

 private:
  uint64_t index_;
};

// Streaming merge-join of SRTable against SKIndex. Decisions come out in
// SRTable order; duplicate reads with equal fingerprints all match the same
// index entry. Requires srtable.read_len == skindex.read_len and matching
// canonical flags (throws std::invalid_argument otherwise).
EmStats em_filter(const index::SRTable& srtable, const index::SKIndex& skindex,
                  const EmOptions& opts, const std::function<void(EmDecision&&)>& sink);

struct EmResult {
  std::vector<EmDecision> decisions;
  EmStats stats;
};

EmResult em_filter(const index::SRTable& srtable, const index::SKIndex& skindex,
                   const EmOptions& opts = {});

}  // namespace genstore::emfilter

#endif
