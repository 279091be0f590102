#ifndef GENSTORE_NMFILTER_HPP
#define GENSTORE_NMFILTER_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "genstore/index.hpp"
#include "genstore/minimizers.hpp"
#include "genstore/seqio.hpp"

namespace genstore::nmfilter {

// Anchor between read and reference: x/y are the 0-based ending positions of
// the match in the reference and the read, w is the seed length in bases.
struct Seed {
  uint64_t x = 0;
  uint64_t y = 0;
  uint32_t w = 0;
};

struct NmParams {
  uint32_t M = 3;                // minimum seed count; fewer filters the read
  uint32_t N = 64;               // seed cap; reaching it forwards the read
  uint32_t h = 50;               // DP lookback window
  uint32_t w = 10;               // minimizer window
  uint32_t k = 15;               // k-mer length
  int32_t min_chain_score = 40;  // forwarding threshold for chained reads
  uint32_t max_gap = 5000;       // gap beyond which a chain breaks

  void validate() const {
    if (M < 1 || M > N) throw std::invalid_argument("need 1 <= M <= N");
    if (h < 1) throw std::invalid_argument("h must be >= 1");
    if (k < 1 || k > 31) throw std::invalid_argument("k must be in [1, 31]");
    if (w < 1) throw std::invalid_argument("w must be >= 1");
  }
};

enum class NmVerdict : uint8_t {
  FilterLowSeeds = 0,
  FilterLowChain = 1,
  ForwardManySeeds = 2,
  ForwardChained = 3,
};

inline bool is_forward(NmVerdict v) {
  return v == NmVerdict::ForwardManySeeds || v == NmVerdict::ForwardChained;
}

enum class GateAction : uint8_t {
  FilterLowSeeds,
  Chain,
  ForwardManySeeds,
};

struct NmDecision {
  uint64_t read_id = 0;
  NmVerdict verdict = NmVerdict::FilterLowSeeds;
  int32_t best_score = -1;  // -1 when chaining was skipped
};

// Per-seed DP scores and predecessor indices (diagnostics).
struct ChainState {
  std::vector<int32_t> f;
  std::vector<int32_t> pred;
};

// Canonical minimizers of a read. K-mers overlapping ambiguous positions are
// skipped; a read shorter than k+w-1 (or one whose valid runs admit no full
// window) yields its single smallest-hash k-mer, or nothing if no k-mer fits.
std::vector<MinimizerHit> minimizers(const seqio::Read& read, uint32_t k, uint32_t w);

// Looks up each minimizer in read order, fanning out one seed per stored
// location, and stops as soon as N seeds have been read.
std::vector<Seed> seed_find(const seqio::Read& read, const index::KmerIndex& idx,
                            const NmParams& params);

GateAction seed_count_gate(uint64_t seed_count, const NmParams& params);

void sort_seeds(std::vector<Seed>& seeds);  // by x ascending, ties by y

// Chaining DP with lookback h; seeds must be sorted by (x, y) or an
// std::invalid_argument names the offending index. The exact variant uses
// the real gap cost, the approx variant a shift-based cost that never
// exceeds it, so the approx score never falls below the exact score.
int32_t chain_score_exact(std::span<const Seed> seeds, const NmParams& params,
                          ChainState* state = nullptr);
int32_t chain_score_approx(std::span<const Seed> seeds, const NmParams& params,
                           ChainState* state = nullptr);

NmDecision nm_filter(const seqio::Read& read, const index::KmerIndex& idx,
                     const NmParams& params);

// Per-read filtering over a whole set; results are in read order and
// independent of the thread count.
std::vector<NmDecision> nm_filter_all(const seqio::ReadSet& reads,
                                      const index::KmerIndex& idx, const NmParams& params,
                                      unsigned threads = 1);

}  // namespace genstore::nmfilter

#endif
