#ifndef GENSTORE_MINIMIZERS_HPP
#define GENSTORE_MINIMIZERS_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "genstore/hashes.hpp"

// Rolling canonical-minimizer scan shared by the reference index builder and
// the per-read seeding stage.

namespace genstore {

struct MinimizerHit {
  uint64_t hash = 0;      // hash64 of the canonical packed k-mer
  uint64_t end_pos = 0;   // 0-based position of the k-mer's last base
  bool rc = false;        // canonical form was the reverse complement
};

// Emits the windowed minima of canonical k-mer hashes over each maximal run
// of valid k-mer starts. Only complete windows of w k-mers emit; ties are
// broken toward the smallest hash, then the smallest position, and a
// minimizer selected by several overlapping windows is emitted once.
//
// code_at(i) must return the 2-bit code of base i; valid is the bitmap from
// seqio::valid_kmer_starts (empty means every start is valid).
template <typename CodeAt, typename Emit>
void scan_minimizers(uint64_t len, uint32_t k, uint32_t w,
                     const std::vector<uint8_t>& valid, CodeAt code_at, Emit emit) {
  if (k == 0 || k > 31 || len < k) return;
  const uint64_t n_starts = len - k + 1;
  const uint64_t mask = (k == 32) ? ~0ULL : ((1ULL << (2 * k)) - 1);

  struct Cand {
    uint64_t hash;
    uint64_t start;
    bool rc;
  };
  std::deque<Cand> window;
  uint64_t run_len = 0;  // k-mers accumulated in the current run
  uint64_t kf = 0, kr = 0;
  int64_t last_emitted = -1;

  auto emit_cand = [&](const Cand& c) {
    if (int64_t(c.start) == last_emitted) return;
    last_emitted = int64_t(c.start);
    emit(MinimizerHit{c.hash, c.start + k - 1, c.rc});
  };

  for (uint64_t s = 0; s < n_starts; s++) {
    if (!valid.empty() && !valid[s]) {
      window.clear();
      run_len = 0;
      continue;
    }
    if (run_len == 0) {
      kf = 0;
      kr = 0;
      for (uint64_t i = 0; i < k; i++) {
        uint64_t c = code_at(s + i);
        kf = ((kf << 2) | c) & mask;
        kr = (kr >> 2) | ((3 - c) << (2 * (k - 1)));
      }
    } else {
      uint64_t c = code_at(s + k - 1);
      kf = ((kf << 2) | c) & mask;
      kr = (kr >> 2) | ((3 - c) << (2 * (k - 1)));
    }
    run_len++;

    bool rc = kr < kf;
    Cand cand{hash64(rc ? kr : kf), s, rc};
    while (!window.empty() && window.back().hash > cand.hash) window.pop_back();
    window.push_back(cand);
    if (run_len >= w) {
      while (window.front().start + w <= s) window.pop_front();
      emit_cand(window.front());
    }
  }
}

// Convenience: all hits of a sequence collected into a vector.
template <typename CodeAt>
std::vector<MinimizerHit> collect_minimizers(uint64_t len, uint32_t k, uint32_t w,
                                             const std::vector<uint8_t>& valid,
                                             CodeAt code_at) {
  std::vector<MinimizerHit> out;
  scan_minimizers(len, k, w, valid, code_at,
                  [&](const MinimizerHit& h) { out.push_back(h); });
  return out;
}

}  // namespace genstore

#endif
