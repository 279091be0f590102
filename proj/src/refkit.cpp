#include "genstore/refkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "genstore/seqio.hpp"

namespace genstore::refkit {

std::vector<uint64_t> naive_exact_match(std::string_view read, std::string_view ref) {
  if (ref.size() > kMaxRefLen)
    throw std::invalid_argument("oracle reference cap exceeded (10 Mbp)");
  if (read.empty() || read.size() > ref.size()) return {};
  std::vector<uint64_t> hits;
  auto searcher = std::boyer_moore_horspool_searcher(read.begin(), read.end());
  auto it = ref.begin();
  for (;;) {
    auto found = std::search(it, ref.end(), searcher);
    if (found == ref.end()) break;
    hits.push_back(uint64_t(found - ref.begin()));
    it = found + 1;  // overlapping occurrences count
  }
  return hits;
}

std::vector<MinimizerHit> naive_minimizers(std::string_view seq, uint32_t k, uint32_t w) {
  if (k < 1 || k > 31 || w < 1) throw std::invalid_argument("bad k or w");
  if (seq.size() > kMaxRefLen) throw std::invalid_argument("oracle cap exceeded");
  if (seq.size() < k) return {};

  struct Entry {
    uint64_t hash;
    uint64_t start;
    bool rc;
  };
  uint64_t n_kmers = seq.size() - k + 1;
  std::vector<Entry> entries(n_kmers);
  for (uint64_t s = 0; s < n_kmers; s++) {
    uint64_t fwd = 0, rev = 0;
    for (uint32_t i = 0; i < k; i++) {
      int8_t code = seqio::base_code(seq[s + i]);
      if (code < 0) throw std::invalid_argument("oracle input must be ACGT only");
      fwd = (fwd << 2) | uint64_t(code);
    }
    for (uint32_t i = 0; i < k; i++) {
      int8_t code = seqio::base_code(seq[s + k - 1 - i]);
      rev = (rev << 2) | uint64_t(3 - code);
    }
    bool rc = rev < fwd;
    entries[s] = Entry{hash64(rc ? rev : fwd), s, rc};
  }

  std::vector<MinimizerHit> out;
  int64_t last = -1;
  auto emit_min = [&](uint64_t lo, uint64_t hi) {  // window [lo, hi)
    const Entry* best = &entries[lo];
    for (uint64_t i = lo + 1; i < hi; i++)
      if (entries[i].hash < best->hash) best = &entries[i];
    if (int64_t(best->start) != last) {
      last = int64_t(best->start);
      out.push_back(MinimizerHit{best->hash, best->start + k - 1, best->rc});
    }
  };

  if (n_kmers < w) {
    emit_min(0, n_kmers);
    return out;
  }
  for (uint64_t ws = 0; ws + w <= n_kmers; ws++) emit_min(ws, ws + w);
  return out;
}

int32_t naive_chain(std::span<const nmfilter::Seed> seeds, uint32_t k, uint32_t max_gap) {
  if (seeds.size() > kMaxSeeds) throw std::invalid_argument("oracle seed cap exceeded");
  for (size_t i = 1; i < seeds.size(); i++) {
    bool ok = seeds[i - 1].x < seeds[i].x ||
              (seeds[i - 1].x == seeds[i].x && seeds[i - 1].y <= seeds[i].y);
    if (!ok) throw std::invalid_argument("oracle seeds unsorted");
  }
  if (seeds.empty()) return 0;

  std::vector<int64_t> f(seeds.size());
  int64_t best = 0;
  for (size_t i = 0; i < seeds.size(); i++) {
    int64_t fi = seeds[i].w;
    for (size_t j = 0; j < i; j++) {
      int64_t dx = int64_t(seeds[i].x) - int64_t(seeds[j].x);
      int64_t dy = int64_t(seeds[i].y) - int64_t(seeds[j].y);
      if (dx <= 0 || dy <= 0) continue;
      int64_t gap = dy - dx;
      uint64_t l = uint64_t(gap < 0 ? -gap : gap);
      if (l > max_gap) continue;
      int64_t alpha = std::min<int64_t>(std::min(dx, dy), seeds[i].w);
      int64_t beta =
          l == 0 ? 0 : int64_t(0.01 * double(k) * double(l) + 0.5 * std::log2(double(l)));
      fi = std::max(fi, f[j] + alpha - beta);
    }
    f[i] = fi;
    best = std::max(best, fi);
  }
  return int32_t(best);
}

}  // namespace genstore::refkit
