#include "genstore/nmfilter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace genstore::nmfilter {

namespace {

std::vector<uint8_t> read_valid_starts(const seqio::Read& read, uint32_t k) {
  std::vector<uint64_t> amb(read.ambiguous.begin(), read.ambiguous.end());
  return seqio::valid_kmer_starts(read.len(), k, amb, {});
}

}  // namespace

std::vector<MinimizerHit> minimizers(const seqio::Read& read, uint32_t k, uint32_t w) {
  std::vector<MinimizerHit> out;
  if (read.len() < k) return out;
  auto valid = read_valid_starts(read, k);
  auto code_at = [&](uint64_t i) { return read.seq.code_at(i); };
  scan_minimizers(read.len(), k, w, valid, code_at,
                  [&](const MinimizerHit& h) { out.push_back(h); });
  if (!out.empty()) return out;

  // No full window fits: fall back to the single smallest-hash k-mer.
  MinimizerHit best;
  bool found = false;
  scan_minimizers(read.len(), k, 1, valid, code_at, [&](const MinimizerHit& h) {
    if (!found || h.hash < best.hash) {
      best = h;
      found = true;
    }
  });
  if (found) out.push_back(best);
  return out;
}

std::vector<Seed> seed_find(const seqio::Read& read, const index::KmerIndex& idx,
                            const NmParams& params) {
  params.validate();
  std::vector<Seed> seeds;
  auto mins = minimizers(read, params.k, params.w);
  for (const MinimizerHit& m : mins) {
    if (seeds.size() >= params.N) break;  // cap reached: stop touching the index
    for (uint64_t loc : idx.lookup(m.hash)) {
      seeds.push_back(Seed{loc, m.end_pos, params.k});
      if (seeds.size() >= params.N) break;
    }
  }
  return seeds;
}

GateAction seed_count_gate(uint64_t seed_count, const NmParams& params) {
  if (seed_count < params.M) return GateAction::FilterLowSeeds;
  if (seed_count >= params.N) return GateAction::ForwardManySeeds;
  return GateAction::Chain;
}

void sort_seeds(std::vector<Seed>& seeds) {
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
}

namespace {

void check_sorted(std::span<const Seed> seeds) {
  for (size_t i = 1; i < seeds.size(); i++) {
    bool ok = seeds[i - 1].x < seeds[i].x ||
              (seeds[i - 1].x == seeds[i].x && seeds[i - 1].y <= seeds[i].y);
    if (!ok)
      throw std::invalid_argument("seeds unsorted at index " + std::to_string(i));
  }
}

// Windowed chaining DP, parameterized over the gap-cost function. Returns
// the best f(i); f(i) never drops below w_i.
template <typename GapCost>
int32_t chain_dp(std::span<const Seed> seeds, const NmParams& params, GapCost gap_cost,
                 ChainState* state) {
  check_sorted(seeds);
  if (state) {
    state->f.assign(seeds.size(), 0);
    state->pred.assign(seeds.size(), -1);
  }
  if (seeds.empty()) return 0;

  std::vector<int64_t> f(seeds.size());
  int64_t best = 0;
  for (size_t i = 0; i < seeds.size(); i++) {
    int64_t fi = seeds[i].w;
    int32_t pred = -1;
    size_t j0 = seeds.size() > 0 && i > params.h ? i - params.h : 0;
    for (size_t j = j0; j < i; j++) {
      int64_t dx = int64_t(seeds[i].x) - int64_t(seeds[j].x);
      int64_t dy = int64_t(seeds[i].y) - int64_t(seeds[j].y);
      if (dx <= 0 || dy <= 0) continue;  // chain break
      int64_t gap = dy - dx;
      uint64_t l = uint64_t(gap < 0 ? -gap : gap);
      if (l > params.max_gap) continue;
      int64_t alpha = std::min<int64_t>(std::min(dx, dy), seeds[i].w);
      int64_t beta = l == 0 ? 0 : gap_cost(l);
      int64_t cand = f[j] + alpha - beta;
      if (cand > fi) {
        fi = cand;
        pred = int32_t(j);
      }
    }
    f[i] = fi;
    best = std::max(best, fi);
    if (state) {
      state->f[i] = int32_t(fi);
      state->pred[i] = pred;
    }
  }
  return int32_t(best);
}

}  // namespace

int32_t chain_score_exact(std::span<const Seed> seeds, const NmParams& params,
                          ChainState* state) {
  double coeff = 0.01 * params.k;
  return chain_dp(
      seeds, params,
      [coeff](uint64_t l) {
        return int64_t(coeff * double(l) + 0.5 * std::log2(double(l)));
      },
      state);
}

int32_t chain_score_approx(std::span<const Seed> seeds, const NmParams& params,
                           ChainState* state) {
  // Largest power of two not above 0.01*k, as a right shift; under-estimating
  // the penalty over-estimates the score.
  double coeff = 0.01 * params.k;
  uint32_t shift = 0;
  while (std::ldexp(1.0, -int(shift)) > coeff) shift++;
  return chain_dp(
      seeds, params,
      [shift](uint64_t l) {
        int64_t linear = int64_t(l >> shift);
        int64_t log_half = (std::bit_width(l) - 1) >> 1;
        return linear + log_half;
      },
      state);
}

NmDecision nm_filter(const seqio::Read& read, const index::KmerIndex& idx,
                     const NmParams& params) {
  std::vector<Seed> seeds = seed_find(read, idx, params);
  NmDecision d;
  d.read_id = read.id;
  switch (seed_count_gate(seeds.size(), params)) {
    case GateAction::FilterLowSeeds:
      d.verdict = NmVerdict::FilterLowSeeds;
      d.best_score = -1;
      break;
    case GateAction::ForwardManySeeds:
      d.verdict = NmVerdict::ForwardManySeeds;
      d.best_score = -1;
      break;
    case GateAction::Chain: {
      sort_seeds(seeds);
      int32_t score = chain_score_approx(seeds, params);
      d.best_score = score;
      d.verdict = score >= params.min_chain_score ? NmVerdict::ForwardChained
                                                  : NmVerdict::FilterLowChain;
      break;
    }
  }
  return d;
}

std::vector<NmDecision> nm_filter_all(const seqio::ReadSet& reads,
                                      const index::KmerIndex& idx, const NmParams& params,
                                      unsigned threads) {
  params.validate();
  std::vector<NmDecision> out(reads.size());
  threads = std::max(1u, threads);
  if (threads == 1 || reads.size() < 2 * threads) {
    for (size_t i = 0; i < reads.size(); i++) out[i] = nm_filter(reads.reads[i], idx, params);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  size_t chunk = (reads.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; t++) {
    size_t lo = std::min(reads.size(), size_t(t) * chunk);
    size_t hi = std::min(reads.size(), lo + chunk);
    workers.emplace_back([&, lo, hi, t] {
      try {
        for (size_t i = lo; i < hi; i++) out[i] = nm_filter(reads.reads[i], idx, params);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace genstore::nmfilter
