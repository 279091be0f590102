#include "genstore/emfilter.hpp"

#include <algorithm>
#include <thread>

namespace genstore::emfilter {

namespace {

using index::Fingerprint;
using index::SKIndex;
using index::SRTable;

// Merge one fingerprint range [r0,r1) x [k0,k1). Both cursors only see
// `batch` entries at a time, mirroring the batched fetch of the SSD model;
// the merge logic never depends on where a batch ends.
void merge_range(const SRTable& sr, const SKIndex& sk, uint64_t r0, uint64_t r1,
                 uint64_t k0, uint64_t k1, const EmOptions& opts, EmStats& stats,
                 std::vector<EmDecision>& out) {
  uint64_t r = r0;
  uint64_t k = k0;
  uint64_t r_batch_end = r0;
  uint64_t k_batch_end = k0;
  auto fetch_r = [&] {
    uint64_t b = opts.srtable_batch_entries;
    r_batch_end = b ? std::min(r1, r + b) : r1;
  };
  auto fetch_k = [&] {
    uint64_t b = opts.skindex_batch_entries;
    k_batch_end = b ? std::min(k1, k + b) : k1;
  };
  fetch_r();
  fetch_k();

  auto advance_r = [&] {
    r++;
    if (r < r1) {
      if (sr.entries[r].fp < sr.entries[r - 1].fp)
        throw UnsortedInputError("SRTable", r);
      if (r == r_batch_end) fetch_r();
    }
  };
  auto advance_k = [&] {
    k++;
    if (k < k1) {
      if (!(sk.fps[k - 1] < sk.fps[k])) throw UnsortedInputError("SKIndex", k);
      if (k == k_batch_end) fetch_k();
    }
  };

  while (r < r1) {
    if (k >= k1) {
      out.push_back(EmDecision{sr.entries[r].read_id, EmVerdict::Forward, {}});
      stats.reads_forwarded++;
      advance_r();
      continue;
    }
    stats.comparator_steps++;
    const Fingerprint& fr = sr.entries[r].fp;
    const Fingerprint& fk = sk.fps[k];
    if (fr == fk) {
      EmDecision d{sr.entries[r].read_id, EmVerdict::ExactMatch, {}};
      if (opts.emit_locations) {
        auto locs = sk.locations_of(k);
        d.locations.assign(locs.begin(), locs.end());
      }
      out.push_back(std::move(d));
      stats.reads_filtered++;
      advance_r();
    } else if (fr < fk) {
      out.push_back(EmDecision{sr.entries[r].read_id, EmVerdict::Forward, {}});
      stats.reads_forwarded++;
      advance_r();
    } else {
      advance_k();
    }
  }
}

void validate_sorted(const SRTable& sr, const SKIndex& sk) {
  for (size_t i = 1; i < sr.entries.size(); i++)
    if (sr.entries[i].fp < sr.entries[i - 1].fp) throw UnsortedInputError("SRTable", i);
  for (size_t i = 1; i < sk.fps.size(); i++)
    if (!(sk.fps[i - 1] < sk.fps[i])) throw UnsortedInputError("SKIndex", i);
}

}  // namespace

EmStats em_filter(const index::SRTable& srtable, const index::SKIndex& skindex,
                  const EmOptions& opts, const std::function<void(EmDecision&&)>& sink) {
  if (srtable.read_len != skindex.read_len)
    throw std::invalid_argument("SRTable read length " + std::to_string(srtable.read_len) +
                                " != SKIndex k " + std::to_string(skindex.read_len));
  if (srtable.canonical != skindex.canonical)
    throw std::invalid_argument("SRTable/SKIndex canonical fingerprint flags differ");

  EmStats stats;
  stats.reads_total = srtable.size();
  unsigned threads = std::max(1u, opts.threads);

  if (threads == 1 || srtable.size() < 2 * threads) {
    std::vector<EmDecision> out;
    merge_range(srtable, skindex, 0, srtable.size(), 0, skindex.size(), opts, stats, out);
    for (auto& d : out) sink(std::move(d));
    return stats;
  }

  // Fingerprint-range partitioning: both structures split at the same
  // boundary fingerprints, so every partition is a self-contained merge and
  // the concatenated output equals the sequential scan.
  validate_sorted(srtable, skindex);
  std::vector<Fingerprint> bounds;
  for (unsigned t = 1; t < threads; t++) {
    size_t i = size_t(double(srtable.size()) * t / threads);
    bounds.push_back(srtable.entries[i].fp);
  }
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  struct Part {
    uint64_t r0, r1, k0, k1;
    std::vector<EmDecision> out;
    EmStats stats;
    std::exception_ptr error;
  };
  std::vector<Part> parts(bounds.size() + 1);
  uint64_t r_prev = 0, k_prev = 0;
  for (size_t p = 0; p < parts.size(); p++) {
    uint64_t r_next = srtable.size();
    uint64_t k_next = skindex.size();
    if (p < bounds.size()) {
      const Fingerprint& b = bounds[p];
      r_next = uint64_t(std::lower_bound(srtable.entries.begin(), srtable.entries.end(), b,
                                         [](const index::SrEntry& e, const Fingerprint& f) {
                                           return e.fp < f;
                                         }) -
                        srtable.entries.begin());
      k_next = uint64_t(std::lower_bound(skindex.fps.begin(), skindex.fps.end(), b) -
                        skindex.fps.begin());
    }
    parts[p] = Part{r_prev, r_next, k_prev, k_next, {}, {}, nullptr};
    r_prev = r_next;
    k_prev = k_next;
  }

  std::vector<std::thread> workers;
  workers.reserve(parts.size());
  for (auto& part : parts) {
    workers.emplace_back([&part, &srtable, &skindex, &opts] {
      try {
        merge_range(srtable, skindex, part.r0, part.r1, part.k0, part.k1, opts,
                    part.stats, part.out);
      } catch (...) {
        part.error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();

  for (auto& part : parts) {
    if (part.error) std::rethrow_exception(part.error);
    stats.reads_filtered += part.stats.reads_filtered;
    stats.reads_forwarded += part.stats.reads_forwarded;
    stats.comparator_steps += part.stats.comparator_steps;
    for (auto& d : part.out) sink(std::move(d));
  }
  return stats;
}

EmResult em_filter(const index::SRTable& srtable, const index::SKIndex& skindex,
                   const EmOptions& opts) {
  EmResult res;
  res.stats = em_filter(srtable, skindex, opts,
                        [&](EmDecision&& d) { res.decisions.push_back(std::move(d)); });
  return res;
}

}  // namespace genstore::emfilter
