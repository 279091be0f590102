#ifndef GENSTORE_REFKIT_HPP
#define GENSTORE_REFKIT_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "genstore/minimizers.hpp"
#include "genstore/nmfilter.hpp"

// Brute-force ground-truth oracles for the test suites. These share only the
// base encoding and the leaf hash functions with the main modules; every
// scan, lookup, and DP here is written independently of the filter code
// paths, and inputs are capped to keep test runtimes bounded.

namespace genstore::refkit {

inline constexpr uint64_t kMaxRefLen = 10'000'000;  // 10 Mbp
inline constexpr size_t kMaxSeeds = 4096;

// All start positions where `read` occurs verbatim in `ref` (text search,
// overlapping matches included).
std::vector<uint64_t> naive_exact_match(std::string_view read, std::string_view ref);

// Windowed-minimum rescan over per-k-mer canonical hashes; sequences shorter
// than k+w-1 yield their single smallest-hash k-mer. ACGT input only.
std::vector<MinimizerHit> naive_minimizers(std::string_view seq, uint32_t k, uint32_t w);

// Unwindowed O(N^2) chaining DP with exact gap costs.
int32_t naive_chain(std::span<const nmfilter::Seed> seeds, uint32_t k,
                    uint32_t max_gap = 5000);

}  // namespace genstore::refkit

#endif
