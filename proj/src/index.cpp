#include "genstore/index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "genstore/minimizers.hpp"

namespace genstore::index {

namespace {

thread_local std::vector<uint8_t> g_fp_buf;

Fingerprint fingerprint_bytes(const std::vector<uint8_t>& packed, uint64_t len) {
  g_fp_buf.clear();
  g_fp_buf.insert(g_fp_buf.end(), packed.begin(), packed.end());
  for (int i = 0; i < 8; i++) g_fp_buf.push_back(uint8_t(len >> (8 * i)));
  return murmur3_x64_128(g_fp_buf.data(), g_fp_buf.size());
}

}  // namespace

Fingerprint fingerprint(const seqio::PackedSeq& s) {
  return fingerprint_bytes(s.bytes(), s.size());
}

Fingerprint fingerprint_canonical(const seqio::PackedSeq& s) {
  seqio::PackedSeq rc = seqio::revcomp(s);
  const seqio::PackedSeq& c = (rc < s) ? rc : s;
  return fingerprint_bytes(c.bytes(), c.size());
}

seqio::PackedSeq SRTable::read_seq(size_t i) const {
  seqio::PackedSeq out;
  out.reserve_bases(read_len);
  auto row = raw_of(i);
  for (uint32_t b = 0; b < read_len; b++)
    out.push_code(uint8_t((row[b >> 2] >> (6 - 2 * (b & 3))) & 3));
  return out;
}

SRTable build_srtable(std::span<const seqio::Read> reads, uint32_t read_len,
                      bool canonical) {
  if (read_len == 0) throw std::invalid_argument("read_len must be positive");
  SRTable t;
  t.read_len = read_len;
  t.canonical = canonical;
  t.entries.reserve(reads.size());

  for (const auto& r : reads) {
    if (r.len() != read_len)
      throw std::invalid_argument("read " + std::to_string(r.id) + ": length " +
                                  std::to_string(r.len()) + " != table read length " +
                                  std::to_string(read_len));
    if (r.has_ambiguous)
      throw std::invalid_argument("read " + std::to_string(r.id) +
                                  ": ambiguous reads must bypass the table");
    Fingerprint fp = canonical ? fingerprint_canonical(r.seq) : fingerprint(r.seq);
    t.entries.push_back(SrEntry{fp, r.id});
  }

  std::vector<uint32_t> order(t.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    const SrEntry& ea = t.entries[a];
    const SrEntry& eb = t.entries[b];
    if (ea.fp != eb.fp) return ea.fp < eb.fp;
    return ea.read_id < eb.read_id;
  });

  std::vector<SrEntry> sorted;
  sorted.reserve(t.entries.size());
  size_t stride = t.stride();
  t.raw.assign(t.entries.size() * stride, 0);
  for (size_t i = 0; i < order.size(); i++) {
    const seqio::Read& r = reads[order[i]];
    sorted.push_back(t.entries[order[i]]);
    const auto& bytes = r.seq.bytes();
    std::memcpy(t.raw.data() + i * stride, bytes.data(), bytes.size());
  }
  t.entries = std::move(sorted);
  return t;
}

SKIndex build_skindex(const seqio::ReferenceGenome& ref, uint32_t read_len,
                      bool canonical) {
  if (read_len == 0) throw std::invalid_argument("read_len must be positive");
  if (ref.len() < read_len)
    throw std::invalid_argument("reference length " + std::to_string(ref.len()) +
                                " < read length " + std::to_string(read_len));
  SKIndex x;
  x.read_len = read_len;
  x.canonical = canonical;

  auto valid = seqio::valid_kmer_starts(ref.len(), read_len, ref.ambiguous, ref.boundaries);
  std::vector<std::pair<Fingerprint, uint64_t>> items;
  for (uint64_t p = 0; p + read_len <= ref.len(); p++) {
    if (!valid[p]) continue;
    seqio::PackedSeq kmer = ref.seq.subseq(p, read_len);
    items.emplace_back(canonical ? fingerprint_canonical(kmer) : fingerprint(kmer), p);
  }
  std::sort(items.begin(), items.end());

  x.loc_offset.push_back(0);
  for (size_t i = 0; i < items.size();) {
    size_t j = i;
    x.fps.push_back(items[i].first);
    while (j < items.size() && items[j].first == items[i].first)
      x.locations.push_back(items[j++].second);
    x.loc_offset.push_back(x.locations.size());
    i = j;
  }
  return x;
}

double skindex_size_estimate_gb(double ref_len_bases, uint32_t read_len) {
  (void)read_len;  // entry payload is independent of k once k is read-sized
  constexpr double kNonNFraction = 0.95;
  constexpr double kDistinctYield = 0.55;
  constexpr double kEntryBytes = 20.0;  // 16-byte fingerprint + 4-byte location
  return ref_len_bases * kNonNFraction * kDistinctYield * kEntryBytes / 1e9;
}

KmerIndex KmerIndex::from_entries(
    const IndexParams& params,
    std::vector<std::pair<uint64_t, std::vector<uint64_t>>> sorted_entries) {
  KmerIndex ki;
  ki.params = params;
  ki.n_ = sorted_entries.size();
  size_t cap = std::bit_ceil(std::max<size_t>(16, 2 * ki.n_));
  ki.keys_.assign(cap, 0);
  ki.occupied_.assign(cap, 0);
  ki.pool_offset_.assign(cap, 0);
  ki.pool_count_.assign(cap, 0);
  ki.mask_ = cap - 1;
  for (auto& [key, locs] : sorted_entries) {
    size_t slot = key & ki.mask_;
    while (ki.occupied_[slot]) slot = (slot + 1) & ki.mask_;
    ki.occupied_[slot] = 1;
    ki.keys_[slot] = key;
    ki.pool_offset_[slot] = ki.pool_.size();
    ki.pool_count_[slot] = uint32_t(locs.size());
    ki.pool_.insert(ki.pool_.end(), locs.begin(), locs.end());
  }
  return ki;
}

std::span<const uint64_t> KmerIndex::lookup(uint64_t minimizer_hash) const {
  if (keys_.empty()) return {};
  size_t slot = minimizer_hash & mask_;
  while (occupied_[slot]) {
    if (keys_[slot] == minimizer_hash)
      return {pool_.data() + pool_offset_[slot], pool_count_[slot]};
    slot = (slot + 1) & mask_;
  }
  return {};
}

uint64_t KmerIndex::resident_bytes() const {
  // bucket array (8-byte key + 8-byte bucket header) + location pool
  return uint64_t(keys_.size()) * 16 + uint64_t(pool_.size()) * 8;
}

std::vector<std::pair<uint64_t, std::span<const uint64_t>>> KmerIndex::sorted_entries() const {
  std::vector<std::pair<uint64_t, std::span<const uint64_t>>> out;
  out.reserve(n_);
  for (size_t slot = 0; slot < keys_.size(); slot++) {
    if (!occupied_[slot]) continue;
    out.emplace_back(keys_[slot],
                     std::span<const uint64_t>{pool_.data() + pool_offset_[slot],
                                               pool_count_[slot]});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

KmerIndex build_kmer_index(const seqio::ReferenceGenome& ref, const IndexParams& params) {
  params.validate_nm();
  std::vector<std::pair<uint64_t, uint64_t>> hits;  // (hash, end position)
  if (ref.len() >= params.k) {
    auto valid =
        seqio::valid_kmer_starts(ref.len(), params.k, ref.ambiguous, ref.boundaries);
    scan_minimizers(ref.len(), params.k, params.w, valid,
                    [&](uint64_t i) { return ref.seq.code_at(i); },
                    [&](const MinimizerHit& h) { hits.emplace_back(h.hash, h.end_pos); });
  }
  std::sort(hits.begin(), hits.end());

  std::vector<std::pair<uint64_t, std::vector<uint64_t>>> entries;
  for (size_t i = 0; i < hits.size();) {
    size_t j = i;
    while (j < hits.size() && hits[j].first == hits[i].first) j++;
    if (j - i <= params.max_locations && params.max_locations > 0) {
      std::vector<uint64_t> locs;
      locs.reserve(j - i);
      for (size_t t = i; t < j; t++) locs.push_back(hits[t].second);
      entries.emplace_back(hits[i].first, std::move(locs));
    }
    i = j;
  }
  return KmerIndex::from_entries(params, std::move(entries));
}

// ---- serialization --------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'G', 'S', 'I', 'D', 'X', '\0'};
constexpr uint16_t kVersion = 1;
constexpr uint32_t kFlagCanonical = 1u;

struct Writer {
  std::vector<uint8_t> buf;

  void u8(uint8_t v) { buf.push_back(v); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; i++) buf.push_back(uint8_t(v >> (8 * i)));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; i++) buf.push_back(uint8_t(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; i++) buf.push_back(uint8_t(v >> (8 * i)));
  }
  void fp(const Fingerprint& f) {
    u64(f.hi);
    u64(f.lo);
  }
  void bytes(std::span<const uint8_t> b) { buf.insert(buf.end(), b.begin(), b.end()); }

  void header(uint8_t kind, uint32_t k, uint32_t w, uint32_t max_locations,
              uint32_t read_len, uint64_t count) {
    bytes({reinterpret_cast<const uint8_t*>(kMagic), 6});
    u16(kVersion);
    u8(kind);
    for (int i = 0; i < 7; i++) u8(0);
    u32(k);
    u32(w);
    u32(max_locations);
    u32(read_len);
    u64(count);
  }

  std::vector<uint8_t> finish() {
    uint64_t sum = fnv1a64(buf.data(), buf.size());
    u64(sum);
    return std::move(buf);
  }
};

struct Reader {
  std::span<const uint8_t> data;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > data.size()) throw IndexIoError(IoCode::truncated, "index file truncated");
  }
  uint8_t u8() {
    need(1);
    return data[pos++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = uint16_t(data[pos]) | uint16_t(data[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; i++) v |= uint32_t(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v |= uint64_t(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  Fingerprint fp() {
    Fingerprint f;
    f.hi = u64();
    f.lo = u64();
    return f;
  }
  std::span<const uint8_t> bytes(size_t n) {
    need(n);
    auto s = data.subspan(pos, n);
    pos += n;
    return s;
  }
};

struct Header {
  uint8_t kind;
  uint32_t k, w, max_locations, read_len;
  uint64_t count;
};

Header check_header(Reader& r, uint8_t expected_kind) {
  if (r.data.size() < 8) throw IndexIoError(IoCode::truncated, "index file truncated");
  if (std::memcmp(r.data.data(), kMagic, 6) != 0)
    throw IndexIoError(IoCode::bad_magic, "not a GSIDX index file");
  r.pos = 6;
  uint16_t version = r.u16();
  if (version != kVersion)
    throw IndexIoError(IoCode::bad_version,
                       "unsupported index version " + std::to_string(version));
  Header h{};
  h.kind = r.u8();
  r.bytes(7);
  if (h.kind != expected_kind)
    throw IndexIoError(IoCode::bad_kind, "index kind " + std::to_string(h.kind) +
                                             ", expected " + std::to_string(expected_kind));
  h.k = r.u32();
  h.w = r.u32();
  h.max_locations = r.u32();
  h.read_len = r.u32();
  h.count = r.u64();
  return h;
}

void check_trailer(const Reader& r) {
  // exactly one u64 checksum must remain
  if (r.data.size() < r.pos + 8 || r.data.size() > r.pos + 8)
    throw IndexIoError(IoCode::truncated, "index file size mismatch");
  uint64_t stored = 0;
  for (int i = 0; i < 8; i++) stored |= uint64_t(r.data[r.pos + i]) << (8 * i);
  uint64_t computed = fnv1a64(r.data.data(), r.pos);
  if (stored != computed)
    throw IndexIoError(IoCode::bad_checksum, "index checksum mismatch");
}

}  // namespace

std::vector<uint8_t> serialize(const SRTable& t) {
  Writer w;
  uint32_t flags = t.canonical ? kFlagCanonical : 0;
  w.header(kKindSrTable, t.read_len, flags, 0, t.read_len, t.entries.size());
  for (size_t i = 0; i < t.entries.size(); i++) {
    w.fp(t.entries[i].fp);
    w.u64(t.entries[i].read_id);
    w.bytes(t.raw_of(i));
  }
  return w.finish();
}

std::vector<uint8_t> serialize(const SKIndex& x) {
  Writer w;
  uint32_t flags = x.canonical ? kFlagCanonical : 0;
  w.header(kKindSkIndex, x.read_len, flags, 0, x.read_len, x.fps.size());
  for (size_t i = 0; i < x.fps.size(); i++) {
    w.fp(x.fps[i]);
    auto locs = x.locations_of(i);
    w.u32(uint32_t(locs.size()));
    w.u32(0);
    for (uint64_t loc : locs) w.u64(loc);
  }
  return w.finish();
}

std::vector<uint8_t> serialize(const KmerIndex& x) {
  Writer w;
  auto entries = x.sorted_entries();
  w.header(kKindKmerIndex, x.params.k, x.params.w, x.params.max_locations, 0,
           entries.size());
  for (auto& [key, locs] : entries) {
    w.u64(key);
    w.u32(uint32_t(locs.size()));
    w.u32(0);
    for (uint64_t loc : locs) w.u64(loc);
  }
  return w.finish();
}

namespace {
constexpr uint64_t kHeaderBytes = 40;
constexpr uint64_t kTrailerBytes = 8;
}  // namespace

uint64_t serialized_size(const SRTable& t) {
  return kHeaderBytes + uint64_t(t.size()) * (24 + t.stride()) + kTrailerBytes;
}

uint64_t serialized_size(const SKIndex& x) {
  return kHeaderBytes + uint64_t(x.size()) * 24 + uint64_t(x.locations.size()) * 8 +
         kTrailerBytes;
}

uint64_t serialized_size(const KmerIndex& x) {
  uint64_t locs = 0;
  for (const auto& [key, span] : x.sorted_entries()) locs += span.size();
  return kHeaderBytes + uint64_t(x.distinct_minimizers()) * 16 + locs * 8 + kTrailerBytes;
}

SRTable deserialize_srtable(std::span<const uint8_t> bytes) {
  Reader r{bytes};
  Header h = check_header(r, kKindSrTable);
  if (h.read_len == 0 || h.read_len != h.k)
    throw IndexIoError(IoCode::bad_params, "bad SRTable parameter block");
  SRTable t;
  t.read_len = h.read_len;
  t.canonical = (h.w & kFlagCanonical) != 0;
  size_t stride = t.stride();
  t.entries.reserve(h.count);
  t.raw.reserve(h.count * stride);
  for (uint64_t i = 0; i < h.count; i++) {
    SrEntry e;
    e.fp = r.fp();
    e.read_id = r.u64();
    auto row = r.bytes(stride);
    t.entries.push_back(e);
    t.raw.insert(t.raw.end(), row.begin(), row.end());
  }
  check_trailer(r);
  return t;
}

SKIndex deserialize_skindex(std::span<const uint8_t> bytes) {
  Reader r{bytes};
  Header h = check_header(r, kKindSkIndex);
  if (h.read_len == 0 || h.read_len != h.k)
    throw IndexIoError(IoCode::bad_params, "bad SKIndex parameter block");
  SKIndex x;
  x.read_len = h.read_len;
  x.canonical = (h.w & kFlagCanonical) != 0;
  x.loc_offset.push_back(0);
  for (uint64_t i = 0; i < h.count; i++) {
    x.fps.push_back(r.fp());
    uint32_t n = r.u32();
    r.u32();
    for (uint32_t j = 0; j < n; j++) x.locations.push_back(r.u64());
    x.loc_offset.push_back(x.locations.size());
  }
  check_trailer(r);
  return x;
}

KmerIndex deserialize_kmer_index(std::span<const uint8_t> bytes) {
  Reader r{bytes};
  Header h = check_header(r, kKindKmerIndex);
  IndexParams p{h.k, h.w, h.max_locations};
  try {
    p.validate_nm();
  } catch (const std::invalid_argument& e) {
    throw IndexIoError(IoCode::bad_params, e.what());
  }
  std::vector<std::pair<uint64_t, std::vector<uint64_t>>> entries;
  entries.reserve(h.count);
  for (uint64_t i = 0; i < h.count; i++) {
    uint64_t key = r.u64();
    uint32_t n = r.u32();
    r.u32();
    std::vector<uint64_t> locs;
    locs.reserve(n);
    for (uint32_t j = 0; j < n; j++) locs.push_back(r.u64());
    entries.emplace_back(key, std::move(locs));
  }
  check_trailer(r);
  return KmerIndex::from_entries(p, std::move(entries));
}

void save_file(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::streamsize size = f.tellg();
  f.seekg(0);
  std::vector<uint8_t> buf(static_cast<size_t>(size));
  f.read(reinterpret_cast<char*>(buf.data()), size);
  if (!f) throw std::runtime_error("read failed: " + path);
  return buf;
}

uint8_t peek_kind(std::span<const uint8_t> bytes) {
  if (bytes.size() < 9) throw IndexIoError(IoCode::truncated, "index file truncated");
  if (std::memcmp(bytes.data(), kMagic, 6) != 0)
    throw IndexIoError(IoCode::bad_magic, "not a GSIDX index file");
  return bytes[8];
}

}  // namespace genstore::index
