#include "genstore/seqio.hpp"

#include <zlib.h>

#include <array>
#include <cstdio>
#include <cstring>

namespace genstore::seqio {

namespace {

constexpr int8_t kCodeTableInit = -1;

std::array<int8_t, 256> make_code_table() {
  std::array<int8_t, 256> t;
  t.fill(kCodeTableInit);
  t['A'] = t['a'] = kBaseA;
  t['C'] = t['c'] = kBaseC;
  t['G'] = t['g'] = kBaseG;
  t['T'] = t['t'] = kBaseT;
  return t;
}

const std::array<int8_t, 256> kCodeTable = make_code_table();
constexpr char kBaseChars[4] = {'A', 'C', 'G', 'T'};

}  // namespace

int8_t base_code(char c) { return kCodeTable[uint8_t(c)]; }
char base_char(uint8_t code) { return kBaseChars[code & 3]; }

PackedSeq PackedSeq::from_string(std::string_view s) {
  PackedSeq p;
  p.reserve_bases(s.size());
  for (char c : s) {
    int8_t code = base_code(c);
    if (code < 0)
      throw std::invalid_argument(std::string("non-ACGT symbol '") + c + "'");
    p.push_code(uint8_t(code));
  }
  return p;
}

void PackedSeq::push_code(uint8_t code) {
  if ((len_ & 3) == 0) bytes_.push_back(0);
  bytes_.back() |= uint8_t((code & 3) << (6 - 2 * (len_ & 3)));
  len_++;
}

std::string PackedSeq::to_string() const {
  std::string s;
  s.resize(len_);
  for (uint64_t i = 0; i < len_; i++) s[i] = base_char(code_at(i));
  return s;
}

PackedSeq PackedSeq::subseq(uint64_t pos, uint64_t count) const {
  PackedSeq out;
  out.reserve_bases(count);
  if ((pos & 3) == 0) {
    // byte-aligned fast path
    uint64_t full = count / 4;
    out.bytes_.assign(bytes_.begin() + pos / 4, bytes_.begin() + pos / 4 + full);
    out.len_ = full * 4;
    for (uint64_t i = full * 4; i < count; i++) out.push_code(code_at(pos + i));
  } else {
    for (uint64_t i = 0; i < count; i++) out.push_code(code_at(pos + i));
  }
  return out;
}

std::strong_ordering operator<=>(const PackedSeq& a, const PackedSeq& b) {
  int c = std::memcmp(a.bytes_.data(), b.bytes_.data(),
                      std::min(a.bytes_.size(), b.bytes_.size()));
  if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  return a.len_ <=> b.len_;
}

PackedSeq revcomp(const PackedSeq& s) {
  PackedSeq out;
  out.reserve_bases(s.size());
  for (uint64_t i = s.size(); i-- > 0;) out.push_code(complement_code(s.code_at(i)));
  return out;
}

std::vector<uint8_t> valid_kmer_starts(uint64_t len, uint32_t k,
                                       const std::vector<uint64_t>& ambiguous,
                                       const std::vector<uint64_t>& boundaries) {
  if (len < k) return {};
  uint64_t n = len - k + 1;
  std::vector<uint8_t> ok(n, 1);
  auto mark = [&](uint64_t lo, uint64_t hi) {  // half-open range of starts
    lo = std::min(lo, n);
    hi = std::min(hi, n);
    for (uint64_t i = lo; i < hi; i++) ok[i] = 0;
  };
  for (uint64_t a : ambiguous) {
    uint64_t lo = a + 1 >= k ? a + 1 - k : 0;
    mark(lo, a + 1);
  }
  for (uint64_t b : boundaries) {
    // a k-mer starting in [b-k+1, b-1] straddles the record break before b
    if (b == 0) continue;
    uint64_t lo = b + 1 >= k ? b + 1 - k : 0;
    mark(lo, b);
  }
  return ok;
}

FileSource::FileSource(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open file: " + path);
  file_ = f;
}

FileSource::~FileSource() {
  if (file_) std::fclose(static_cast<FILE*>(file_));
}

size_t FileSource::read(uint8_t* buf, size_t n) {
  return std::fread(buf, 1, n, static_cast<FILE*>(file_));
}

size_t MemorySource::read(uint8_t* buf, size_t n) {
  size_t avail = data_.size() - pos_;
  size_t take = std::min({n, avail, max_chunk_});
  std::memcpy(buf, data_.data() + pos_, take);
  pos_ += take;
  return take;
}

struct GzipSource::Impl {
  std::unique_ptr<ByteSource> inner;
  z_stream zs{};
  std::vector<uint8_t> inbuf;
  bool eof = false;

  explicit Impl(std::unique_ptr<ByteSource> src) : inner(std::move(src)), inbuf(1 << 16) {
    zs.zalloc = Z_NULL;
    zs.zfree = Z_NULL;
    zs.opaque = Z_NULL;
    if (inflateInit2(&zs, 15 + 32) != Z_OK)  // gzip or zlib framing
      throw std::runtime_error("inflateInit2 failed");
  }
  ~Impl() { inflateEnd(&zs); }
};

GzipSource::GzipSource(std::unique_ptr<ByteSource> inner)
    : impl_(std::make_unique<Impl>(std::move(inner))) {}

GzipSource::~GzipSource() = default;

size_t GzipSource::read(uint8_t* buf, size_t n) {
  if (impl_->eof || n == 0) return 0;
  z_stream& zs = impl_->zs;
  zs.next_out = buf;
  zs.avail_out = uInt(std::min<size_t>(n, UINT32_MAX));
  while (zs.avail_out > 0) {
    if (zs.avail_in == 0) {
      size_t got = impl_->inner->read(impl_->inbuf.data(), impl_->inbuf.size());
      if (got == 0) {
        if (zs.avail_out == n) throw std::runtime_error("truncated gzip stream");
        break;
      }
      zs.next_in = impl_->inbuf.data();
      zs.avail_in = uInt(got);
    }
    int rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_STREAM_END) {
      impl_->eof = true;
      break;
    }
    if (rc != Z_OK) throw std::runtime_error("corrupt gzip stream");
  }
  return n - zs.avail_out;
}

std::unique_ptr<ByteSource> open_source(const std::string& path) {
  auto file = std::make_unique<FileSource>(path);
  // peek the two magic bytes through a tiny prefix-replaying wrapper
  uint8_t magic[2];
  size_t got = 0;
  while (got < 2) {
    size_t r = file->read(magic + got, 2 - got);
    if (r == 0) break;
    got += r;
  }

  class PrefixSource : public ByteSource {
   public:
    PrefixSource(std::string prefix, std::unique_ptr<ByteSource> rest)
        : prefix_(std::move(prefix)), rest_(std::move(rest)) {}
    size_t read(uint8_t* buf, size_t n) override {
      if (pos_ < prefix_.size()) {
        size_t take = std::min(n, prefix_.size() - pos_);
        std::memcpy(buf, prefix_.data() + pos_, take);
        pos_ += take;
        return take;
      }
      return rest_->read(buf, n);
    }

   private:
    std::string prefix_;
    size_t pos_ = 0;
    std::unique_ptr<ByteSource> rest_;
  };

  auto replay = std::make_unique<PrefixSource>(
      std::string(reinterpret_cast<char*>(magic), got), std::move(file));
  if (got == 2 && magic[0] == 0x1F && magic[1] == 0x8B)
    return std::make_unique<GzipSource>(std::move(replay));
  return replay;
}

namespace {

// Incremental line reader over a ByteSource. Strips '\n' and a preceding
// '\r'; the final line may be unterminated.
class LineReader {
 public:
  explicit LineReader(ByteSource& src) : src_(src) {}

  bool next(std::string& line) {
    line.clear();
    for (;;) {
      if (pos_ == fill_) {
        fill_ = src_.read(buf_.data(), buf_.size());
        pos_ = 0;
        if (fill_ == 0) return !line.empty();
      }
      uint8_t* nl = static_cast<uint8_t*>(std::memchr(buf_.data() + pos_, '\n', fill_ - pos_));
      if (nl) {
        size_t end = size_t(nl - buf_.data());
        line.append(reinterpret_cast<char*>(buf_.data()) + pos_, end - pos_);
        pos_ = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      line.append(reinterpret_cast<char*>(buf_.data()) + pos_, fill_ - pos_);
      pos_ = fill_;
    }
  }

 private:
  ByteSource& src_;
  std::array<uint8_t, 1 << 16> buf_;
  size_t pos_ = 0;
  size_t fill_ = 0;
};

void append_bases(Read& r, const std::string& line) {
  for (char c : line) {
    int8_t code = base_code(c);
    if (code < 0) {
      r.has_ambiguous = true;
      r.ambiguous.push_back(uint32_t(r.seq.size()));
      code = kBaseA;
    }
    r.seq.push_code(uint8_t(code));
  }
}

}  // namespace

ReadSet parse_fastq(ByteSource& src) {
  ReadSet rs;
  LineReader lr(src);
  std::string header, bases, plus, qual;
  uint64_t idx = 0;
  while (lr.next(header)) {
    if (header.empty()) continue;  // tolerate blank separator lines
    if (header[0] != '@')
      throw ParseError("expected '@' header, got '" + header.substr(0, 16) + "'", idx);
    if (!lr.next(bases)) throw ParseError("missing sequence line", idx);
    if (!lr.next(plus)) throw ParseError("missing '+' line", idx);
    if (plus.empty() || plus[0] != '+') throw ParseError("expected '+' line", idx);
    if (!lr.next(qual)) throw ParseError("missing quality line", idx);
    if (qual.size() != bases.size())
      throw ParseError("quality length " + std::to_string(qual.size()) +
                           " != sequence length " + std::to_string(bases.size()),
                       idx);
    if (bases.empty()) throw ParseError("empty sequence", idx);
    Read r;
    r.id = idx;
    r.name = header.substr(1);
    r.seq.reserve_bases(bases.size());
    append_bases(r, bases);
    rs.reads.push_back(std::move(r));
    idx++;
  }
  return rs;
}

ReadSet parse_fastq_file(const std::string& path) {
  auto src = open_source(path);
  return parse_fastq(*src);
}

ReferenceGenome parse_fasta(ByteSource& src) {
  ReferenceGenome ref;
  LineReader lr(src);
  std::string line;
  bool saw_header = false;
  uint64_t record = 0;
  while (lr.next(line)) {
    if (line.empty()) continue;
    if (line[0] == '>') {
      if (!saw_header) {
        ref.name = line.substr(1);
        saw_header = true;
      } else {
        ref.boundaries.push_back(ref.seq.size());
      }
      record++;
      continue;
    }
    if (!saw_header) throw ParseError("FASTA data before any '>' header", 0);
    for (char c : line) {
      if (c == ' ' || c == '\t') continue;
      int8_t code = base_code(c);
      if (code < 0) {
        ref.ambiguous.push_back(ref.seq.size());
        code = kBaseA;
      }
      ref.seq.push_code(uint8_t(code));
    }
  }
  if (!saw_header) throw ParseError("no FASTA header line", 0);
  return ref;
}

ReferenceGenome parse_fasta_file(const std::string& path) {
  auto src = open_source(path);
  return parse_fasta(*src);
}

void copy_fastq_records(ByteSource& src, const std::function<bool(uint64_t)>& keep,
                        std::ostream& out) {
  LineReader lr(src);
  std::string l1, l2, l3, l4;
  uint64_t idx = 0;
  while (lr.next(l1)) {
    if (l1.empty()) continue;
    if (!lr.next(l2) || !lr.next(l3) || !lr.next(l4))
      throw ParseError("truncated record", idx);
    if (keep(idx)) out << l1 << '\n' << l2 << '\n' << l3 << '\n' << l4 << '\n';
    idx++;
  }
}

void write_fastq(std::ostream& os, const ReadSet& rs) {
  std::string qual;
  for (const Read& r : rs.reads) {
    qual.assign(r.len(), 'I');
    os << '@' << r.name << '\n' << r.seq.to_string() << "\n+\n" << qual << '\n';
  }
}

void write_fasta(std::ostream& os, const ReferenceGenome& ref, size_t line_width) {
  os << '>' << ref.name << '\n';
  std::string s = ref.seq.to_string();
  size_t next_boundary_idx = 0;
  uint64_t pos = 0;
  uint64_t part = 0;
  while (pos < s.size()) {
    uint64_t end = ref.boundaries.size() > next_boundary_idx
                       ? ref.boundaries[next_boundary_idx]
                       : s.size();
    for (uint64_t i = pos; i < end; i += line_width)
      os << std::string_view(s).substr(i, std::min<uint64_t>(line_width, end - i)) << '\n';
    pos = end;
    if (next_boundary_idx < ref.boundaries.size()) {
      next_boundary_idx++;
      part++;
      os << '>' << ref.name << "_part" << part << '\n';
    }
  }
}

}  // namespace genstore::seqio
