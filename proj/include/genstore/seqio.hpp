#ifndef GENSTORE_SEQIO_HPP
#define GENSTORE_SEQIO_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace genstore::seqio {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, uint64_t record_index)
      : std::runtime_error("record " + std::to_string(record_index) + ": " + msg),
        record_index_(record_index) {}
  uint64_t record_index() const { return record_index_; }

 private:
  uint64_t record_index_;
};

// 2-bit base codes: A=0, C=1, G=2, T=3.
inline constexpr uint8_t kBaseA = 0;
inline constexpr uint8_t kBaseC = 1;
inline constexpr uint8_t kBaseG = 2;
inline constexpr uint8_t kBaseT = 3;

// Returns the 2-bit code for an ACGT symbol (case-insensitive), -1 otherwise.
int8_t base_code(char c);
char base_char(uint8_t code);
inline uint8_t complement_code(uint8_t code) { return uint8_t(3 - code); }

// Packed 2-bit sequence, MSB-first within each byte: the first base occupies
// bits 7..6, so byte-wise comparison of equal-length sequences matches
// lexicographic base order (A < C < G < T).
class PackedSeq {
 public:
  PackedSeq() = default;

  // Throws std::invalid_argument on any non-ACGT symbol.
  static PackedSeq from_string(std::string_view s);

  uint64_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  uint8_t code_at(uint64_t i) const {
    return uint8_t((bytes_[i >> 2] >> (6 - 2 * (i & 3))) & 3);
  }

  void push_code(uint8_t code);
  void reserve_bases(uint64_t n) { bytes_.reserve((n + 3) / 4); }

  std::string to_string() const;
  PackedSeq subseq(uint64_t pos, uint64_t count) const;

  const std::vector<uint8_t>& bytes() const { return bytes_; }

  friend bool operator==(const PackedSeq& a, const PackedSeq& b) {
    return a.len_ == b.len_ && a.bytes_ == b.bytes_;
  }
  // Lexicographic base order; valid because trailing pad bits are zero.
  friend std::strong_ordering operator<=>(const PackedSeq& a, const PackedSeq& b);

 private:
  std::vector<uint8_t> bytes_;
  uint64_t len_ = 0;
};

PackedSeq revcomp(const PackedSeq& s);

struct Read {
  uint64_t id = 0;
  std::string name;                 // header line without the leading '@'
  PackedSeq seq;                    // ambiguous symbols stored as code A
  bool has_ambiguous = false;
  std::vector<uint32_t> ambiguous;  // positions of non-ACGT symbols
  uint64_t len() const { return seq.size(); }
};

struct ReadSet {
  std::vector<Read> reads;
  size_t size() const { return reads.size(); }
  bool empty() const { return reads.empty(); }
};

struct ReferenceGenome {
  std::string name;                  // header of the first record
  PackedSeq seq;                     // records concatenated
  std::vector<uint64_t> boundaries;  // start offset of records 2..n
  std::vector<uint64_t> ambiguous;   // positions replaced by 'A', sorted
  uint64_t len() const { return seq.size(); }
};

// Bitmap over k-mer start positions [0, len-k]: 1 where the k-mer neither
// crosses a record boundary nor overlaps an ambiguous position. Empty when
// len < k.
std::vector<uint8_t> valid_kmer_starts(uint64_t len, uint32_t k,
                                       const std::vector<uint64_t>& ambiguous,
                                       const std::vector<uint64_t>& boundaries);

// Pull-based byte source; parsing behaviour is independent of the chunk
// sizes a source hands back.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Returns 0 only at end of stream.
  virtual size_t read(uint8_t* buf, size_t n) = 0;
};

class FileSource : public ByteSource {
 public:
  explicit FileSource(const std::string& path);  // throws std::runtime_error
  ~FileSource() override;
  size_t read(uint8_t* buf, size_t n) override;

 private:
  void* file_ = nullptr;
};

class MemorySource : public ByteSource {
 public:
  explicit MemorySource(std::string data, size_t max_chunk = SIZE_MAX)
      : data_(std::move(data)), max_chunk_(max_chunk ? max_chunk : 1) {}
  size_t read(uint8_t* buf, size_t n) override;

 private:
  std::string data_;
  size_t pos_ = 0;
  size_t max_chunk_;
};

// zlib inflate wrapper (gzip framing).
class GzipSource : public ByteSource {
 public:
  explicit GzipSource(std::unique_ptr<ByteSource> inner);
  ~GzipSource() override;
  size_t read(uint8_t* buf, size_t n) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Opens a file and transparently unwraps gzip (magic bytes 0x1F 0x8B).
std::unique_ptr<ByteSource> open_source(const std::string& path);

ReadSet parse_fastq(ByteSource& src);
ReadSet parse_fastq_file(const std::string& path);
ReferenceGenome parse_fasta(ByteSource& src);
ReferenceGenome parse_fasta_file(const std::string& path);

// Re-emits the FASTQ records whose 0-based index satisfies keep(), copying
// the original lines (headers, bases, qualities) unmodified.
void copy_fastq_records(ByteSource& src, const std::function<bool(uint64_t)>& keep,
                        std::ostream& out);

// Writers used by the workload generator. Reads are written with a constant
// placeholder quality line.
void write_fastq(std::ostream& os, const ReadSet& rs);
void write_fasta(std::ostream& os, const ReferenceGenome& ref, size_t line_width = 70);

}  // namespace genstore::seqio

#endif
