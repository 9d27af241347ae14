// tkws/bitvec.h
#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tkws/error.h"

namespace tkws {

// Fixed-length bit vector packed into 64-bit words, bit i of the vector is
// bit (i % 64) of word (i / 64). Trailing bits of the last word stay zero so
// equality and popcount work on whole words.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  std::size_t word_count() const { return w_.size(); }
  std::uint64_t word(std::size_t wi) const { return w_[wi]; }

  bool get(std::size_t i) const {
    assert(i < n_);
    return (w_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(std::size_t i, bool v = true) {
    assert(i < n_);
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }

  void reset() { w_.assign(w_.size(), 0); }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (std::uint64_t w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool any() const {
    for (std::uint64_t w : w_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  // True iff every set bit of *this is also set in x. Sizes must match.
  bool subset_of(const BitVec& x) const {
    assert(n_ == x.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~x.w_[i]) return false;
    return true;
  }

  bool intersects(const BitVec& x) const {
    assert(n_ == x.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & x.w_[i]) return true;
    return false;
  }

  // Reads n (<= 64) bits starting at bit offset pos. Bits at or beyond
  // size() read as zero.
  std::uint64_t slice64(std::size_t pos, int n) const {
    assert(n >= 0 && n <= 64);
    if (n == 0) return 0;
    const std::size_t wi = pos >> 6;
    const int off = static_cast<int>(pos & 63);
    std::uint64_t v = wi < w_.size() ? w_[wi] >> off : 0;
    if (off + n > 64 && wi + 1 < w_.size()) v |= w_[wi + 1] << (64 - off);
    if (n < 64) v &= (std::uint64_t{1} << n) - 1;
    return v;
  }

  // Writes n (<= 64) bits of v starting at bit offset pos; pos + n must not
  // exceed size().
  void set_slice64(std::size_t pos, int n, std::uint64_t v) {
    assert(n >= 0 && n <= 64);
    assert(pos + static_cast<std::size_t>(n) <= n_);
    if (n == 0) return;
    if (n < 64) v &= (std::uint64_t{1} << n) - 1;
    const std::size_t wi = pos >> 6;
    const int off = static_cast<int>(pos & 63);
    const std::uint64_t lo_mask =
        n < 64 ? ((std::uint64_t{1} << n) - 1) << off : ~std::uint64_t{0} << off;
    w_[wi] = (w_[wi] & ~lo_mask) | (v << off);
    if (off + n > 64) {
      const int hi = off + n - 64;
      const std::uint64_t hi_mask = (std::uint64_t{1} << hi) - 1;
      w_[wi + 1] = (w_[wi + 1] & ~hi_mask) | (v >> (64 - off));
    }
  }

  // Calls f(i) for every set bit, in increasing order of i.
  template <class F>
  void for_each_set(F&& f) const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      std::uint64_t w = w_[wi];
      while (w) {
        const int b = std::countr_zero(w);
        f(wi * 64 + static_cast<std::size_t>(b));
        w &= w - 1;
      }
    }
  }

  bool operator==(const BitVec&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Appends variable-width little-endian bit fields to a byte buffer. Bit k of
// the stream is bit (k % 8) of byte (k / 8).
class BitWriter {
 public:
  void write(std::uint64_t v, int nbits) {
    assert(nbits >= 0 && nbits <= 64);
    if (nbits == 0) return;
    if (nbits < 64) v &= (std::uint64_t{1} << nbits) - 1;
    std::size_t pos = bit_len_;
    bit_len_ += static_cast<std::size_t>(nbits);
    bytes_.resize((bit_len_ + 7) / 8, 0);
    int left = nbits;
    while (left > 0) {
      const std::size_t bi = pos >> 3;
      const int off = static_cast<int>(pos & 7);
      const int take = std::min(8 - off, left);
      bytes_[bi] |= static_cast<std::uint8_t>((v & ((1u << take) - 1)) << off);
      v >>= take;
      pos += take;
      left -= take;
    }
  }

  void align_byte() { bit_len_ = (bit_len_ + 7) & ~std::size_t{7}; }

  std::size_t bit_size() const { return bit_len_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_len_ = 0;
};

// Reads bit fields written by BitWriter. Throws FormatError on overrun.
class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t nbytes)
      : data_(data), bit_end_(nbytes * 8) {}
  explicit BitReader(const std::vector<std::uint8_t>& b)
      : BitReader(b.data(), b.size()) {}

  std::uint64_t read(int nbits) {
    assert(nbits >= 0 && nbits <= 64);
    if (pos_ + static_cast<std::size_t>(nbits) > bit_end_)
      throw FormatError(cat("bit stream truncated at bit offset ", pos_,
                            " (needed ", nbits, " more bits)"));
    std::uint64_t v = 0;
    int got = 0;
    std::size_t pos = pos_;
    while (got < nbits) {
      const std::size_t bi = pos >> 3;
      const int off = static_cast<int>(pos & 7);
      const int take = std::min(8 - off, nbits - got);
      const std::uint64_t piece = (data_[bi] >> off) & ((1u << take) - 1);
      v |= piece << got;
      got += take;
      pos += take;
    }
    pos_ = pos;
    return v;
  }

  void align_byte() { pos_ = (pos_ + 7) & ~std::size_t{7}; }

  std::size_t bit_pos() const { return pos_; }
  std::size_t bits_left() const { return bit_end_ - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t bit_end_;
  std::size_t pos_ = 0;
};

}  // namespace tkws
