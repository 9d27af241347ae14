// tkws/ogbcsr.h
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tkws/bitvec.h"
#include "tkws/ctm_model.h"

namespace tkws::ogbcsr {

// One include mask per clause, each mask_bits (= 2L) long. Clause ids are
// positions in the vector. Dead clauses keep their (empty) mask here; they
// are dropped only when encoding.
struct IncludeMaskSet {
  std::uint32_t mask_bits = 0;
  std::vector<BitVec> masks;
  bool operator==(const IncludeMaskSet&) const = default;
};

// Field widths shared by the size formula, the encoder and the file format.
// A mask splits into max_blocks fixed blocks of block_size bits (the last
// one possibly padded); indices need index_bit_width bits and a per-group
// block count needs count_bit_width bits.
std::uint32_t max_block_count(std::uint32_t mask_bits, std::uint32_t block_size);
std::uint32_t index_bit_width(std::uint32_t max_blocks);
std::uint32_t count_bit_width(std::uint32_t max_blocks);

struct NonzeroBlock {
  std::uint32_t index = 0;
  BitVec payload;  // block_size bits, at least one set
  bool operator==(const NonzeroBlock&) const = default;
};

// Sparse form of one clause mask: only nonzero blocks, ascending by index.
struct BlockRow {
  std::uint32_t clause = 0;
  std::uint32_t block_size = 0;
  std::vector<NonzeroBlock> blocks;
  bool dead() const { return blocks.empty(); }
  bool operator==(const BlockRow&) const = default;
};

// One or two clauses sharing a block-index list. payloads[m][k] holds
// members[m]'s bits for shared_blocks[k]; all-zero is allowed there, it
// means that member has nothing in the block.
struct ClauseGroup {
  std::vector<std::uint16_t> members;        // ascending
  std::vector<std::uint32_t> shared_blocks;  // strictly increasing union
  std::vector<std::vector<BitVec>> payloads;
  bool operator==(const ClauseGroup&) const = default;
};

struct OGBCSRModel {
  std::uint32_t block_size = 0;
  std::uint32_t index_bits = 0;  // = index_bit_width(max_blocks())
  std::uint32_t mask_bits = 0;
  std::uint32_t clause_count = 0;
  BitVec dead;  // clause_count bits; set = empty mask, excluded from groups
  std::vector<ClauseGroup> groups;

  std::uint32_t max_blocks() const {
    return max_block_count(mask_bits, block_size);
  }
  // Model-memory footprint: per group, a block count (count_bit_width bits),
  // the shared indices (index_bits each) and one block_size-bit payload per
  // member per shared block. No alignment.
  std::uint64_t size_bits() const;
  bool operator==(const OGBCSRModel&) const = default;
};

enum class GroupingMode {
  kExact,      // maximum-weight matching, authoritative
  kGreedy,     // heaviest-positive-edge-first fallback
  kUngrouped,  // every live clause alone (plain block-compressed rows)
};

IncludeMaskSet extract_masks(const ctm::Model& model);

BlockRow mask_to_row(const BitVec& mask, std::uint32_t clause,
                     std::uint32_t block_size);
std::vector<BlockRow> to_block_rows(const IncludeMaskSet& masks,
                                    std::uint32_t block_size);
BitVec row_to_mask(const BlockRow& row, std::uint32_t mask_bits);

// Bits a row costs alone, and bits saved by pairing two rows (may be
// negative when their block sets barely overlap).
std::uint64_t row_size_bits(const BlockRow& row, std::uint32_t mask_bits);
std::int64_t pair_weight(const BlockRow& a, const BlockRow& b,
                         std::uint32_t mask_bits);

// mate[i] = row paired with row i, or -1 (singleton or dead row). Only
// pairs with positive weight are ever formed, so grouping never inflates
// the encoding.
std::vector<int> optimal_pairing(const std::vector<BlockRow>& rows,
                                 std::uint32_t mask_bits, GroupingMode mode);

OGBCSRModel encode_masks(const IncludeMaskSet& masks, std::uint32_t block_size,
                         GroupingMode mode = GroupingMode::kExact);
OGBCSRModel encode(const ctm::Model& model, std::uint32_t block_size,
                   GroupingMode mode = GroupingMode::kExact);

// Structural checks; throws FormatError naming the offending group or
// clause. decode and the file paths run this implicitly.
void validate(const OGBCSRModel& c);

// Exact inverse of encode at the mask level; dead clauses come back as
// empty masks. Malformed models raise FormatError naming the bad group.
IncludeMaskSet decode(const OGBCSRModel& c);

// Model-memory image; bit_len equals size_bits() exactly.
struct PackedStream {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_len = 0;
};
PackedStream pack_stream(const OGBCSRModel& c);

// Container file: header {magic "TKWSOGB1", version, block size, index
// bits, mask bits, clause count, dead bitmap (byte length + bytes), group
// count}, then per group a bit-packed record {arity:8, block count:16,
// indices:index_bits each, member ids:16 each, payloads:block_size bits per
// member per block} padded to a byte boundary.
inline constexpr std::uint32_t kOgbcsrFileVersion = 1;

void write_ogbcsr(const std::string& path, const OGBCSRModel& c);
OGBCSRModel read_ogbcsr(const std::string& path);

struct SweepEntry {
  std::uint32_t block_size = 0;
  std::uint64_t size_bits = 0;
  double ratio_masks = 0.0;   // size_bits / (clauses * mask_bits)
  double ratio_states = 0.0;  // size_bits / (clauses * mask_bits * 8)
};

struct SweepReport {
  std::uint64_t mask_baseline_bits = 0;   // clauses * mask_bits
  std::uint64_t state_baseline_bits = 0;  // clauses * mask_bits * 8
  std::vector<SweepEntry> entries;        // one per candidate, input order
  std::uint32_t best_block_size = 0;      // argmin size_bits, first on ties
};

SweepReport sweep_block_size(const IncludeMaskSet& masks,
                             const std::vector<std::uint32_t>& candidates,
                             GroupingMode mode = GroupingMode::kExact);

}  // namespace tkws::ogbcsr
