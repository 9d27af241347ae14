// ogbcsr.cc
#include "tkws/ogbcsr.h"

#include <algorithm>
#include <bit>
#include <fstream>
#include <limits>

#include "tkws/binio.h"
#include "tkws/error.h"
#include "tkws/matching.h"

namespace tkws::ogbcsr {

std::uint32_t max_block_count(std::uint32_t mask_bits,
                              std::uint32_t block_size) {
  if (block_size == 0) throw Error("block size must be >= 1");
  return (mask_bits + block_size - 1) / block_size;
}

std::uint32_t index_bit_width(std::uint32_t max_blocks) {
  return max_blocks <= 1 ? 0 : std::bit_width(max_blocks - 1);
}

std::uint32_t count_bit_width(std::uint32_t max_blocks) {
  return std::bit_width(max_blocks);
}

IncludeMaskSet extract_masks(const ctm::Model& model) {
  const ctm::ModelShape& sh = model.shape();
  IncludeMaskSet out;
  out.mask_bits = static_cast<std::uint32_t>(sh.literals());
  out.masks.reserve(static_cast<std::size_t>(sh.clause_count()));
  for (int c = 0; c < sh.clause_count(); ++c)
    out.masks.push_back(ctm::clause_literals(model, c));
  return out;
}

BlockRow mask_to_row(const BitVec& mask, std::uint32_t clause,
                     std::uint32_t block_size) {
  const std::uint32_t nblocks =
      max_block_count(static_cast<std::uint32_t>(mask.size()), block_size);
  BlockRow row;
  row.clause = clause;
  row.block_size = block_size;
  for (std::uint32_t b = 0; b < nblocks; ++b) {
    BitVec payload(block_size);
    bool nonzero = false;
    for (std::uint32_t off = 0; off < block_size; off += 64) {
      const int n = static_cast<int>(std::min<std::uint32_t>(64, block_size - off));
      // slice64 reads past the mask end as zero, which pads the final block.
      const std::uint64_t v =
          mask.slice64(static_cast<std::size_t>(b) * block_size + off, n);
      if (v) {
        payload.set_slice64(off, n, v);
        nonzero = true;
      }
    }
    if (nonzero) row.blocks.push_back({b, std::move(payload)});
  }
  return row;
}

std::vector<BlockRow> to_block_rows(const IncludeMaskSet& masks,
                                    std::uint32_t block_size) {
  std::vector<BlockRow> rows;
  rows.reserve(masks.masks.size());
  for (std::size_t c = 0; c < masks.masks.size(); ++c) {
    if (masks.masks[c].size() != masks.mask_bits)
      throw Error(cat("mask ", c, " has ", masks.masks[c].size(),
                      " bits, expected ", masks.mask_bits));
    rows.push_back(
        mask_to_row(masks.masks[c], static_cast<std::uint32_t>(c), block_size));
  }
  return rows;
}

BitVec row_to_mask(const BlockRow& row, std::uint32_t mask_bits) {
  BitVec mask(mask_bits);
  for (const NonzeroBlock& blk : row.blocks) {
    for (std::uint32_t off = 0; off < row.block_size; off += 64) {
      const int n =
          static_cast<int>(std::min<std::uint32_t>(64, row.block_size - off));
      const std::uint64_t v = blk.payload.slice64(off, n);
      if (!v) continue;
      const std::size_t pos =
          static_cast<std::size_t>(blk.index) * row.block_size + off;
      if (pos + static_cast<std::size_t>(n) > mask_bits) {
        // Bits are only allowed past the end if they are zero padding.
        const std::size_t fit = pos < mask_bits ? mask_bits - pos : 0;
        if (v >> fit)
          throw FormatError(cat("clause ", row.clause, " block ", blk.index,
                                " sets bits past the mask end"));
        if (fit) mask.set_slice64(pos, static_cast<int>(fit), v);
      } else {
        mask.set_slice64(pos, n, v);
      }
    }
  }
  return mask;
}

std::uint64_t row_size_bits(const BlockRow& row, std::uint32_t mask_bits) {
  const std::uint32_t mb = max_block_count(mask_bits, row.block_size);
  const std::uint64_t k = row.blocks.size();
  return count_bit_width(mb) + k * (index_bit_width(mb) + row.block_size);
}

std::int64_t pair_weight(const BlockRow& a, const BlockRow& b,
                         std::uint32_t mask_bits) {
  if (a.block_size != b.block_size)
    throw Error("pair_weight needs rows with the same block size");
  const std::uint32_t mb = max_block_count(mask_bits, a.block_size);
  // |union| by merging the two sorted index lists.
  std::size_t i = 0, j = 0;
  std::uint64_t u = 0;
  while (i < a.blocks.size() && j < b.blocks.size()) {
    const std::uint32_t ai = a.blocks[i].index;
    const std::uint32_t bj = b.blocks[j].index;
    if (ai <= bj) ++i;
    if (bj <= ai) ++j;
    ++u;
  }
  u += (a.blocks.size() - i) + (b.blocks.size() - j);
  const std::uint64_t paired = count_bit_width(mb) +
                               u * index_bit_width(mb) +
                               2 * u * a.block_size;
  return static_cast<std::int64_t>(row_size_bits(a, mask_bits)) +
         static_cast<std::int64_t>(row_size_bits(b, mask_bits)) -
         static_cast<std::int64_t>(paired);
}

std::vector<int> optimal_pairing(const std::vector<BlockRow>& rows,
                                 std::uint32_t mask_bits, GroupingMode mode) {
  const int n = static_cast<int>(rows.size());
  if (mode == GroupingMode::kUngrouped || n == 0)
    return std::vector<int>(static_cast<std::size_t>(n), -1);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i) {
    if (rows[static_cast<std::size_t>(i)].dead()) continue;
    for (int j = i + 1; j < n; ++j) {
      if (rows[static_cast<std::size_t>(j)].dead()) continue;
      const std::int64_t w = pair_weight(rows[static_cast<std::size_t>(i)],
                                         rows[static_cast<std::size_t>(j)],
                                         mask_bits);
      if (w > 0) edges.push_back({i, j, w});
    }
  }
  return mode == GroupingMode::kExact ? max_weight_matching(n, edges)
                                      : greedy_matching(n, edges);
}

namespace {

ClauseGroup make_group(const std::vector<const BlockRow*>& rs,
                       std::uint32_t block_size) {
  ClauseGroup g;
  for (const BlockRow* r : rs)
    g.members.push_back(static_cast<std::uint16_t>(r->clause));
  // Sorted union of the members' block indices.
  for (const BlockRow* r : rs)
    for (const NonzeroBlock& blk : r->blocks) g.shared_blocks.push_back(blk.index);
  std::sort(g.shared_blocks.begin(), g.shared_blocks.end());
  g.shared_blocks.erase(
      std::unique(g.shared_blocks.begin(), g.shared_blocks.end()),
      g.shared_blocks.end());
  for (const BlockRow* r : rs) {
    std::vector<BitVec> row_payloads;
    row_payloads.reserve(g.shared_blocks.size());
    std::size_t bi = 0;
    for (std::uint32_t idx : g.shared_blocks) {
      while (bi < r->blocks.size() && r->blocks[bi].index < idx) ++bi;
      if (bi < r->blocks.size() && r->blocks[bi].index == idx)
        row_payloads.push_back(r->blocks[bi].payload);
      else
        row_payloads.push_back(BitVec(block_size));
    }
    g.payloads.push_back(std::move(row_payloads));
  }
  return g;
}

// Structural checks shared by decode and the file reader. Throws
// FormatError naming the offending group or clause.
void validate_model(const OGBCSRModel& c) {
  if (c.block_size == 0) throw FormatError("block size 0");
  if (c.index_bits != index_bit_width(c.max_blocks()))
    throw FormatError(cat("index bit width ", c.index_bits,
                          " inconsistent with ", c.max_blocks(), " blocks"));
  if (c.dead.size() != c.clause_count)
    throw FormatError(cat("dead bitmap has ", c.dead.size(),
                          " bits for ", c.clause_count, " clauses"));
  BitVec seen(c.clause_count);
  for (std::size_t gi = 0; gi < c.groups.size(); ++gi) {
    const ClauseGroup& g = c.groups[gi];
    if (g.members.empty() || g.members.size() > 2)
      throw FormatError(cat("group ", gi, " has arity ", g.members.size()));
    if (g.payloads.size() != g.members.size())
      throw FormatError(cat("group ", gi, " has ", g.payloads.size(),
                            " payload rows for ", g.members.size(),
                            " members"));
    std::uint32_t prev_member = 0;
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      const std::uint32_t id = g.members[m];
      if (id >= c.clause_count)
        throw FormatError(cat("group ", gi, " names clause ", id,
                              " out of ", c.clause_count));
      if (m > 0 && id <= prev_member)
        throw FormatError(cat("group ", gi, " member ids not ascending"));
      prev_member = id;
      if (c.dead.get(id))
        throw FormatError(cat("group ", gi, " includes dead clause ", id));
      if (seen.get(id))
        throw FormatError(cat("clause ", id, " appears in more than one group"));
      seen.set(id);
      if (g.payloads[m].size() != g.shared_blocks.size())
        throw FormatError(cat("group ", gi, " member ", m, " has ",
                              g.payloads[m].size(), " payloads for ",
                              g.shared_blocks.size(), " blocks"));
      for (const BitVec& p : g.payloads[m])
        if (p.size() != c.block_size)
          throw FormatError(cat("group ", gi, " payload width ", p.size(),
                                " != block size ", c.block_size));
    }
    for (std::size_t k = 0; k < g.shared_blocks.size(); ++k) {
      if (g.shared_blocks[k] >= c.max_blocks())
        throw FormatError(cat("group ", gi, " block index ",
                              g.shared_blocks[k], " out of ",
                              c.max_blocks()));
      if (k > 0 && g.shared_blocks[k] <= g.shared_blocks[k - 1])
        throw FormatError(cat("group ", gi,
                              " block indices not strictly increasing"));
    }
  }
  for (std::uint32_t id = 0; id < c.clause_count; ++id)
    if (!c.dead.get(id) && !seen.get(id))
      throw FormatError(cat("clause ", id, " missing from every group"));
}

void append_payload_bits(BitWriter* w, const BitVec& payload) {
  for (std::size_t off = 0; off < payload.size(); off += 64) {
    const int n = static_cast<int>(std::min<std::size_t>(64, payload.size() - off));
    w->write(payload.slice64(off, n), n);
  }
}

BitVec read_payload_bits(BitReader* r, std::uint32_t block_size) {
  BitVec payload(block_size);
  for (std::uint32_t off = 0; off < block_size; off += 64) {
    const int n =
        static_cast<int>(std::min<std::uint32_t>(64, block_size - off));
    payload.set_slice64(off, n, r->read(n));
  }
  return payload;
}

}  // namespace

OGBCSRModel encode_masks(const IncludeMaskSet& masks, std::uint32_t block_size,
                         GroupingMode mode) {
  if (masks.masks.size() > 65536)
    throw Error(cat("cannot encode ", masks.masks.size(),
                    " clauses; clause ids are 16-bit"));
  OGBCSRModel c;
  c.block_size = block_size;
  c.mask_bits = masks.mask_bits;
  c.index_bits = index_bit_width(max_block_count(masks.mask_bits, block_size));
  c.clause_count = static_cast<std::uint32_t>(masks.masks.size());
  c.dead = BitVec(c.clause_count);
  const std::vector<BlockRow> rows = to_block_rows(masks, block_size);
  for (const BlockRow& r : rows)
    if (r.dead()) c.dead.set(r.clause);
  const std::vector<int> mate = optimal_pairing(rows, masks.mask_bits, mode);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dead()) continue;
    const int j = mate[i];
    if (j >= 0 && static_cast<std::size_t>(j) < i) continue;  // emitted already
    std::vector<const BlockRow*> members{&rows[i]};
    if (j >= 0) members.push_back(&rows[static_cast<std::size_t>(j)]);
    c.groups.push_back(make_group(members, block_size));
  }
  return c;
}

OGBCSRModel encode(const ctm::Model& model, std::uint32_t block_size,
                   GroupingMode mode) {
  return encode_masks(extract_masks(model), block_size, mode);
}

void validate(const OGBCSRModel& c) { validate_model(c); }

IncludeMaskSet decode(const OGBCSRModel& c) {
  validate_model(c);
  IncludeMaskSet out;
  out.mask_bits = c.mask_bits;
  out.masks.assign(c.clause_count, BitVec(c.mask_bits));
  for (const ClauseGroup& g : c.groups) {
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      BlockRow row;
      row.clause = g.members[m];
      row.block_size = c.block_size;
      for (std::size_t k = 0; k < g.shared_blocks.size(); ++k)
        if (g.payloads[m][k].any())
          row.blocks.push_back({g.shared_blocks[k], g.payloads[m][k]});
      out.masks[g.members[m]] = row_to_mask(row, c.mask_bits);
    }
  }
  return out;
}

std::uint64_t OGBCSRModel::size_bits() const {
  const std::uint32_t cf = count_bit_width(max_blocks());
  std::uint64_t total = 0;
  for (const ClauseGroup& g : groups)
    total += cf +
             static_cast<std::uint64_t>(g.shared_blocks.size()) *
                 (index_bits + static_cast<std::uint64_t>(g.members.size()) *
                                   block_size);
  return total;
}

PackedStream pack_stream(const OGBCSRModel& c) {
  const std::uint32_t cf = count_bit_width(c.max_blocks());
  BitWriter w;
  for (const ClauseGroup& g : c.groups) {
    w.write(g.shared_blocks.size(), static_cast<int>(cf));
    for (std::uint32_t idx : g.shared_blocks)
      w.write(idx, static_cast<int>(c.index_bits));
    for (const std::vector<BitVec>& member : g.payloads)
      for (const BitVec& p : member) append_payload_bits(&w, p);
  }
  return {w.bytes(), w.bit_size()};
}

void write_ogbcsr(const std::string& path, const OGBCSRModel& c) {
  validate_model(c);
  for (std::size_t gi = 0; gi < c.groups.size(); ++gi)
    if (c.groups[gi].shared_blocks.size() > 65535)
      throw Error(cat("group ", gi, " has ", c.groups[gi].shared_blocks.size(),
                      " blocks; the block count field is 16-bit"));
  std::ofstream os = open_output(path);
  write_magic(os, "TKWSOGB1");
  write_u32(os, kOgbcsrFileVersion);
  write_u32(os, c.block_size);
  write_u32(os, c.index_bits);
  write_u32(os, c.mask_bits);
  write_u32(os, c.clause_count);
  const std::uint32_t bitmap_len = (c.clause_count + 7) / 8;
  write_u32(os, bitmap_len);
  for (std::uint32_t byte = 0; byte < bitmap_len; ++byte) {
    std::uint8_t v = 0;
    for (std::uint32_t bit = 0; bit < 8; ++bit) {
      const std::uint32_t id = byte * 8 + bit;
      if (id < c.clause_count && c.dead.get(id)) v |= std::uint8_t{1} << bit;
    }
    write_u8(os, v);
  }
  write_u32(os, static_cast<std::uint32_t>(c.groups.size()));
  BitWriter w;
  for (const ClauseGroup& g : c.groups) {
    w.write(g.members.size(), 8);
    w.write(g.shared_blocks.size(), 16);
    for (std::uint32_t idx : g.shared_blocks)
      w.write(idx, static_cast<int>(c.index_bits));
    for (std::uint16_t id : g.members) w.write(id, 16);
    for (const std::vector<BitVec>& member : g.payloads)
      for (const BitVec& p : member) append_payload_bits(&w, p);
    w.align_byte();
  }
  const std::vector<std::uint8_t>& bytes = w.bytes();
  if (!bytes.empty())
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError(cat("failed writing ", path));
}

OGBCSRModel read_ogbcsr(const std::string& path) {
  std::ifstream is = open_input(path);
  expect_magic(is, "TKWSOGB1", path.c_str());
  const std::uint32_t version = read_u32(is, "version");
  if (version != kOgbcsrFileVersion)
    throw FormatError(cat(path, ": unsupported version ", version));
  OGBCSRModel c;
  c.block_size = read_u32(is, "block size");
  c.index_bits = read_u32(is, "index bits");
  c.mask_bits = read_u32(is, "mask bits");
  c.clause_count = read_u32(is, "clause count");
  if (c.block_size == 0) throw FormatError(cat(path, ": block size 0"));
  if (c.mask_bits > (1u << 26) || c.block_size > (1u << 26))
    throw FormatError(cat(path, ": implausible geometry (mask bits ",
                          c.mask_bits, ", block size ", c.block_size, ")"));
  if (c.index_bits != index_bit_width(c.max_blocks()))
    throw FormatError(cat(path, ": index bit width ", c.index_bits,
                          " inconsistent with mask length ", c.mask_bits,
                          " and block size ", c.block_size));
  if (c.clause_count > 65536)
    throw FormatError(cat(path, ": clause count ", c.clause_count,
                          " exceeds the 16-bit id space"));
  const std::uint32_t bitmap_len = read_u32(is, "dead bitmap length");
  if (bitmap_len != (c.clause_count + 7) / 8)
    throw FormatError(cat(path, ": dead bitmap length ", bitmap_len,
                          " does not match ", c.clause_count, " clauses"));
  c.dead = BitVec(c.clause_count);
  for (std::uint32_t byte = 0; byte < bitmap_len; ++byte) {
    const std::uint8_t v = read_u8(is, "dead bitmap");
    for (std::uint32_t bit = 0; bit < 8; ++bit) {
      const std::uint32_t id = byte * 8 + bit;
      if (v & (std::uint8_t{1} << bit)) {
        if (id >= c.clause_count)
          throw FormatError(cat(path, ": dead bitmap padding bit set"));
        c.dead.set(id);
      }
    }
  }
  const std::uint32_t group_count = read_u32(is, "group count");
  if (group_count > c.clause_count)
    throw FormatError(cat(path, ": ", group_count, " groups for ",
                          c.clause_count, " clauses"));
  std::vector<std::uint8_t> body(std::istreambuf_iterator<char>(is), {});
  BitReader r(body);
  c.groups.reserve(group_count);
  for (std::uint32_t gi = 0; gi < group_count; ++gi) {
    ClauseGroup g;
    const std::uint64_t arity = r.read(8);
    if (arity < 1 || arity > 2)
      throw FormatError(cat(path, ": group ", gi, " has arity ", arity));
    const std::uint64_t nblocks = r.read(16);
    g.shared_blocks.reserve(nblocks);
    for (std::uint64_t k = 0; k < nblocks; ++k)
      g.shared_blocks.push_back(
          static_cast<std::uint32_t>(r.read(static_cast<int>(c.index_bits))));
    for (std::uint64_t m = 0; m < arity; ++m)
      g.members.push_back(static_cast<std::uint16_t>(r.read(16)));
    for (std::uint64_t m = 0; m < arity; ++m) {
      std::vector<BitVec> member;
      member.reserve(nblocks);
      for (std::uint64_t k = 0; k < nblocks; ++k)
        member.push_back(read_payload_bits(&r, c.block_size));
      g.payloads.push_back(std::move(member));
    }
    r.align_byte();
    c.groups.push_back(std::move(g));
  }
  if (r.bits_left() != 0)
    throw FormatError(cat(path, ": ", r.bits_left(),
                          " trailing bits after the last group"));
  validate_model(c);
  return c;
}

SweepReport sweep_block_size(const IncludeMaskSet& masks,
                             const std::vector<std::uint32_t>& candidates,
                             GroupingMode mode) {
  if (candidates.empty())
    throw Error("sweep needs at least one candidate block size");
  SweepReport report;
  report.mask_baseline_bits =
      static_cast<std::uint64_t>(masks.masks.size()) * masks.mask_bits;
  report.state_baseline_bits = report.mask_baseline_bits * 8;
  std::uint64_t best_size = std::numeric_limits<std::uint64_t>::max();
  for (std::uint32_t b : candidates) {
    const OGBCSRModel c = encode_masks(masks, b, mode);
    SweepEntry e;
    e.block_size = b;
    e.size_bits = c.size_bits();
    if (report.mask_baseline_bits) {
      e.ratio_masks = static_cast<double>(e.size_bits) /
                      static_cast<double>(report.mask_baseline_bits);
      e.ratio_states = static_cast<double>(e.size_bits) /
                       static_cast<double>(report.state_baseline_bits);
    }
    if (e.size_bits < best_size) {
      best_size = e.size_bits;
      report.best_block_size = b;
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace tkws::ogbcsr
