// src/accel.cc
#include "tkws/accel.h"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "tkws/error.h"

namespace tkws::accel {

void ModelMeta::validate() const {
  shape.validate();
  if (polarity.size() != static_cast<std::size_t>(shape.clause_count()))
    throw Error(cat("polarity table covers ", polarity.size(),
                    " clauses, want ", shape.clause_count()));
  for (std::size_t c = 0; c < polarity.size(); ++c)
    if (polarity[c] != 1 && polarity[c] != -1)
      throw Error(cat("clause ", c, " polarity ", int{polarity[c]},
                      " is not +1/-1"));
}

ModelMeta ModelMeta::from(const ctm::Model& model) {
  ModelMeta meta;
  meta.shape = model.shape();
  const int n = meta.shape.clause_count();
  meta.polarity.resize(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c)
    meta.polarity[static_cast<std::size_t>(c)] =
        static_cast<std::int8_t>(model.polarity(c));
  return meta;
}

void SimConfig::validate() const {
  if (job_overhead_cycles < 0)
    throw Error(cat("job overhead must be >= 0 cycles, got ",
                    job_overhead_cycles));
}

SimConfig SimConfig::from(const Config& cfg) {
  SimConfig c;
  c.job_overhead_cycles =
      static_cast<int>(cfg.get_int("accel.job_overhead_cycles"));
  c.validate();
  return c;
}

SimReport simulate(const ogbcsr::OGBCSRModel& compressed,
                   const sched::Schedule& schedule,
                   const frontend::BooleanFeatureMap& fmap,
                   const ModelMeta& meta, const SimConfig& cfg) {
  meta.validate();
  cfg.validate();
  ogbcsr::validate(compressed);
  const ctm::ModelShape& shape = meta.shape;
  if (compressed.mask_bits != static_cast<std::uint32_t>(shape.literals()))
    throw FormatError(cat("compressed mask width ", compressed.mask_bits,
                          " does not fit model with ", shape.literals(),
                          " literals"));
  if (compressed.clause_count !=
      static_cast<std::uint32_t>(shape.clause_count()))
    throw FormatError(cat("compressed model has ", compressed.clause_count,
                          " clauses, model shape wants ",
                          shape.clause_count()));
  if (schedule.assignment.size() != compressed.groups.size())
    throw Error(cat("schedule covers ", schedule.assignment.size(),
                    " jobs, model has ", compressed.groups.size(),
                    " groups"));
  if (schedule.num_pes < 1)
    throw Error(cat("PE count must be >= 1, got ", schedule.num_pes));

  const std::vector<BitVec> windows = ctm::assemble_windows(shape, fmap);
  const int p_count = shape.windows();
  const std::size_t inputs = static_cast<std::size_t>(shape.inputs());
  const std::uint64_t col_bits =
      static_cast<std::uint64_t>(shape.channels) *
      static_cast<std::uint64_t>(shape.bins);

  SimReport rep;
  rep.class_sums.assign(static_cast<std::size_t>(shape.classes), 0);
  rep.pes.resize(static_cast<std::size_t>(schedule.num_pes));
  for (std::size_t p = 0; p < rep.pes.size(); ++p)
    rep.pes[p].pe = static_cast<int>(p);
  for (std::size_t g = 0; g < compressed.groups.size(); ++g) {
    const int pe = schedule.assignment[g];
    if (pe < 0 || pe >= schedule.num_pes)
      throw Error(cat("job ", g, " assigned to PE ", pe, ", have ",
                      schedule.num_pes));
    rep.pes[static_cast<std::size_t>(pe)].jobs.push_back(
        static_cast<std::uint32_t>(g));
  }

  std::vector<char> fetched;
  std::vector<char> matched;
  std::vector<char> window_ok;
  std::vector<std::uint64_t> member_includes;
  for (PEState& pe : rep.pes) {
    fetched.assign(static_cast<std::size_t>(shape.frames), 0);
    for (std::uint32_t g : pe.jobs) {
      const ogbcsr::ClauseGroup& group = compressed.groups[g];
      const std::size_t arity = group.members.size();
      const std::size_t k = group.shared_blocks.size();
      pe.cycles += static_cast<std::uint64_t>(cfg.job_overhead_cycles);

      member_includes.assign(arity, 0);
      for (std::size_t m = 0; m < arity; ++m)
        for (std::size_t i = 0; i < k; ++i)
          member_includes[m] += group.payloads[m][i].popcount();

      matched.assign(arity, 0);
      for (int w = 0; w < p_count; ++w) {
        const BitVec& win = windows[static_cast<std::size_t>(w)];
        for (int t = w; t < w + shape.window; ++t) {
          if (!fetched[static_cast<std::size_t>(t)]) {
            fetched[static_cast<std::size_t>(t)] = 1;
            pe.feature_reads += col_bits;
          }
        }
        // A member with no includes at all can never vote; the dense
        // reference treats such clauses as silent at inference.
        window_ok.assign(arity, 1);
        for (std::size_t i = 0; i < k; ++i) {
          if (cfg.record_trace)
            rep.trace.push_back({pe.cycles, pe.pe, g, group.shared_blocks[i]});
          ++pe.cycles;
          ++pe.blocks;
          ++rep.model_mem_reads;
          const std::size_t base =
              static_cast<std::size_t>(group.shared_blocks[i]) *
              compressed.block_size;
          for (std::size_t m = 0; m < arity; ++m) {
            const BitVec& pay = group.payloads[m][i];
            const std::uint64_t gates = pay.popcount();
            rep.logic_ops += gates;
            if (matched[m] || member_includes[m] == 0) continue;
            rep.logic_ops_short_circuit += gates;
            if (!window_ok[m] || gates == 0) continue;
            pay.for_each_set([&](std::size_t b) {
              const std::size_t lit = base + b;
              const bool holds = lit < inputs ? win.get(lit)
                                              : !win.get(lit - inputs);
              if (!holds) window_ok[m] = 0;
            });
          }
        }
        for (std::size_t m = 0; m < arity; ++m)
          if (!matched[m] && window_ok[m] && member_includes[m] > 0)
            matched[m] = 1;
      }
      for (std::size_t m = 0; m < arity; ++m) {
        if (!matched[m]) continue;
        const std::uint16_t clause = group.members[m];
        const int cls = clause / shape.clauses_per_class;
        rep.class_sums[static_cast<std::size_t>(cls)] +=
            meta.polarity[clause];
      }
    }
  }

  for (int& s : rep.class_sums)
    s = std::clamp(s, -shape.threshold, shape.threshold);

  for (const PEState& pe : rep.pes) {
    rep.total_cycles = std::max(rep.total_cycles, pe.cycles);
    rep.feature_mem_reads += pe.feature_reads;
  }
  rep.per_pe_utilization.resize(rep.pes.size());
  for (std::size_t p = 0; p < rep.pes.size(); ++p) {
    PEState& pe = rep.pes[p];
    pe.idle = rep.total_cycles - pe.cycles;
    rep.per_pe_utilization[p] =
        rep.total_cycles == 0
            ? 1.0
            : static_cast<double>(pe.cycles) /
                  static_cast<double>(rep.total_cycles);
  }
  return rep;
}

std::uint64_t analytic_ops(const ogbcsr::OGBCSRModel& compressed,
                           const ctm::ModelShape& shape) {
  shape.validate();
  if (compressed.mask_bits != static_cast<std::uint32_t>(shape.literals()))
    throw FormatError(cat("compressed mask width ", compressed.mask_bits,
                          " does not fit model with ", shape.literals(),
                          " literals"));
  std::uint64_t includes = 0;
  for (const ogbcsr::ClauseGroup& g : compressed.groups)
    for (const auto& row : g.payloads)
      for (const BitVec& pay : row) includes += pay.popcount();
  return includes * static_cast<std::uint64_t>(shape.windows());
}

UtilizationSummary report_utilization(const SimReport& sim) {
  UtilizationSummary out;
  out.per_pe.resize(sim.pes.size());
  double total = 0.0;
  for (std::size_t p = 0; p < sim.pes.size(); ++p) {
    out.per_pe[p] = sim.total_cycles == 0
                        ? 1.0
                        : static_cast<double>(sim.pes[p].cycles) /
                              static_cast<double>(sim.total_cycles);
    total += out.per_pe[p];
  }
  out.aggregate = sim.pes.empty() ? 1.0 : total / static_cast<double>(sim.pes.size());
  return out;
}

void write_report(std::ostream& os, const SimReport& sim) {
  const UtilizationSummary util = report_utilization(sim);
  os << "total_cycles: " << sim.total_cycles << "\n";
  os << "model_mem_reads: " << sim.model_mem_reads << "\n";
  os << "feature_mem_reads: " << sim.feature_mem_reads << "\n";
  os << "logic_ops: " << sim.logic_ops << "\n";
  os << "logic_ops_short_circuit: " << sim.logic_ops_short_circuit << "\n";
  os << std::fixed << std::setprecision(4);
  os << "utilization_aggregate: " << util.aggregate << "\n";
  os << "pe_utilization:";
  for (double u : util.per_pe) os << ' ' << u;
  os << "\n";
  os.unsetf(std::ios::fixed);
  os << "class_sums:";
  for (int s : sim.class_sums) os << ' ' << s;
  os << "\n";
  os << "predicted_class: " << ctm::argmax_class(sim.class_sums) << "\n";
}

void write_trace_csv(std::ostream& os, const SimReport& sim) {
  os << "cycle,pe,job,block_index\n";
  for (const TraceRecord& r : sim.trace)
    os << r.cycle << ',' << r.pe << ',' << r.job << ',' << r.block << "\n";
}

}  // namespace tkws::accel
