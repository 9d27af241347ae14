// tkws/accel.h
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tkws/config.h"
#include "tkws/ctm_eval.h"
#include "tkws/ctm_model.h"
#include "tkws/feature_map.h"
#include "tkws/ogbcsr.h"
#include "tkws/sched.h"

namespace tkws::accel {

// Everything the simulator needs from the dense model besides the include
// masks, which arrive compressed: geometry plus per-clause vote polarity.
struct ModelMeta {
  ctm::ModelShape shape;
  std::vector<std::int8_t> polarity;

  void validate() const;
  static ModelMeta from(const ctm::Model& model);
};

struct SimConfig {
  int job_overhead_cycles = 2;  // per-job setup charge
  bool record_trace = false;

  void validate() const;
  static SimConfig from(const Config& cfg);
};

// One model-memory block fetch. cycle is the issuing PE's local clock; job
// is the group index; block is the block's index within the include mask.
struct TraceRecord {
  std::uint64_t cycle = 0;
  int pe = 0;
  std::uint32_t job = 0;
  std::uint32_t block = 0;
  bool operator==(const TraceRecord&) const = default;
};

struct PEState {
  int pe = 0;
  std::vector<std::uint32_t> jobs;  // group indices, schedule order
  std::uint64_t cycles = 0;         // blocks streamed + per-job overhead
  std::uint64_t blocks = 0;
  std::uint64_t feature_reads = 0;  // single-bit feature fetches
  std::uint64_t idle = 0;           // total_cycles - cycles
};

struct SimReport {
  std::uint64_t total_cycles = 0;
  // Included-literal gate evaluations. logic_ops counts every (clause,
  // window) pair; the short-circuit counter stops evaluating a clause once
  // some window already matched it, mirroring an OR early-exit at window
  // granularity.
  std::uint64_t logic_ops = 0;
  std::uint64_t logic_ops_short_circuit = 0;
  std::uint64_t model_mem_reads = 0;    // block fetches
  std::uint64_t feature_mem_reads = 0;  // single-bit feature fetches
  std::vector<PEState> pes;
  std::vector<double> per_pe_utilization;  // cycles / total_cycles
  std::vector<int> class_sums;
  std::vector<TraceRecord> trace;  // filled only when record_trace is set
};

// Replays the schedule on an array of PEs. Each PE takes its jobs in
// schedule order; per job it charges the setup overhead, then for every
// window position streams the group's ascending block list once, one block
// per cycle, one fetch serving every member of the group. Feature columns
// are fetched on first touch per PE and reused across windows and jobs.
// Class sums follow the dense inference semantics exactly: a clause votes
// its polarity once if any window matched, sums clamp to [-T, T].
SimReport simulate(const ogbcsr::OGBCSRModel& compressed,
                   const sched::Schedule& schedule,
                   const frontend::BooleanFeatureMap& fmap,
                   const ModelMeta& meta, const SimConfig& cfg = {});

// Closed-form pre-short-circuit gate count: sum over live clauses of
// include count x window count. Equals SimReport::logic_ops exactly.
std::uint64_t analytic_ops(const ogbcsr::OGBCSRModel& compressed,
                           const ctm::ModelShape& shape);

struct UtilizationSummary {
  std::vector<double> per_pe;
  double aggregate = 1.0;  // mean over PEs
};
UtilizationSummary report_utilization(const SimReport& sim);

// "key: value" lines; reals at 4 decimals.
void write_report(std::ostream& os, const SimReport& sim);
// CSV trace: header then one "cycle,pe,job,block_index" row per fetch.
void write_trace_csv(std::ostream& os, const SimReport& sim);

}  // namespace tkws::accel
