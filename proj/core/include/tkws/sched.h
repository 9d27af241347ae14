// tkws/sched.h
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tkws/config.h"
#include "tkws/ogbcsr.h"

namespace tkws::sched {

// One schedulable unit: a clause group. Cost models the PE streaming rate,
// one block per cycle per window position, so cost = shared blocks x P.
struct ClauseJob {
  std::uint32_t group = 0;
  std::uint64_t cost = 0;
  bool operator==(const ClauseJob&) const = default;
};

std::vector<ClauseJob> jobs_from(const ogbcsr::OGBCSRModel& compressed,
                                 int windows);

struct Schedule {
  int num_pes = 1;
  std::vector<int> assignment;  // job id -> PE index
  std::vector<std::uint64_t> per_pe_cost;
  std::uint64_t makespan = 0;
  // total cost / (num_pes * makespan); defined as 1.0 when makespan is 0.
  double utilization = 1.0;
  bool operator==(const Schedule&) const = default;
};

// Builds the derived fields for a given assignment. Throws Error when the
// assignment does not cover the jobs or names a PE out of range.
Schedule place(const std::vector<ClauseJob>& jobs, int num_pes,
               std::vector<int> assignment);

// Longest-processing-time-first onto the least-loaded PE; cost ties take
// the lower job id, load ties the lower PE index.
Schedule greedy_lpt(const std::vector<ClauseJob>& jobs, int num_pes);

struct AnnealConfig {
  double t_initial = 0.0;  // 0 = start at (initial makespan) / 10
  double t_final = 1e-3;
  double cooling = 0.95;
  int iters_per_temp = 200;
  std::uint64_t seed = 0;

  void validate() const;
  // Reads the schedule.* keys; the seed stays whatever the caller sets.
  static AnnealConfig from(const Config& cfg);
};

// Simulated annealing over job assignments. Moves that do not raise the
// makespan are accepted outright (no randomness consumed); a move raising
// it by d survives with probability exp(-d / t). The reported schedule is
// the best ever seen under the lexicographic objective (makespan, then sum
// of squared loads, which orders like load variance at fixed totals), never
// merely the last accepted state.
//
// Stage 1 relocates one random job to a random other PE, starting from the
// greedy schedule. Stage 2 swaps two random jobs on different PEs, starting
// from a given schedule, and so never returns anything lexicographically
// worse than its input. Draw order per proposal is fixed: job pick(s),
// then the acceptance draw only when the makespan would grow.
Schedule sa_stage1(const std::vector<ClauseJob>& jobs, int num_pes,
                   const AnnealConfig& cfg);
Schedule sa_stage2(const Schedule& start, const std::vector<ClauseJob>& jobs,
                   const AnnealConfig& cfg);

// Both stages back to back with per-stage sub-seeds derived from cfg.seed.
Schedule anneal(const std::vector<ClauseJob>& jobs, int num_pes,
                const AnnealConfig& cfg);

// Text file: a "pes N" line, one "job_id pe_index cost" line per job in id
// order, then "makespan M" and "utilization U" (fixed, 4 decimals) footer
// lines. '#' lines and blank lines are ignored on read.
void write_schedule(std::ostream& os, const Schedule& s,
                    const std::vector<ClauseJob>& jobs);
void save_schedule(const std::string& path, const Schedule& s,
                   const std::vector<ClauseJob>& jobs);

struct LoadedSchedule {
  Schedule schedule;
  std::vector<ClauseJob> jobs;
};
LoadedSchedule read_schedule(std::istream& is);
LoadedSchedule load_schedule(const std::string& path);

}  // namespace tkws::sched
