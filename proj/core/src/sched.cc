// src/sched.cc
#include "tkws/sched.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tkws/binio.h"
#include "tkws/error.h"
#include "tkws/rng.h"

namespace tkws::sched {
namespace {

std::uint64_t total_cost(const std::vector<ClauseJob>& jobs) {
  std::uint64_t total = 0;
  for (const ClauseJob& j : jobs) total += j.cost;
  return total;
}

double utilization_of(std::uint64_t total, int num_pes, std::uint64_t mk) {
  if (mk == 0) return 1.0;
  return static_cast<double>(total) /
         (static_cast<double>(num_pes) * static_cast<double>(mk));
}

// Mutable annealing state. Loads and the squared-load sum are maintained
// incrementally; the makespan is rescanned after each move, which is cheap
// because PE counts are small.
struct SaState {
  std::vector<int> assign;
  std::vector<std::uint64_t> loads;
  std::uint64_t mk = 0;
  unsigned __int128 sumsq = 0;

  explicit SaState(const Schedule& s)
      : assign(s.assignment), loads(s.per_pe_cost), mk(s.makespan) {
    for (std::uint64_t l : loads)
      sumsq += static_cast<unsigned __int128>(l) * l;
  }

  std::uint64_t rescan_mk() const {
    std::uint64_t m = 0;
    for (std::uint64_t l : loads) m = std::max(m, l);
    return m;
  }
};

bool lex_better(std::uint64_t mk_a, unsigned __int128 ss_a, std::uint64_t mk_b,
                unsigned __int128 ss_b) {
  return mk_a < mk_b || (mk_a == mk_b && ss_a < ss_b);
}

// Shared annealing loop; `propose` mutates the state or leaves it alone and
// reports whether anything changed. Acceptance is decided inside propose so
// each move kind can revert cheaply.
template <typename Propose>
Schedule anneal_loop(const Schedule& start, const std::vector<ClauseJob>& jobs,
                     const AnnealConfig& cfg, Propose&& propose) {
  cfg.validate();
  SaState st(start);
  std::vector<int> best = st.assign;
  std::uint64_t best_mk = st.mk;
  unsigned __int128 best_ss = st.sumsq;

  Rng rng(cfg.seed);
  double t = cfg.t_initial > 0 ? cfg.t_initial
                               : static_cast<double>(start.makespan) / 10.0;
  while (t > cfg.t_final) {
    for (int i = 0; i < cfg.iters_per_temp; ++i) {
      if (!propose(st, rng, t)) continue;
      if (lex_better(st.mk, st.sumsq, best_mk, best_ss)) {
        best = st.assign;
        best_mk = st.mk;
        best_ss = st.sumsq;
      }
    }
    t *= cfg.cooling;
  }
  return place(jobs, start.num_pes, std::move(best));
}

// Accept rule shared by both stages: a move that does not raise the makespan
// is kept without consuming randomness; one that raises it by d survives
// with probability exp(-d / t).
bool accept_move(std::uint64_t old_mk, std::uint64_t new_mk, double t,
                 Rng& rng) {
  if (new_mk <= old_mk) return true;
  const double d = static_cast<double>(new_mk - old_mk);
  return rng.unit() < std::exp(-d / t);
}

}  // namespace

std::vector<ClauseJob> jobs_from(const ogbcsr::OGBCSRModel& compressed,
                                 int windows) {
  if (windows < 1) throw Error(cat("window count must be >= 1, got ", windows));
  std::vector<ClauseJob> jobs(compressed.groups.size());
  for (std::size_t g = 0; g < compressed.groups.size(); ++g) {
    jobs[g].group = static_cast<std::uint32_t>(g);
    jobs[g].cost = static_cast<std::uint64_t>(
                       compressed.groups[g].shared_blocks.size()) *
                   static_cast<std::uint64_t>(windows);
  }
  return jobs;
}

Schedule place(const std::vector<ClauseJob>& jobs, int num_pes,
               std::vector<int> assignment) {
  if (num_pes < 1) throw Error(cat("PE count must be >= 1, got ", num_pes));
  if (assignment.size() != jobs.size())
    throw Error(cat("assignment covers ", assignment.size(), " jobs, want ",
                    jobs.size()));
  Schedule s;
  s.num_pes = num_pes;
  s.per_pe_cost.assign(static_cast<std::size_t>(num_pes), 0);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const int pe = assignment[j];
    if (pe < 0 || pe >= num_pes)
      throw Error(cat("job ", j, " assigned to PE ", pe, ", have ", num_pes));
    s.per_pe_cost[static_cast<std::size_t>(pe)] += jobs[j].cost;
  }
  s.assignment = std::move(assignment);
  for (std::uint64_t l : s.per_pe_cost) s.makespan = std::max(s.makespan, l);
  s.utilization = utilization_of(total_cost(jobs), num_pes, s.makespan);
  return s;
}

Schedule greedy_lpt(const std::vector<ClauseJob>& jobs, int num_pes) {
  if (num_pes < 1) throw Error(cat("PE count must be >= 1, got ", num_pes));
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&jobs](std::size_t a, std::size_t b) {
                     return jobs[a].cost > jobs[b].cost;
                   });
  std::vector<std::uint64_t> loads(static_cast<std::size_t>(num_pes), 0);
  std::vector<int> assignment(jobs.size(), 0);
  for (std::size_t j : order) {
    std::size_t pick = 0;
    for (std::size_t p = 1; p < loads.size(); ++p)
      if (loads[p] < loads[pick]) pick = p;
    assignment[j] = static_cast<int>(pick);
    loads[pick] += jobs[j].cost;
  }
  return place(jobs, num_pes, std::move(assignment));
}

void AnnealConfig::validate() const {
  if (!(t_final > 0))
    throw Error(cat("t_final must be positive, got ", t_final));
  if (t_initial < 0)
    throw Error(cat("t_initial must be >= 0, got ", t_initial));
  if (t_initial > 0 && t_initial <= t_final)
    throw Error(cat("t_initial ", t_initial, " must exceed t_final ", t_final));
  if (!(cooling > 0) || !(cooling < 1))
    throw Error(cat("cooling must lie in (0,1), got ", cooling));
  if (iters_per_temp < 1)
    throw Error(cat("iters_per_temp must be >= 1, got ", iters_per_temp));
}

AnnealConfig AnnealConfig::from(const Config& cfg) {
  AnnealConfig a;
  a.t_initial = cfg.get_double("schedule.t_initial");
  a.t_final = cfg.get_double("schedule.t_final");
  a.cooling = cfg.get_double("schedule.cooling");
  a.iters_per_temp = static_cast<int>(cfg.get_int("schedule.iters_per_temp"));
  a.validate();
  return a;
}

Schedule sa_stage1(const std::vector<ClauseJob>& jobs, int num_pes,
                   const AnnealConfig& cfg) {
  Schedule start = greedy_lpt(jobs, num_pes);
  if (jobs.empty() || num_pes < 2) {
    cfg.validate();
    return start;
  }
  const int n = static_cast<int>(jobs.size());
  auto propose = [&jobs, n, num_pes](SaState& st, Rng& rng, double t) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const int from = st.assign[static_cast<std::size_t>(j)];
    int to = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_pes) - 1));
    if (to >= from) ++to;
    const std::uint64_t c = jobs[static_cast<std::size_t>(j)].cost;
    const std::uint64_t old_from = st.loads[static_cast<std::size_t>(from)];
    const std::uint64_t old_to = st.loads[static_cast<std::size_t>(to)];
    st.loads[static_cast<std::size_t>(from)] = old_from - c;
    st.loads[static_cast<std::size_t>(to)] = old_to + c;
    const std::uint64_t new_mk = st.rescan_mk();
    if (!accept_move(st.mk, new_mk, t, rng)) {
      st.loads[static_cast<std::size_t>(from)] = old_from;
      st.loads[static_cast<std::size_t>(to)] = old_to;
      return false;
    }
    st.sumsq -= static_cast<unsigned __int128>(old_from) * old_from;
    st.sumsq += static_cast<unsigned __int128>(old_from - c) * (old_from - c);
    st.sumsq -= static_cast<unsigned __int128>(old_to) * old_to;
    st.sumsq += static_cast<unsigned __int128>(old_to + c) * (old_to + c);
    st.assign[static_cast<std::size_t>(j)] = to;
    st.mk = new_mk;
    return true;
  };
  return anneal_loop(start, jobs, cfg, propose);
}

Schedule sa_stage2(const Schedule& start, const std::vector<ClauseJob>& jobs,
                   const AnnealConfig& cfg) {
  if (start.assignment.size() != jobs.size())
    throw Error(cat("schedule covers ", start.assignment.size(),
                    " jobs, want ", jobs.size()));
  if (jobs.size() < 2 || start.num_pes < 2) {
    cfg.validate();
    return start;
  }
  const int n = static_cast<int>(jobs.size());
  auto propose = [&jobs, n](SaState& st, Rng& rng, double t) {
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) - 1));
    if (b >= a) ++b;
    const int pa = st.assign[static_cast<std::size_t>(a)];
    const int pb = st.assign[static_cast<std::size_t>(b)];
    if (pa == pb) return false;
    const std::uint64_t ca = jobs[static_cast<std::size_t>(a)].cost;
    const std::uint64_t cb = jobs[static_cast<std::size_t>(b)].cost;
    const std::uint64_t old_a = st.loads[static_cast<std::size_t>(pa)];
    const std::uint64_t old_b = st.loads[static_cast<std::size_t>(pb)];
    st.loads[static_cast<std::size_t>(pa)] = old_a - ca + cb;
    st.loads[static_cast<std::size_t>(pb)] = old_b - cb + ca;
    const std::uint64_t new_mk = st.rescan_mk();
    if (!accept_move(st.mk, new_mk, t, rng)) {
      st.loads[static_cast<std::size_t>(pa)] = old_a;
      st.loads[static_cast<std::size_t>(pb)] = old_b;
      return false;
    }
    st.sumsq -= static_cast<unsigned __int128>(old_a) * old_a;
    st.sumsq -= static_cast<unsigned __int128>(old_b) * old_b;
    const std::uint64_t new_a = old_a - ca + cb;
    const std::uint64_t new_b = old_b - cb + ca;
    st.sumsq += static_cast<unsigned __int128>(new_a) * new_a;
    st.sumsq += static_cast<unsigned __int128>(new_b) * new_b;
    std::swap(st.assign[static_cast<std::size_t>(a)],
              st.assign[static_cast<std::size_t>(b)]);
    st.mk = new_mk;
    return true;
  };
  return anneal_loop(start, jobs, cfg, propose);
}

Schedule anneal(const std::vector<ClauseJob>& jobs, int num_pes,
                const AnnealConfig& cfg) {
  AnnealConfig c1 = cfg;
  c1.seed = Rng::mix(cfg.seed, 1);
  Schedule s1 = sa_stage1(jobs, num_pes, c1);
  AnnealConfig c2 = cfg;
  c2.seed = Rng::mix(cfg.seed, 2);
  return sa_stage2(s1, jobs, c2);
}

void write_schedule(std::ostream& os, const Schedule& s,
                    const std::vector<ClauseJob>& jobs) {
  if (s.assignment.size() != jobs.size())
    throw Error(cat("schedule covers ", s.assignment.size(), " jobs, want ",
                    jobs.size()));
  os << "pes " << s.num_pes << "\n";
  for (std::size_t j = 0; j < jobs.size(); ++j)
    os << j << ' ' << s.assignment[j] << ' ' << jobs[j].cost << "\n";
  os << "makespan " << s.makespan << "\n";
  os << "utilization " << std::fixed << std::setprecision(4) << s.utilization
     << "\n";
}

void save_schedule(const std::string& path, const Schedule& s,
                   const std::vector<ClauseJob>& jobs) {
  std::ofstream os = open_output(path, std::ios::out);
  write_schedule(os, s, jobs);
  if (!os) throw IoError(cat("write failed: ", path));
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ls(line);
  std::vector<std::string> toks;
  std::string t;
  while (ls >> t) toks.push_back(t);
  return toks;
}

std::uint64_t parse_u64(const std::string& tok, int line_no,
                        const char* what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok[0] == '-')
    throw FormatError(
        cat("schedule line ", line_no, ": bad ", what, " \"", tok, "\""));
  return v;
}

}  // namespace

LoadedSchedule read_schedule(std::istream& is) {
  int num_pes = -1;
  bool saw_makespan = false;
  bool saw_util = false;
  std::uint64_t makespan = 0;
  double utilization = 0.0;
  std::vector<std::pair<std::uint64_t, std::pair<int, std::uint64_t>>> rows;

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::vector<std::string> toks = tokens_of(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "pes") {
      if (toks.size() != 2 || num_pes >= 0)
        throw FormatError(cat("schedule line ", line_no, ": bad pes line"));
      const std::uint64_t v = parse_u64(toks[1], line_no, "PE count");
      if (v == 0 || v > (1u << 20))
        throw FormatError(cat("schedule line ", line_no,
                              ": PE count out of range: ", v));
      num_pes = static_cast<int>(v);
    } else if (toks[0] == "makespan") {
      if (toks.size() != 2 || saw_makespan)
        throw FormatError(
            cat("schedule line ", line_no, ": bad makespan line"));
      makespan = parse_u64(toks[1], line_no, "makespan");
      saw_makespan = true;
    } else if (toks[0] == "utilization") {
      if (toks.size() != 2 || saw_util)
        throw FormatError(
            cat("schedule line ", line_no, ": bad utilization line"));
      try {
        std::size_t used = 0;
        utilization = std::stod(toks[1], &used);
        if (used != toks[1].size()) throw std::invalid_argument(toks[1]);
      } catch (const std::exception&) {
        throw FormatError(cat("schedule line ", line_no,
                              ": bad utilization \"", toks[1], "\""));
      }
      saw_util = true;
    } else {
      if (toks.size() != 3)
        throw FormatError(cat("schedule line ", line_no,
                              ": want \"job pe cost\", got ", toks.size(),
                              " fields"));
      const std::uint64_t id = parse_u64(toks[0], line_no, "job id");
      const std::uint64_t pe = parse_u64(toks[1], line_no, "PE index");
      const std::uint64_t cost = parse_u64(toks[2], line_no, "cost");
      rows.push_back({id, {static_cast<int>(pe), cost}});
    }
  }
  if (num_pes < 0) throw FormatError("schedule file missing pes line");
  if (!saw_makespan) throw FormatError("schedule file missing makespan line");
  if (!saw_util) throw FormatError("schedule file missing utilization line");

  std::vector<ClauseJob> jobs(rows.size());
  std::vector<int> assignment(rows.size(), -1);
  for (const auto& [id, rest] : rows) {
    if (id >= rows.size())
      throw FormatError(cat("schedule job id ", id, " out of range for ",
                            rows.size(), " jobs"));
    if (assignment[static_cast<std::size_t>(id)] != -1)
      throw FormatError(cat("schedule job id ", id, " repeats"));
    const auto& [pe, cost] = rest;
    if (pe >= num_pes)
      throw FormatError(
          cat("schedule job ", id, " on PE ", pe, ", have ", num_pes));
    assignment[static_cast<std::size_t>(id)] = pe;
    jobs[static_cast<std::size_t>(id)].group = static_cast<std::uint32_t>(id);
    jobs[static_cast<std::size_t>(id)].cost = cost;
  }

  LoadedSchedule out;
  out.schedule = place(jobs, num_pes, std::move(assignment));
  out.jobs = std::move(jobs);
  if (out.schedule.makespan != makespan)
    throw FormatError(cat("schedule footer makespan ", makespan,
                          " does not match recomputed ",
                          out.schedule.makespan));
  if (std::abs(out.schedule.utilization - utilization) > 5e-5 + 1e-12)
    throw FormatError(cat("schedule footer utilization ", utilization,
                          " does not match recomputed ",
                          out.schedule.utilization));
  return out;
}

LoadedSchedule load_schedule(const std::string& path) {
  std::ifstream is = open_input(path, std::ios::in);
  return read_schedule(is);
}

}  // namespace tkws::sched
