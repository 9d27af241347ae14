// matching.cc
//
// Edmonds' blossom algorithm for maximum-weight matching in general graphs,
// primal-dual variant as described in Galil's 1986 survey. The control flow
// follows van Rantwijk's well-tested reference implementation; vertex duals
// are stored pre-multiplied by two so integer weights stay integer all the
// way through, and the optimality certificate is re-checked after solving.
#include "tkws/matching.h"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <utility>

#include "tkws/error.h"

namespace tkws::ogbcsr {
namespace {

constexpr int kNone = -1;

struct VertexPair {
  int v = kNone;
  int w = kNone;
  bool none() const { return v == kNone; }
};

class Blossom {
 public:
  explicit Blossom(int n, std::vector<WeightedEdge> edges)
      : n_(n), edges_(std::move(edges)) {
    adj_.resize(static_cast<std::size_t>(n_));
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const WeightedEdge& e = edges_[k];
      adj_[static_cast<std::size_t>(e.u)].push_back({e.v, static_cast<int>(k)});
      adj_[static_cast<std::size_t>(e.v)].push_back({e.u, static_cast<int>(k)});
      max_weight_ = std::max(max_weight_, e.w);
    }
    const std::size_t cap = static_cast<std::size_t>(n_);
    label_.assign(cap, 0);
    labeledge_.assign(cap, VertexPair{});
    bestedge_.assign(cap, kNone);
    parent_.assign(cap, kNone);
    base_.assign(cap, kNone);
    dual_.assign(cap, 0);
    active_.assign(cap, false);
    childs_.resize(cap);
    bedges_.resize(cap);
    mybest_.resize(cap);
    have_mybest_.assign(cap, false);
    inblossom_.resize(static_cast<std::size_t>(n_));
    mate_.assign(static_cast<std::size_t>(n_), kNone);
    allowed_.assign(edges_.size(), false);
    for (int v = 0; v < n_; ++v) {
      inblossom_[static_cast<std::size_t>(v)] = v;
      base_[static_cast<std::size_t>(v)] = v;
      // dual_[v] holds 2*u(v); initially u(v) = max_weight / 2.
      dual_[static_cast<std::size_t>(v)] = max_weight_;
    }
  }

  std::vector<int> solve() {
    if (edges_.empty()) return mate_;
    while (run_stage()) {
    }
    verify_optimum();
    return mate_;
  }

 private:
  bool is_blossom(int b) const { return b >= n_; }

  std::int64_t slack(int k) const {
    const WeightedEdge& e = edges_[static_cast<std::size_t>(k)];
    return dual_[static_cast<std::size_t>(e.u)] +
           dual_[static_cast<std::size_t>(e.v)] - 2 * e.w;
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    std::vector<int> stack{b};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      if (is_blossom(t))
        stack.insert(stack.end(), childs_[static_cast<std::size_t>(t)].begin(),
                     childs_[static_cast<std::size_t>(t)].end());
      else
        out.push_back(t);
    }
    return out;
  }

  int alloc_blossom() {
    if (!free_.empty()) {
      const int b = free_.back();
      free_.pop_back();
      return b;
    }
    const int b = static_cast<int>(label_.size());
    label_.push_back(0);
    labeledge_.push_back(VertexPair{});
    bestedge_.push_back(kNone);
    parent_.push_back(kNone);
    base_.push_back(kNone);
    dual_.push_back(0);
    active_.push_back(false);
    childs_.emplace_back();
    bedges_.emplace_back();
    mybest_.emplace_back();
    have_mybest_.push_back(false);
    return b;
  }

  void assign_label(int w, int t, int v) {
    const int b = inblossom_[static_cast<std::size_t>(w)];
    assert(label_[static_cast<std::size_t>(w)] == 0 &&
           label_[static_cast<std::size_t>(b)] == 0);
    label_[static_cast<std::size_t>(w)] = label_[static_cast<std::size_t>(b)] =
        t;
    const VertexPair le =
        v == kNone ? VertexPair{} : VertexPair{v, w};
    labeledge_[static_cast<std::size_t>(w)] =
        labeledge_[static_cast<std::size_t>(b)] = le;
    bestedge_[static_cast<std::size_t>(w)] =
        bestedge_[static_cast<std::size_t>(b)] = kNone;
    if (t == 1) {
      // S-label: queue all vertices for scanning.
      if (is_blossom(b)) {
        const std::vector<int> lv = leaves(b);
        queue_.insert(queue_.end(), lv.begin(), lv.end());
      } else {
        queue_.push_back(b);
      }
    } else if (t == 2) {
      // T-label: the base's mate becomes S.
      const int bs = base_[static_cast<std::size_t>(b)];
      assert(mate_[static_cast<std::size_t>(bs)] != kNone);
      assign_label(mate_[static_cast<std::size_t>(bs)], 1, bs);
    }
  }

  // Traces back from v and w; returns the base of a new blossom, or kNone
  // if the paths reach different roots (an augmenting path exists).
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int found_base = kNone;
    while (v != kNone) {
      int b = inblossom_[static_cast<std::size_t>(v)];
      if (label_[static_cast<std::size_t>(b)] & 4) {
        found_base = base_[static_cast<std::size_t>(b)];
        break;
      }
      assert(label_[static_cast<std::size_t>(b)] == 1);
      path.push_back(b);
      label_[static_cast<std::size_t>(b)] = 5;
      if (labeledge_[static_cast<std::size_t>(b)].none()) {
        assert(mate_[static_cast<std::size_t>(
                   base_[static_cast<std::size_t>(b)])] == kNone);
        v = kNone;
      } else {
        assert(labeledge_[static_cast<std::size_t>(b)].v ==
               mate_[static_cast<std::size_t>(
                   base_[static_cast<std::size_t>(b)])]);
        v = labeledge_[static_cast<std::size_t>(b)].v;
        b = inblossom_[static_cast<std::size_t>(v)];
        assert(label_[static_cast<std::size_t>(b)] == 2);
        v = labeledge_[static_cast<std::size_t>(b)].v;
      }
      if (w != kNone) std::swap(v, w);
    }
    for (int b : path) label_[static_cast<std::size_t>(b)] = 1;
    return found_base;
  }

  void add_blossom(int bse, int v, int w) {
    const int bb0 = inblossom_[static_cast<std::size_t>(bse)];
    int bv = inblossom_[static_cast<std::size_t>(v)];
    int bw = inblossom_[static_cast<std::size_t>(w)];
    const int b = alloc_blossom();
    active_[static_cast<std::size_t>(b)] = true;
    base_[static_cast<std::size_t>(b)] = bse;
    parent_[static_cast<std::size_t>(b)] = kNone;
    parent_[static_cast<std::size_t>(bb0)] = b;
    auto& path = childs_[static_cast<std::size_t>(b)];
    auto& edgs = bedges_[static_cast<std::size_t>(b)];
    path.clear();
    edgs.clear();
    edgs.push_back(VertexPair{v, w});
    while (bv != bb0) {
      parent_[static_cast<std::size_t>(bv)] = b;
      path.push_back(bv);
      edgs.push_back(labeledge_[static_cast<std::size_t>(bv)]);
      v = labeledge_[static_cast<std::size_t>(bv)].v;
      bv = inblossom_[static_cast<std::size_t>(v)];
    }
    path.push_back(bb0);
    std::reverse(path.begin(), path.end());
    std::reverse(edgs.begin(), edgs.end());
    while (bw != bb0) {
      parent_[static_cast<std::size_t>(bw)] = b;
      path.push_back(bw);
      edgs.push_back(VertexPair{labeledge_[static_cast<std::size_t>(bw)].w,
                                labeledge_[static_cast<std::size_t>(bw)].v});
      w = labeledge_[static_cast<std::size_t>(bw)].v;
      bw = inblossom_[static_cast<std::size_t>(w)];
    }
    assert(label_[static_cast<std::size_t>(bb0)] == 1);
    label_[static_cast<std::size_t>(b)] = 1;
    labeledge_[static_cast<std::size_t>(b)] =
        labeledge_[static_cast<std::size_t>(bb0)];
    dual_[static_cast<std::size_t>(b)] = 0;
    for (int lv : leaves(b)) {
      if (label_[static_cast<std::size_t>(
              inblossom_[static_cast<std::size_t>(lv)])] == 2)
        queue_.push_back(lv);
      inblossom_[static_cast<std::size_t>(lv)] = b;
    }
    // Least-slack edges to each neighboring S-blossom (ordered map keeps
    // the result independent of hash order, so runs are reproducible).
    std::map<int, int> bestedgeto;
    for (int child : path) {
      std::vector<int> nblist;
      if (is_blossom(child)) {
        if (have_mybest_[static_cast<std::size_t>(child)]) {
          nblist = std::move(mybest_[static_cast<std::size_t>(child)]);
          mybest_[static_cast<std::size_t>(child)].clear();
          have_mybest_[static_cast<std::size_t>(child)] = false;
        } else {
          for (int lv : leaves(child))
            for (const auto& [nb, k] : adj_[static_cast<std::size_t>(lv)])
              nblist.push_back(k);
        }
      } else {
        for (const auto& [nb, k] : adj_[static_cast<std::size_t>(child)])
          nblist.push_back(k);
      }
      for (int k : nblist) {
        int i = edges_[static_cast<std::size_t>(k)].u;
        int j = edges_[static_cast<std::size_t>(k)].v;
        if (inblossom_[static_cast<std::size_t>(j)] == b) std::swap(i, j);
        const int bj = inblossom_[static_cast<std::size_t>(j)];
        if (bj != b && label_[static_cast<std::size_t>(bj)] == 1) {
          auto it = bestedgeto.find(bj);
          if (it == bestedgeto.end() || slack(k) < slack(it->second))
            bestedgeto[bj] = k;
        }
      }
      bestedge_[static_cast<std::size_t>(child)] = kNone;
    }
    auto& mb = mybest_[static_cast<std::size_t>(b)];
    mb.clear();
    for (const auto& [bj, k] : bestedgeto) mb.push_back(k);
    have_mybest_[static_cast<std::size_t>(b)] = true;
    int best = kNone;
    for (int k : mb)
      if (best == kNone || slack(k) < slack(best)) best = k;
    bestedge_[static_cast<std::size_t>(b)] = best;
  }

  int wrap(int idx, int len) const { return ((idx % len) + len) % len; }

  void allow_pair(int p, int q) {
    // (p, q) always names a real edge here: it came from a label edge or a
    // blossom's connecting-edge list.
    for (const auto& [nb, k] : adj_[static_cast<std::size_t>(p)]) {
      if (nb == q) {
        allowed_[static_cast<std::size_t>(k)] = true;
        return;
      }
    }
    assert(false && "allow_pair on a non-edge");
  }

  void expand_blossom(int b, bool endstage) {
    for (int s : childs_[static_cast<std::size_t>(b)]) {
      parent_[static_cast<std::size_t>(s)] = kNone;
      if (!is_blossom(s)) {
        inblossom_[static_cast<std::size_t>(s)] = s;
      } else if (endstage && dual_[static_cast<std::size_t>(s)] == 0) {
        expand_blossom(s, true);
      } else {
        for (int lv : leaves(s)) inblossom_[static_cast<std::size_t>(lv)] = s;
      }
    }
    if (!endstage && label_[static_cast<std::size_t>(b)] == 2) {
      const auto& path = childs_[static_cast<std::size_t>(b)];
      const auto& edgs = bedges_[static_cast<std::size_t>(b)];
      const int len = static_cast<int>(path.size());
      const int entrychild = inblossom_[static_cast<std::size_t>(
          labeledge_[static_cast<std::size_t>(b)].w)];
      int j = static_cast<int>(
          std::find(path.begin(), path.end(), entrychild) - path.begin());
      int jstep;
      if (j & 1) {
        j -= len;
        jstep = 1;
      } else {
        jstep = -1;
      }
      int v = labeledge_[static_cast<std::size_t>(b)].v;
      int w = labeledge_[static_cast<std::size_t>(b)].w;
      while (j != 0) {
        int p, q;
        if (jstep == 1) {
          const VertexPair e = edgs[static_cast<std::size_t>(wrap(j, len))];
          p = e.v;
          q = e.w;
        } else {
          const VertexPair e =
              edgs[static_cast<std::size_t>(wrap(j - 1, len))];
          p = e.w;
          q = e.v;
        }
        label_[static_cast<std::size_t>(w)] = 0;
        label_[static_cast<std::size_t>(q)] = 0;
        assign_label(w, 2, v);
        allow_pair(p, q);
        j += jstep;
        if (jstep == 1) {
          const VertexPair e = edgs[static_cast<std::size_t>(wrap(j, len))];
          v = e.v;
          w = e.w;
        } else {
          const VertexPair e =
              edgs[static_cast<std::size_t>(wrap(j - 1, len))];
          w = e.v;
          v = e.w;
        }
        allow_pair(v, w);
        j += jstep;
      }
      const int bw = path[static_cast<std::size_t>(wrap(j, len))];
      label_[static_cast<std::size_t>(w)] =
          label_[static_cast<std::size_t>(bw)] = 2;
      labeledge_[static_cast<std::size_t>(w)] =
          labeledge_[static_cast<std::size_t>(bw)] = VertexPair{v, w};
      bestedge_[static_cast<std::size_t>(bw)] = kNone;
      j += jstep;
      while (path[static_cast<std::size_t>(wrap(j, len))] != entrychild) {
        const int bv = path[static_cast<std::size_t>(wrap(j, len))];
        if (label_[static_cast<std::size_t>(bv)] == 1) {
          j += jstep;
          continue;
        }
        int lv = kNone;
        if (is_blossom(bv)) {
          for (int u : leaves(bv)) {
            if (label_[static_cast<std::size_t>(u)] != 0) {
              lv = u;
              break;
            }
          }
        } else {
          lv = bv;
        }
        if (lv != kNone && label_[static_cast<std::size_t>(lv)] != 0) {
          assert(label_[static_cast<std::size_t>(lv)] == 2);
          assert(inblossom_[static_cast<std::size_t>(lv)] == bv);
          label_[static_cast<std::size_t>(lv)] = 0;
          label_[static_cast<std::size_t>(mate_[static_cast<std::size_t>(
              base_[static_cast<std::size_t>(bv)])])] = 0;
          assign_label(lv, 2,
                       labeledge_[static_cast<std::size_t>(lv)].v);
        }
        j += jstep;
      }
    }
    label_[static_cast<std::size_t>(b)] = 0;
    labeledge_[static_cast<std::size_t>(b)] = VertexPair{};
    bestedge_[static_cast<std::size_t>(b)] = kNone;
    parent_[static_cast<std::size_t>(b)] = kNone;
    base_[static_cast<std::size_t>(b)] = kNone;
    dual_[static_cast<std::size_t>(b)] = 0;
    active_[static_cast<std::size_t>(b)] = false;
    childs_[static_cast<std::size_t>(b)].clear();
    bedges_[static_cast<std::size_t>(b)].clear();
    mybest_[static_cast<std::size_t>(b)].clear();
    have_mybest_[static_cast<std::size_t>(b)] = false;
    free_.push_back(b);
  }

  void augment_blossom(int b, int v) {
    int t = v;
    while (parent_[static_cast<std::size_t>(t)] != b)
      t = parent_[static_cast<std::size_t>(t)];
    if (is_blossom(t)) augment_blossom(t, v);
    auto& path = childs_[static_cast<std::size_t>(b)];
    auto& edgs = bedges_[static_cast<std::size_t>(b)];
    const int len = static_cast<int>(path.size());
    const int i = static_cast<int>(
        std::find(path.begin(), path.end(), t) - path.begin());
    int j = i;
    int jstep;
    if (i & 1) {
      j -= len;
      jstep = 1;
    } else {
      jstep = -1;
    }
    while (j != 0) {
      j += jstep;
      int tt = path[static_cast<std::size_t>(wrap(j, len))];
      int w, x;
      if (jstep == 1) {
        const VertexPair e = edgs[static_cast<std::size_t>(wrap(j, len))];
        w = e.v;
        x = e.w;
      } else {
        const VertexPair e = edgs[static_cast<std::size_t>(wrap(j - 1, len))];
        x = e.v;
        w = e.w;
      }
      if (is_blossom(tt)) augment_blossom(tt, w);
      j += jstep;
      tt = path[static_cast<std::size_t>(wrap(j, len))];
      if (is_blossom(tt)) augment_blossom(tt, x);
      mate_[static_cast<std::size_t>(w)] = x;
      mate_[static_cast<std::size_t>(x)] = w;
    }
    std::rotate(path.begin(), path.begin() + i, path.end());
    std::rotate(edgs.begin(), edgs.begin() + i, edgs.end());
    base_[static_cast<std::size_t>(b)] =
        base_[static_cast<std::size_t>(path[0])];
    assert(base_[static_cast<std::size_t>(b)] == v);
  }

  void augment_matching(int v, int w) {
    const std::pair<int, int> sides[2] = {{v, w}, {w, v}};
    for (auto [s, j] : sides) {
      while (true) {
        const int bs = inblossom_[static_cast<std::size_t>(s)];
        assert(label_[static_cast<std::size_t>(bs)] == 1);
        if (is_blossom(bs)) augment_blossom(bs, s);
        mate_[static_cast<std::size_t>(s)] = j;
        if (labeledge_[static_cast<std::size_t>(bs)].none()) break;
        const int t = labeledge_[static_cast<std::size_t>(bs)].v;
        const int bt = inblossom_[static_cast<std::size_t>(t)];
        assert(label_[static_cast<std::size_t>(bt)] == 2);
        const VertexPair le = labeledge_[static_cast<std::size_t>(bt)];
        s = le.v;
        j = le.w;
        assert(base_[static_cast<std::size_t>(bt)] == t);
        if (is_blossom(bt)) augment_blossom(bt, j);
        mate_[static_cast<std::size_t>(j)] = s;
      }
    }
  }

  // One stage: grow alternating trees until an augmenting path is found or
  // the duals prove optimality. Returns false when no augmentation exists.
  bool run_stage() {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(labeledge_.begin(), labeledge_.end(), VertexPair{});
    std::fill(bestedge_.begin(), bestedge_.end(), kNone);
    for (std::size_t b = static_cast<std::size_t>(n_); b < label_.size(); ++b) {
      mybest_[b].clear();
      have_mybest_[b] = false;
    }
    std::fill(allowed_.begin(), allowed_.end(), false);
    queue_.clear();
    for (int v = 0; v < n_; ++v)
      if (mate_[static_cast<std::size_t>(v)] == kNone &&
          label_[static_cast<std::size_t>(
              inblossom_[static_cast<std::size_t>(v)])] == 0)
        assign_label(v, 1, kNone);

    bool augmented = false;
    while (true) {
      while (!queue_.empty() && !augmented) {
        const int v = queue_.back();
        queue_.pop_back();
        assert(label_[static_cast<std::size_t>(
                   inblossom_[static_cast<std::size_t>(v)])] == 1);
        for (const auto& [w, k] : adj_[static_cast<std::size_t>(v)]) {
          const int bv = inblossom_[static_cast<std::size_t>(v)];
          const int bw = inblossom_[static_cast<std::size_t>(w)];
          if (bv == bw) continue;
          std::int64_t kslack = 0;
          if (!allowed_[static_cast<std::size_t>(k)]) {
            kslack = slack(k);
            if (kslack <= 0) allowed_[static_cast<std::size_t>(k)] = true;
          }
          if (allowed_[static_cast<std::size_t>(k)]) {
            if (label_[static_cast<std::size_t>(bw)] == 0) {
              assign_label(w, 2, v);
            } else if (label_[static_cast<std::size_t>(bw)] == 1) {
              const int bse = scan_blossom(v, w);
              if (bse != kNone) {
                add_blossom(bse, v, w);
              } else {
                augment_matching(v, w);
                augmented = true;
                break;
              }
            } else if (label_[static_cast<std::size_t>(w)] == 0) {
              assert(label_[static_cast<std::size_t>(bw)] == 2);
              label_[static_cast<std::size_t>(w)] = 2;
              labeledge_[static_cast<std::size_t>(w)] = VertexPair{v, w};
            }
          } else if (label_[static_cast<std::size_t>(bw)] == 1) {
            if (bestedge_[static_cast<std::size_t>(bv)] == kNone ||
                kslack < slack(bestedge_[static_cast<std::size_t>(bv)]))
              bestedge_[static_cast<std::size_t>(bv)] = k;
          } else if (label_[static_cast<std::size_t>(w)] == 0) {
            if (bestedge_[static_cast<std::size_t>(w)] == kNone ||
                kslack < slack(bestedge_[static_cast<std::size_t>(w)]))
              bestedge_[static_cast<std::size_t>(w)] = k;
          }
        }
      }
      if (augmented) break;

      // Duals are stuck; find the smallest useful adjustment.
      int deltatype = 1;
      std::int64_t delta = 0;
      int deltaedge = kNone;
      int deltablossom = kNone;
      for (int v = 0; v < n_; ++v)
        delta = v == 0 ? dual_[0]
                       : std::min(delta, dual_[static_cast<std::size_t>(v)]);
      delta = std::max<std::int64_t>(delta, 0);
      for (int v = 0; v < n_; ++v) {
        if (label_[static_cast<std::size_t>(
                inblossom_[static_cast<std::size_t>(v)])] == 0 &&
            bestedge_[static_cast<std::size_t>(v)] != kNone) {
          const std::int64_t d =
              slack(bestedge_[static_cast<std::size_t>(v)]);
          if (d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge_[static_cast<std::size_t>(v)];
          }
        }
      }
      for (std::size_t e = 0; e < label_.size(); ++e) {
        const int ent = static_cast<int>(e);
        if (is_blossom(ent) && !active_[e]) continue;
        if (parent_[e] == kNone && label_[e] == 1 && bestedge_[e] != kNone) {
          const std::int64_t ks = slack(bestedge_[e]);
          assert(ks % 2 == 0);
          const std::int64_t d = ks / 2;
          if (d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge_[e];
          }
        }
      }
      for (std::size_t e = static_cast<std::size_t>(n_); e < label_.size();
           ++e) {
        if (active_[e] && parent_[e] == kNone && label_[e] == 2 &&
            dual_[e] < delta) {
          delta = dual_[e];
          deltatype = 4;
          deltablossom = static_cast<int>(e);
        }
      }

      for (int v = 0; v < n_; ++v) {
        const int lb = label_[static_cast<std::size_t>(
            inblossom_[static_cast<std::size_t>(v)])];
        if (lb == 1)
          dual_[static_cast<std::size_t>(v)] -= delta;
        else if (lb == 2)
          dual_[static_cast<std::size_t>(v)] += delta;
      }
      for (std::size_t e = static_cast<std::size_t>(n_); e < label_.size();
           ++e) {
        if (!active_[e] || parent_[e] != kNone) continue;
        if (label_[e] == 1)
          dual_[e] += delta;
        else if (label_[e] == 2)
          dual_[e] -= delta;
      }

      if (deltatype == 1) break;  // optimum reached
      if (deltatype == 2 || deltatype == 3) {
        allowed_[static_cast<std::size_t>(deltaedge)] = true;
        const WeightedEdge& de = edges_[static_cast<std::size_t>(deltaedge)];
        // Resume scanning from an S endpoint of the now-allowable edge.
        const int su =
            label_[static_cast<std::size_t>(
                inblossom_[static_cast<std::size_t>(de.u)])] == 1
                ? de.u
                : de.v;
        assert(label_[static_cast<std::size_t>(
                   inblossom_[static_cast<std::size_t>(su)])] == 1);
        queue_.push_back(su);
      } else {
        assert(deltatype == 4);
        expand_blossom(deltablossom, false);
      }
    }

    for (int v = 0; v < n_; ++v)
      assert(mate_[static_cast<std::size_t>(v)] == kNone ||
             mate_[static_cast<std::size_t>(
                 mate_[static_cast<std::size_t>(v)])] == v);
    if (!augmented) return false;

    for (std::size_t e = static_cast<std::size_t>(n_); e < label_.size();
         ++e) {
      if (active_[e] && parent_[e] == kNone && label_[e] == 1 &&
          dual_[e] == 0)
        expand_blossom(static_cast<int>(e), true);
    }
    return true;
  }

  // Primal-dual certificate: every edge has non-negative slack (counting
  // blossom duals), matched edges have zero slack, single vertices have
  // zero dual, and blossoms with positive dual are full. Throws on
  // violation; this makes a wrong answer loud instead of silently
  // suboptimal.
  void verify_optimum() const {
    for (int v = 0; v < n_; ++v) {
      if (dual_[static_cast<std::size_t>(v)] < 0)
        throw Error("matching certificate: negative vertex dual");
      if (mate_[static_cast<std::size_t>(v)] == kNone &&
          dual_[static_cast<std::size_t>(v)] != 0)
        throw Error("matching certificate: single vertex with nonzero dual");
    }
    for (std::size_t e = static_cast<std::size_t>(n_); e < label_.size();
         ++e) {
      if (active_[e] && dual_[e] < 0)
        throw Error("matching certificate: negative blossom dual");
    }
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const WeightedEdge& edge = edges_[k];
      std::int64_t s = slack(static_cast<int>(k));
      // Sum duals of blossoms containing both endpoints.
      std::vector<int> ib{edge.u}, jb{edge.v};
      while (parent_[static_cast<std::size_t>(ib.back())] != kNone)
        ib.push_back(parent_[static_cast<std::size_t>(ib.back())]);
      while (parent_[static_cast<std::size_t>(jb.back())] != kNone)
        jb.push_back(parent_[static_cast<std::size_t>(jb.back())]);
      std::reverse(ib.begin(), ib.end());
      std::reverse(jb.begin(), jb.end());
      for (std::size_t i = 0; i < std::min(ib.size(), jb.size()); ++i) {
        if (ib[i] != jb[i]) break;
        s += 2 * dual_[static_cast<std::size_t>(ib[i])];
      }
      if (s < 0) throw Error("matching certificate: negative edge slack");
      if ((mate_[static_cast<std::size_t>(edge.u)] == edge.v) && s != 0)
        throw Error("matching certificate: matched edge with nonzero slack");
    }
    for (std::size_t e = static_cast<std::size_t>(n_); e < label_.size();
         ++e) {
      if (!active_[e] || dual_[e] <= 0) continue;
      const auto& edgs = bedges_[e];
      if (edgs.size() % 2 != 1)
        throw Error("matching certificate: even blossom with positive dual");
      for (std::size_t i = 1; i < edgs.size(); i += 2) {
        if (mate_[static_cast<std::size_t>(edgs[i].v)] != edgs[i].w)
          throw Error("matching certificate: positive-dual blossom not full");
      }
    }
  }

  int n_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::int64_t max_weight_ = 0;

  std::vector<int> label_;
  std::vector<VertexPair> labeledge_;
  std::vector<int> bestedge_;
  std::vector<int> parent_;
  std::vector<int> base_;
  std::vector<std::int64_t> dual_;
  std::vector<bool> active_;
  std::vector<std::vector<int>> childs_;
  std::vector<std::vector<VertexPair>> bedges_;
  std::vector<std::vector<int>> mybest_;
  std::vector<bool> have_mybest_;
  std::vector<int> free_;

  std::vector<int> inblossom_;
  std::vector<int> mate_;
  std::vector<bool> allowed_;
  std::vector<int> queue_;
};

// Drops self-loops and keeps only the heaviest of parallel edges, so every
// solver sees the same graph.
std::vector<WeightedEdge> canonical_edges(int n,
                                          const std::vector<WeightedEdge>& in) {
  std::map<std::pair<int, int>, std::int64_t> best;
  for (const WeightedEdge& e : in) {
    if (e.u == e.v) continue;
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw Error(cat("matching edge (", e.u, ", ", e.v,
                      ") out of range for ", n, " vertices"));
    const auto key = std::minmax(e.u, e.v);
    auto it = best.find(key);
    if (it == best.end() || e.w > it->second) best[key] = e.w;
  }
  std::vector<WeightedEdge> out;
  out.reserve(best.size());
  for (const auto& [key, w] : best) out.push_back({key.first, key.second, w});
  return out;
}

}  // namespace

std::vector<int> max_weight_matching(int n,
                                     const std::vector<WeightedEdge>& edges) {
  return Blossom(n, canonical_edges(n, edges)).solve();
}

std::vector<int> greedy_matching(int n,
                                 const std::vector<WeightedEdge>& edges) {
  std::vector<WeightedEdge> es = canonical_edges(n, edges);
  std::sort(es.begin(), es.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              if (a.w != b.w) return a.w > b.w;
              if (a.u != b.u) return a.u < b.u;
              return a.v < b.v;
            });
  std::vector<int> mate(static_cast<std::size_t>(n), -1);
  for (const WeightedEdge& e : es) {
    if (e.w <= 0) break;
    if (mate[static_cast<std::size_t>(e.u)] == -1 &&
        mate[static_cast<std::size_t>(e.v)] == -1) {
      mate[static_cast<std::size_t>(e.u)] = e.v;
      mate[static_cast<std::size_t>(e.v)] = e.u;
    }
  }
  return mate;
}

std::int64_t matching_weight(const std::vector<int>& mate,
                             const std::vector<WeightedEdge>& edges) {
  const std::vector<WeightedEdge> es =
      canonical_edges(static_cast<int>(mate.size()), edges);
  std::int64_t total = 0;
  for (const WeightedEdge& e : es)
    if (mate[static_cast<std::size_t>(e.u)] == e.v) total += e.w;
  return total;
}

std::vector<int> brute_force_matching(int n,
                                      const std::vector<WeightedEdge>& edges) {
  const std::vector<WeightedEdge> es = canonical_edges(n, edges);
  constexpr std::int64_t kAbsent = std::numeric_limits<std::int64_t>::min();
  std::vector<std::int64_t> wm(static_cast<std::size_t>(n) *
                                   static_cast<std::size_t>(n),
                               kAbsent);
  auto wat = [&](int a, int b) -> std::int64_t& {
    return wm[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
              static_cast<std::size_t>(b)];
  };
  for (const WeightedEdge& e : es) wat(e.u, e.v) = wat(e.v, e.u) = e.w;
  std::vector<int> mate(static_cast<std::size_t>(n), -1);
  std::vector<int> best_mate = mate;
  std::int64_t best = 0;
  // Recurse over the lowest free vertex: leave it single or match it to any
  // free later vertex. Every matching is visited exactly once.
  auto rec = [&](auto&& self, int v, std::int64_t acc) -> void {
    while (v < n && mate[static_cast<std::size_t>(v)] != -1) ++v;
    if (v >= n) {
      if (acc > best) {
        best = acc;
        best_mate = mate;
      }
      return;
    }
    self(self, v + 1, acc);
    for (int w = v + 1; w < n; ++w) {
      if (mate[static_cast<std::size_t>(w)] == -1 && wat(v, w) != kAbsent) {
        mate[static_cast<std::size_t>(v)] = w;
        mate[static_cast<std::size_t>(w)] = v;
        self(self, v + 1, acc + wat(v, w));
        mate[static_cast<std::size_t>(v)] = -1;
        mate[static_cast<std::size_t>(w)] = -1;
      }
    }
  };
  rec(rec, 0, 0);
  return best_mate;
}

}  // namespace tkws::ogbcsr
