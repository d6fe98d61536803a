// Copyright 2026 The gnsstopo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Maximum-weight matching on general graphs.
//
// The solver is the primal-dual blossom algorithm of Edmonds in the O(n^3)
// formulation of Galil, working on integer weights so that every dual update
// is exact. On top of it, `canonical_matching` returns the lexicographically
// smallest optimal matching (vertices in index order, each preferring its
// smallest feasible partner) so results are independent of edge order.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gnsstopo {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  std::int64_t weight = 0;
};

enum class MatchingMode {
  // Maximum weight among maximum-cardinality matchings. Equals the
  // maximum-weight perfect matching whenever one exists.
  perfect_preferred,
  // Plain maximum-weight matching; edges of non-positive weight are dropped.
  non_perfect,
};

namespace detail {

// Blossom solver state. Works on a fixed edge list; `mate()` after `solve()`
// holds the partner of each vertex or -1.
class BlossomSolver {
 public:
  BlossomSolver(int nvertex, std::vector<WeightedEdge> edges)
      : nvertex_(nvertex), edges_(std::move(edges)) {}

  void solve() {
    const int n = nvertex_;
    const int nedge = static_cast<int>(edges_.size());
    mate_.assign(n, -1);
    if (nedge == 0 || n == 0) return;

    std::int64_t maxweight = 0;
    for (const auto& e : edges_) maxweight = std::max(maxweight, e.weight);

    endpoint_.resize(2 * nedge);
    for (int p = 0; p < 2 * nedge; ++p) endpoint_[p] = p % 2 == 0 ? edges_[p / 2].u : edges_[p / 2].v;
    neighbend_.assign(n, {});
    for (int k = 0; k < nedge; ++k) {
      neighbend_[edges_[k].u].push_back(2 * k + 1);
      neighbend_[edges_[k].v].push_back(2 * k);
    }
    label_.assign(2 * n, 0);
    labelend_.assign(2 * n, -1);
    inblossom_.resize(n);
    std::iota(inblossom_.begin(), inblossom_.end(), 0);
    blossomparent_.assign(2 * n, -1);
    blossomchilds_.assign(2 * n, {});
    blossombase_.assign(2 * n, -1);
    for (int v = 0; v < n; ++v) blossombase_[v] = v;
    blossomendps_.assign(2 * n, {});
    bestedge_.assign(2 * n, -1);
    blossombestedges_.assign(2 * n, {});
    has_bestedges_.assign(2 * n, false);
    unusedblossoms_.clear();
    for (int b = n; b < 2 * n; ++b) unusedblossoms_.push_back(b);
    dualvar_.assign(2 * n, 0);
    for (int v = 0; v < n; ++v) dualvar_[v] = maxweight;
    allowedge_.assign(nedge, false);
    queue_.clear();

    for (int stage = 0; stage < n; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (int b = n; b < 2 * n; ++b) {
        blossombestedges_[b].clear();
        has_bestedges_[b] = false;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), false);
      queue_.clear();
      for (int v = 0; v < n; ++v)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          int v = queue_.back();
          queue_.pop_back();
          for (int p : neighbend_[v]) {
            int k = p / 2;
            int w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            std::int64_t kslack = 0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge_[k] = true;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              int b = inblossom_[v];
              if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        int deltatype = 1;
        std::int64_t delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n);
        int deltaedge = -1, deltablossom = -1;
        for (int v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
            std::int64_t d = slack(bestedge_[v]);
            if (d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        for (int b = 0; b < 2 * n; ++b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
            std::int64_t ks = slack(bestedge_[b]);
            assert(ks % 2 == 0);
            std::int64_t d = ks / 2;
            if (d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        }
        for (int b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
              dualvar_[b] < delta) {
            delta = dualvar_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        for (int v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 1) dualvar_[v] -= delta;
          else if (label_[inblossom_[v]] == 2) dualvar_[v] += delta;
        }
        for (int b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1) dualvar_[b] += delta;
            else if (label_[b] == 2) dualvar_[b] -= delta;
          }
        }
        if (deltatype == 1) {
          break;
        } else if (deltatype == 2) {
          allowedge_[deltaedge] = true;
          int i = edges_[deltaedge].u, j = edges_[deltaedge].v;
          if (label_[inblossom_[i]] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = true;
          queue_.push_back(edges_[deltaedge].u);
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;
      for (int b = n; b < 2 * n; ++b) {
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0)
          expand_blossom(b, true);
      }
    }
    for (int v = 0; v < n; ++v)
      if (mate_[v] >= 0) mate_[v] = endpoint_[mate_[v]];
    solved_ = true;
  }

  const std::vector<int>& mate() const { return mate_; }

  // Reduced cost of edge k (doubled) including the duals of every blossom
  // that contains both endpoints. Zero means the edge is tight.
  std::int64_t full_slack(int k) const {
    int i = edges_[k].u, j = edges_[k].v;
    std::int64_t s = dualvar_[i] + dualvar_[j] - 2 * edges_[k].weight;
    std::vector<int> bi{i}, bj{j};
    while (blossomparent_[bi.back()] != -1) bi.push_back(blossomparent_[bi.back()]);
    while (blossomparent_[bj.back()] != -1) bj.push_back(blossomparent_[bj.back()]);
    std::reverse(bi.begin(), bi.end());
    std::reverse(bj.begin(), bj.end());
    for (std::size_t a = 0; a < std::min(bi.size(), bj.size()); ++a) {
      if (bi[a] != bj[a]) break;
      s += 2 * dualvar_[bi[a]];
    }
    return s;
  }

  // Checks the optimality certificate: non-negative duals and reduced costs,
  // tight matched edges, zero dual on exposed vertices and full blossoms.
  bool verify_certificate() const {
    if (!solved_) return edges_.empty() || nvertex_ == 0;
    const int n = nvertex_;
    for (int v = 0; v < n; ++v)
      if (dualvar_[v] < 0) return false;
    for (int b = n; b < 2 * n; ++b)
      if (blossombase_[b] >= 0 && dualvar_[b] < 0) return false;
    for (int k = 0; k < static_cast<int>(edges_.size()); ++k) {
      std::int64_t s = full_slack(k);
      if (s < 0) return false;
      bool matched = mate_[edges_[k].u] == edges_[k].v && mate_[edges_[k].v] == edges_[k].u;
      if (matched && s != 0) return false;
    }
    for (int v = 0; v < n; ++v)
      if (mate_[v] < 0 && dualvar_[v] > 0) return false;
    for (int b = n; b < 2 * n; ++b) {
      if (blossombase_[b] >= 0 && dualvar_[b] > 0) {
        if (blossomendps_[b].size() % 2 != 1) return false;
        for (std::size_t a = 1; a < blossomendps_[b].size(); a += 2) {
          int p = blossomendps_[b][a];
          if (mate_[endpoint_[p]] != endpoint_[p ^ 1] || mate_[endpoint_[p ^ 1]] != endpoint_[p])
            return false;
        }
      }
    }
    return true;
  }

 private:
  std::int64_t slack(int k) const {
    return dualvar_[edges_[k].u] + dualvar_[edges_[k].v] - 2 * edges_[k].weight;
  }

  void blossom_leaves(int b, std::vector<int>& out) const {
    if (b < nvertex_) {
      out.push_back(b);
      return;
    }
    for (int t : blossomchilds_[b]) blossom_leaves(t, out);
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    blossom_leaves(b, out);
    return out;
  }

  void assign_label(int w, int t, int p) {
    int b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      blossom_leaves(b, queue_);
    } else if (t == 2) {
      int base = blossombase_[b];
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges_[k].u, w = edges_[k].v;
    int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    std::vector<int> path, endps;
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    blossomchilds_[b] = path;
    blossomendps_[b] = endps;
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0;
    for (int leaf : leaves(b)) {
      if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
      inblossom_[leaf] = b;
    }
    std::vector<int> bestedgeto(2 * nvertex_, -1);
    for (int child : path) {
      std::vector<std::vector<int>> nblists;
      if (!has_bestedges_[child]) {
        for (int leaf : leaves(child)) {
          std::vector<int> list;
          for (int p : neighbend_[leaf]) list.push_back(p / 2);
          nblists.push_back(std::move(list));
        }
      } else {
        nblists.push_back(blossombestedges_[child]);
      }
      for (const auto& nblist : nblists) {
        for (int kk : nblist) {
          int i = edges_[kk].u, j = edges_[kk].v;
          if (inblossom_[j] == b) std::swap(i, j);
          int bj = inblossom_[j];
          if (bj != b && label_[bj] == 1 &&
              (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
            bestedgeto[bj] = kk;
        }
      }
      blossombestedges_[child].clear();
      has_bestedges_[child] = false;
      bestedge_[child] = -1;
    }
    blossombestedges_[b].clear();
    for (int kk : bestedgeto)
      if (kk != -1) blossombestedges_[b].push_back(kk);
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (int kk : blossombestedges_[b])
      if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }

  void expand_blossom(int b, bool endstage) {
    for (int s : blossomchilds_[b]) {
      blossomparent_[s] = -1;
      if (s < nvertex_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for (int leaf : leaves(s)) inblossom_[leaf] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      const auto& childs = blossomchilds_[b];
      const auto& endps = blossomendps_[b];
      const int len = static_cast<int>(childs.size());
      int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
      int jstep, endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      auto at = [len](const std::vector<int>& vec, int idx) { return vec[((idx % len) + len) % len]; };
      int p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[at(endps, j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[at(endps, j - endptrick) / 2] = true;
        j += jstep;
        p = at(endps, j - endptrick) ^ endptrick;
        allowedge_[p / 2] = true;
        j += jstep;
      }
      int bv = at(childs, j);
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (at(childs, j) != entrychild) {
        bv = at(childs, j);
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        int found = -1;
        for (int leaf : leaves(bv)) {
          if (label_[leaf] != 0) {
            found = leaf;
            break;
          }
        }
        if (found != -1) {
          label_[found] = 0;
          label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
          assign_label(found, 2, labelend_[found]);
        }
        j += jstep;
      }
    }
    label_[b] = labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
  }

  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= nvertex_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const int len = static_cast<int>(childs.size());
    auto at = [len](const std::vector<int>& vec, int idx) { return vec[((idx % len) + len) % len]; };
    int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    int j = i;
    int jstep, endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = at(childs, j);
      int p = at(endps, j - endptrick) ^ endptrick;
      if (t >= nvertex_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = at(childs, j);
      if (t >= nvertex_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
  }

  void augment_matching(int k) {
    int v = edges_[k].u, w = edges_[k].v;
    for (auto [s, p] : {std::pair{v, 2 * k + 1}, std::pair{w, 2 * k}}) {
      while (true) {
        int bs = inblossom_[s];
        if (bs >= nvertex_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        int t = endpoint_[labelend_[bs]];
        int bt = inblossom_[t];
        s = endpoint_[labelend_[bt]];
        int j = endpoint_[labelend_[bt] ^ 1];
        if (bt >= nvertex_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  int nvertex_;
  std::vector<WeightedEdge> edges_;
  bool solved_ = false;
  std::vector<int> mate_, endpoint_, label_, labelend_, inblossom_, blossomparent_, blossombase_,
      bestedge_, unusedblossoms_, queue_;
  std::vector<std::vector<int>> neighbend_, blossomchilds_, blossomendps_, blossombestedges_;
  std::vector<bool> has_bestedges_, allowedge_;
  std::vector<std::int64_t> dualvar_;
};

// Offset that makes every extra matched edge worth more than any weight
// difference between matchings of equal size.
inline std::int64_t cardinality_offset(int nvertex, const std::vector<WeightedEdge>& edges) {
  std::int64_t maxabs = 0;
  for (const auto& e : edges) maxabs = std::max(maxabs, e.weight < 0 ? -e.weight : e.weight);
  return (static_cast<std::int64_t>(nvertex) + 1) * (maxabs + 1);
}

inline std::vector<WeightedEdge> transformed_edges(int nvertex, const std::vector<WeightedEdge>& edges,
                                                   MatchingMode mode) {
  std::vector<WeightedEdge> out;
  out.reserve(edges.size());
  const std::int64_t offset = mode == MatchingMode::perfect_preferred ? cardinality_offset(nvertex, edges) : 0;
  for (const auto& e : edges) {
    if (e.u == e.v) throw std::invalid_argument("matching graph contains a self loop");
    std::int64_t w = e.weight + offset;
    if (w > 0) out.push_back({e.u, e.v, w});
  }
  return out;
}

}  // namespace detail

// Result of a matching computation: partner per vertex (-1 when exposed).
struct MatchingResult {
  std::vector<int> mate;
  std::int64_t weight = 0;   // sum of original edge weights
  int cardinality = 0;

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < static_cast<int>(mate.size()); ++v)
      if (mate[v] > v) out.emplace_back(v, mate[v]);
    return out;
  }
};

namespace detail {

inline MatchingResult summarize(int nvertex, const std::vector<WeightedEdge>& edges, std::vector<int> mate) {
  MatchingResult r;
  r.mate = std::move(mate);
  r.mate.resize(nvertex, -1);
  for (const auto& e : edges) {
    if (r.mate[e.u] == e.v && r.mate[e.v] == e.u) {
      r.weight += e.weight;
      ++r.cardinality;
    }
  }
  return r;
}

// Best edge weight per unordered pair; parallel edges keep the heaviest.
inline std::vector<WeightedEdge> dedupe(const std::vector<WeightedEdge>& edges) {
  std::vector<WeightedEdge> sorted;
  sorted.reserve(edges.size());
  for (auto e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
    sorted.push_back(e);
  }
  std::sort(sorted.begin(), sorted.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.weight > b.weight;
  });
  std::vector<WeightedEdge> out;
  for (const auto& e : sorted)
    if (out.empty() || out.back().u != e.u || out.back().v != e.v) out.push_back(e);
  return out;
}

}  // namespace detail

// Some optimal matching (no tie-breaking guarantees).
inline MatchingResult maximum_weight_matching(int nvertex, const std::vector<WeightedEdge>& edges,
                                              MatchingMode mode = MatchingMode::perfect_preferred) {
  auto unique = detail::dedupe(edges);
  detail::BlossomSolver solver(nvertex, detail::transformed_edges(nvertex, unique, mode));
  solver.solve();
  return detail::summarize(nvertex, unique, solver.mate());
}

// Lexicographically smallest optimal matching: vertex 0 takes the smallest
// partner it can have in any optimal matching, then vertex 1, and so on;
// being matched beats staying exposed.
//
// Candidate partners are restricted to edges that are tight under the final
// dual solution, which every optimal matching must use exclusively.
inline MatchingResult canonical_matching(int nvertex, const std::vector<WeightedEdge>& edges,
                                         MatchingMode mode = MatchingMode::perfect_preferred) {
  auto unique = detail::dedupe(edges);
  auto work = detail::transformed_edges(nvertex, unique, mode);
  detail::BlossomSolver solver(nvertex, work);
  solver.solve();
  std::vector<int> cur = solver.mate();
  cur.resize(nvertex, -1);

  std::vector<std::vector<std::pair<int, std::int64_t>>> tight(nvertex);
  for (int k = 0; k < static_cast<int>(work.size()); ++k) {
    if (solver.full_slack(k) == 0) {
      tight[work[k].u].emplace_back(work[k].v, work[k].weight);
      tight[work[k].v].emplace_back(work[k].u, work[k].weight);
    }
  }
  for (auto& list : tight) std::sort(list.begin(), list.end());

  auto weight_of = [&](const std::vector<int>& mate, const std::vector<bool>& active) {
    std::int64_t s = 0;
    for (const auto& e : work)
      if (active[e.u] && active[e.v] && mate[e.u] == e.v) s += e.weight;
    return s;
  };

  std::vector<bool> active(nvertex, true);  // vertices not yet fixed
  for (int v = 0; v < nvertex; ++v) {
    if (!active[v]) continue;
    const int current = cur[v];
    const std::int64_t target = weight_of(cur, active);
    bool committed = false;
    for (auto [u, w] : tight[v]) {
      if (!active[u] || u == v) continue;
      if (current != -1 && u >= current) break;
      // Force edge (v,u) and re-optimise the rest of the unfixed graph.
      std::vector<WeightedEdge> rest;
      for (const auto& e : work)
        if (active[e.u] && active[e.v] && e.u != v && e.v != v && e.u != u && e.v != u) rest.push_back(e);
      detail::BlossomSolver sub(nvertex, rest);
      sub.solve();
      std::vector<int> trial = sub.mate();
      trial.resize(nvertex, -1);
      std::int64_t got = w;
      for (const auto& e : rest)
        if (trial[e.u] == e.v) got += e.weight;
      if (got == target) {
        for (int x = 0; x < nvertex; ++x)
          if (active[x] && x != v && x != u) cur[x] = trial[x];
        cur[v] = u;
        cur[u] = v;
        committed = true;
        break;
      }
    }
    active[v] = false;
    if (cur[v] != -1) active[cur[v]] = false;
    (void)committed;
  }
  return detail::summarize(nvertex, unique, cur);
}

// Converts real weights to integers on a fixed grid. Callers pick a scale
// under which the weights they care about are exact.
inline std::int64_t quantize_weight(double w, double scale) {
  double scaled = w * scale;
  if (!std::isfinite(scaled) || std::fabs(scaled) > 4.0e15)
    throw std::overflow_error("matching weight out of range after scaling");
  return static_cast<std::int64_t>(std::llround(scaled));
}

}  // namespace gnsstopo
