#include "dilab/semigroup.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace dilab {

PermRelation::PermRelation(int m, int n, std::vector<int> table)
    : m_(m), n_(n), fwd_(std::move(table)) {
  if (m_ <= 0 || n_ <= 0) throw std::invalid_argument("PermRelation: sizes must be positive");
  const int mn = m_ * n_;
  if (static_cast<int>(fwd_.size()) != mn)
    throw std::invalid_argument("PermRelation: table size mismatch");
  inv_.assign(mn, -1);
  for (int p = 0; p < mn; ++p) {
    const int q = fwd_[p];
    if (q < 0 || q >= mn) throw std::invalid_argument("PermRelation: table entry out of range");
    if (inv_[q] != -1) throw std::invalid_argument("PermRelation: table is not a bijection");
    inv_[q] = p;
  }
}

std::pair<int, int> PermRelation::theta(int i, int j) const {
  if (i < 0 || i >= m_ || j < 0 || j >= n_)
    throw std::out_of_range("PermRelation::theta: index out of range");
  return pair_of(fwd_[pair_index(i, j)]);
}

std::pair<int, int> PermRelation::theta_inv(int ip, int jp) const {
  if (ip < 0 || ip >= m_ || jp < 0 || jp >= n_)
    throw std::out_of_range("PermRelation::theta_inv: index out of range");
  return pair_of(inv_[pair_index(ip, jp)]);
}

std::pair<int, int> commute_ef(const PermRelation& rel, int i, int j) {
  auto [ip, jp] = rel.theta(i, j);
  return {jp, ip};
}

NormalWord normalize(const PermRelation& rel, const std::vector<Gen>& letters) {
  std::vector<Gen> w = letters;
  for (const Gen& g : w) {
    const int bound = g.is_e ? rel.m() : rel.n();
    if (g.index < 0 || g.index >= bound)
      throw std::out_of_range("normalize: generator index out of range");
  }
  // Bubble every e leftward past the f's: rewrite adjacent (f_l, e_k) as
  // (e_i, f_j) with theta(i, j) = (k, l), scanning until no pair remains.
  std::size_t t = 0;
  while (t + 1 < w.size()) {
    if (!w[t].is_e && w[t + 1].is_e) {
      auto [i, j] = rel.theta_inv(w[t + 1].index, w[t].index);
      w[t] = Gen{true, i};
      w[t + 1] = Gen{false, j};
      if (t > 0) --t;
    } else {
      ++t;
    }
  }
  NormalWord out;
  for (const Gen& g : w) (g.is_e ? out.e : out.f).push_back(g.index);
  return out;
}

std::vector<Gen> factor(const PermRelation& rel, const NormalWord& w, const Pattern& p) {
  if (count_e(p) != w.edeg() || count_f(p) != w.fdeg())
    throw std::invalid_argument("factor: pattern does not match the degree");
  std::vector<Gen> rest = letters_of(w);
  std::vector<Gen> out;
  out.reserve(p.size());
  for (bool want_e : p) {
    if (want_e) {
      // rest is in normal form, so its first letter is an e.
      out.push_back(rest.front());
      rest.erase(rest.begin());
    } else {
      // Pull the leading f to the front: walk it left past the e-prefix
      // with e_i f_j = f_{j'} e_{i'}.
      std::size_t pos = 0;
      while (pos < rest.size() && rest[pos].is_e) ++pos;
      if (pos == rest.size()) throw std::logic_error("factor: no f left to extract");
      while (pos > 0) {
        auto [jp, ip] = commute_ef(rel, rest[pos - 1].index, rest[pos].index);
        rest[pos] = Gen{true, ip};
        rest[pos - 1] = Gen{false, jp};
        --pos;
      }
      out.push_back(rest.front());
      rest.erase(rest.begin());
    }
  }
  return out;
}

NormalWord multiply(const PermRelation& rel, const NormalWord& a, const NormalWord& b) {
  std::vector<Gen> letters = letters_of(a);
  const std::vector<Gen> tail = letters_of(b);
  letters.insert(letters.end(), tail.begin(), tail.end());
  return normalize(rel, letters);
}

bool divide_right_block(const PermRelation& rel, const NormalWord& g, int i, int j,
                        NormalWord* quotient) {
  if (g.edeg() < 1 || g.fdeg() < 1) return false;
  // Factor with pattern E^{k-1} F^{l-1} E F; the trailing two letters are
  // determined, so g is divisible exactly when they equal (e_i, f_j).
  Pattern p;
  for (int t = 0; t < g.edeg() - 1; ++t) p.push_back(true);
  for (int t = 0; t < g.fdeg() - 1; ++t) p.push_back(false);
  p.push_back(true);
  p.push_back(false);
  std::vector<Gen> seq = factor(rel, g, p);
  const Gen laste = seq[seq.size() - 2];
  const Gen lastf = seq[seq.size() - 1];
  if (laste.index != i || lastf.index != j) return false;
  if (quotient) {
    NormalWord q;
    for (std::size_t t = 0; t + 2 < seq.size(); ++t)
      (seq[t].is_e ? q.e : q.f).push_back(seq[t].index);
    *quotient = q;
  }
  return true;
}

std::vector<NormalWord> words_of_degree(int m, int n, int k, int l) {
  std::vector<std::vector<int>> eparts{{}}, fparts{{}};
  for (int t = 0; t < k; ++t) {
    std::vector<std::vector<int>> next;
    for (const auto& w : eparts)
      for (int i = 0; i < m; ++i) {
        auto v = w;
        v.push_back(i);
        next.push_back(std::move(v));
      }
    eparts = std::move(next);
  }
  for (int t = 0; t < l; ++t) {
    std::vector<std::vector<int>> next;
    for (const auto& w : fparts)
      for (int j = 0; j < n; ++j) {
        auto v = w;
        v.push_back(j);
        next.push_back(std::move(v));
      }
    fparts = std::move(next);
  }
  std::vector<NormalWord> out;
  out.reserve(eparts.size() * fparts.size());
  for (const auto& u : eparts)
    for (const auto& v : fparts) out.push_back(NormalWord{u, v});
  return out;
}

namespace {

std::vector<std::vector<int>> all_permutations(int size) {
  std::vector<int> base(size);
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

// Relabeled table: theta' = (a x b) theta (a x b)^{-1}.
std::vector<int> relabel(const std::vector<int>& table, int m, int n,
                         const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(table.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const int src = i * n + j;
      const int dst = table[src];
      const int di = dst / n, dj = dst % n;
      out[a[i] * n + b[j]] = a[di] * n + b[dj];
    }
  return out;
}

// Family exchange (m == n): theta~ = s theta^{-1} s with s(i,j) = (j,i).
std::vector<int> family_swap(const std::vector<int>& table, int n) {
  std::vector<int> inv(table.size());
  for (std::size_t p = 0; p < table.size(); ++p) inv[table[p]] = static_cast<int>(p);
  std::vector<int> out(table.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int q = inv[j * n + i];
      const int qi = q / n, qj = q % n;
      out[i * n + j] = qj * n + qi;
    }
  return out;
}

std::vector<std::vector<int>> orbit_of(const std::vector<int>& table, int m, int n) {
  std::set<std::vector<int>> seen;
  const auto perms_m = all_permutations(m);
  const auto perms_n = all_permutations(n);
  for (const auto& a : perms_m)
    for (const auto& b : perms_n) {
      auto t = relabel(table, m, n, a, b);
      if (m == n) seen.insert(family_swap(t, n));
      seen.insert(std::move(t));
    }
  return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<int> canonical_table(const PermRelation& rel) {
  auto orbit = orbit_of(rel.table(), rel.m(), rel.n());
  return *std::min_element(orbit.begin(), orbit.end());
}

bool is_isomorphic(const PermRelation& a, const PermRelation& b) {
  if (a.m() != b.m() || a.n() != b.n()) return false;
  return canonical_table(a) == canonical_table(b);
}

ClassifyResult classify(int m, int n, std::size_t max_permutations) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("classify: sizes must be positive");
  const int mn = m * n;
  std::size_t total = 1;
  for (int t = 2; t <= mn; ++t) {
    total *= static_cast<std::size_t>(t);
    if (total > max_permutations)
      throw std::invalid_argument("classify: (mn)! exceeds the permutation limit");
  }

  ClassifyResult res;
  res.m = m;
  res.n = n;
  res.permutation_count = total;

  std::vector<int> perm(mn);
  std::iota(perm.begin(), perm.end(), 0);
  std::map<std::vector<int>, std::vector<std::vector<int>>> by_canon;
  do {
    auto orbit = orbit_of(perm, m, n);
    by_canon[orbit.front()].push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (auto& [canon, members] : by_canon) {
    std::sort(members.begin(), members.end());
    res.classes.push_back(std::move(members));
  }
  return res;
}

PermRelation flip_relation() {
  // e_i f_j = f_i e_j: theta(i,j) = (j,i).
  return PermRelation(2, 2, {0, 2, 1, 3});
}

PermRelation forward_cycle_relation() {
  // (1,1) -> (1,2) -> (2,1) -> (1,1), (2,2) fixed.
  return PermRelation(2, 2, {1, 2, 0, 3});
}

PermRelation reverse_cycle_relation() {
  // (1,1) -> (2,1) -> (1,2) -> (1,1), (2,2) fixed.
  return PermRelation(2, 2, {2, 0, 1, 3});
}

PermRelation identity_relation(int m, int n) {
  std::vector<int> t(static_cast<std::size_t>(m) * n);
  std::iota(t.begin(), t.end(), 0);
  return PermRelation(m, n, std::move(t));
}

}  // namespace dilab
