#include "dilab/urelations.hpp"

#include <stdexcept>

namespace dilab {

namespace {

std::optional<PermRelation> detect_permutation(int m, int n, const CMat& u) {
  const int mn = m * n;
  std::vector<int> table(mn, -1);
  for (int r = 0; r < mn; ++r) {
    int hit = -1;
    for (int c = 0; c < mn; ++c) {
      const Scalar v = u(r, c);
      if (v == Scalar(0.0, 0.0)) continue;
      if (v == Scalar(1.0, 0.0) && hit == -1) {
        hit = c;
      } else {
        return std::nullopt;
      }
    }
    if (hit == -1) return std::nullopt;
    table[r] = hit;
  }
  return PermRelation(m, n, table);
}

}  // namespace

UnitaryRelation::UnitaryRelation() : UnitaryRelation(1, 1, CMat::Identity(1, 1)) {}

UnitaryRelation::UnitaryRelation(int m, int n, CMat u, double tau_unitary)
    : m_(m), n_(n), u_(std::move(u)) {
  if (m_ <= 0 || n_ <= 0) throw std::invalid_argument("UnitaryRelation: sizes must be positive");
  const int mn = m_ * n_;
  if (u_.rows() != mn || u_.cols() != mn)
    throw std::invalid_argument("UnitaryRelation: u must be mn x mn");
  if (!u_.allFinite()) throw std::invalid_argument("UnitaryRelation: u has non-finite entries");
  const CMat id = CMat::Identity(mn, mn);
  const double res = std::max((u_.adjoint() * u_ - id).norm(), (u_ * u_.adjoint() - id).norm());
  if (res > tau_unitary)
    throw std::invalid_argument("UnitaryRelation: u is not unitary within tolerance");
  perm_ = detect_permutation(m_, n_, u_);
}

UnitaryRelation from_perm(const PermRelation& rel) {
  const int mn = rel.m() * rel.n();
  CMat u = CMat::Zero(mn, mn);
  for (int i = 0; i < rel.m(); ++i)
    for (int j = 0; j < rel.n(); ++j) {
      auto [ip, jp] = rel.theta(i, j);
      u(rel.pair_index(i, j), rel.pair_index(ip, jp)) = 1.0;
    }
  return UnitaryRelation(rel.m(), rel.n(), std::move(u));
}

CVec ef_to_fe(const UnitaryRelation& rel, const CVec& c) {
  const int m = rel.m(), n = rel.n();
  if (c.size() != m * n) throw std::invalid_argument("ef_to_fe: coefficient shape mismatch");
  const CVec t = rel.u().transpose() * c;  // over (i',j')
  CVec out(m * n);
  for (int ip = 0; ip < m; ++ip)
    for (int jp = 0; jp < n; ++jp) out[jp * m + ip] = t[ip * n + jp];
  return out;
}

CVec fe_to_ef(const UnitaryRelation& rel, const CVec& c) {
  const int m = rel.m(), n = rel.n();
  if (c.size() != m * n) throw std::invalid_argument("fe_to_ef: coefficient shape mismatch");
  CVec t(m * n);  // reorder (l,k) -> (k,l)
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < m; ++k) t[k * n + l] = c[l * m + k];
  return rel.u().conjugate() * t;
}

std::size_t pattern_size(const UnitaryRelation& rel, const Pattern& p) {
  std::size_t s = 1;
  for (bool is_e : p) s *= static_cast<std::size_t>(is_e ? rel.m() : rel.n());
  return s;
}

TensorCoeffs indicator(const UnitaryRelation& rel, const std::vector<Gen>& letters) {
  TensorCoeffs tc;
  tc.pattern = pattern_of(letters);
  tc.data = CVec::Zero(static_cast<Eigen::Index>(pattern_size(rel, tc.pattern)));
  std::size_t idx = 0;
  for (const Gen& g : letters) {
    const int extent = g.is_e ? rel.m() : rel.n();
    if (g.index < 0 || g.index >= extent)
      throw std::out_of_range("indicator: generator index out of range");
    idx = idx * static_cast<std::size_t>(extent) + static_cast<std::size_t>(g.index);
  }
  tc.data[static_cast<Eigen::Index>(idx)] = 1.0;
  return tc;
}

namespace {

// Combined move matrices acting on the flattened adjacent pair.
// ef_move[(j'*m+i'), (i*n+j)]: (E,F) -> (F,E).
// fe_move[(i*n+j), (l*m+k)]: (F,E) -> (E,F).
CMat ef_move_matrix(const UnitaryRelation& rel) {
  const int m = rel.m(), n = rel.n();
  CMat M(m * n, m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int ip = 0; ip < m; ++ip)
        for (int jp = 0; jp < n; ++jp)
          M(jp * m + ip, i * n + j) = rel.u()(i * n + j, ip * n + jp);
  return M;
}

CMat fe_move_matrix(const UnitaryRelation& rel) {
  const int m = rel.m(), n = rel.n();
  CMat M(m * n, m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l)
          M(i * n + j, l * m + k) = std::conj(rel.u()(i * n + j, k * n + l));
  return M;
}

// Applies the pair map M at positions (t, t+1), swapping the two extents.
void apply_adjacent_move(const UnitaryRelation& rel, TensorCoeffs& tc, std::size_t t,
                         const CMat& M) {
  const std::size_t r = tc.pattern.size();
  std::vector<std::size_t> extent(r);
  for (std::size_t s = 0; s < r; ++s)
    extent[s] = static_cast<std::size_t>(tc.pattern[s] ? rel.m() : rel.n());
  std::size_t inner = 1;
  for (std::size_t s = t + 2; s < r; ++s) inner *= extent[s];
  const std::size_t block = extent[t] * extent[t + 1];
  const std::size_t total = static_cast<std::size_t>(tc.data.size());
  const std::size_t outer = total / (block * inner);

  CVec out(tc.data.size());
  CVec in_block(static_cast<Eigen::Index>(block));
  for (std::size_t hi = 0; hi < outer; ++hi)
    for (std::size_t lo = 0; lo < inner; ++lo) {
      const std::size_t base = hi * block * inner + lo;
      for (std::size_t b = 0; b < block; ++b)
        in_block[static_cast<Eigen::Index>(b)] = tc.data[static_cast<Eigen::Index>(base + b * inner)];
      const CVec out_block = M * in_block;
      for (std::size_t b = 0; b < block; ++b)
        out[static_cast<Eigen::Index>(base + b * inner)] = out_block[static_cast<Eigen::Index>(b)];
    }
  std::swap(tc.pattern[t], tc.pattern[t + 1]);
  tc.data = std::move(out);
}

}  // namespace

TensorCoeffs pattern_transform(const UnitaryRelation& rel, const TensorCoeffs& src,
                               const Pattern& dst_pattern) {
  if (src.pattern.size() != dst_pattern.size() ||
      count_e(src.pattern) != count_e(dst_pattern))
    throw std::invalid_argument("pattern_transform: patterns have different letter counts");
  if (static_cast<std::size_t>(src.data.size()) != pattern_size(rel, src.pattern))
    throw std::invalid_argument("pattern_transform: data size mismatch");

  const CMat Mef = ef_move_matrix(rel);
  const CMat Mfe = fe_move_matrix(rel);

  TensorCoeffs cur = src;
  for (std::size_t p = 0; p < dst_pattern.size(); ++p) {
    if (cur.pattern[p] == dst_pattern[p]) continue;
    // Bring the nearest letter of the wanted kind leftward to position p.
    std::size_t q = p + 1;
    while (q < cur.pattern.size() && cur.pattern[q] != dst_pattern[p]) ++q;
    if (q == cur.pattern.size())
      throw std::logic_error("pattern_transform: no matching letter found");
    for (std::size_t t = q; t-- > p;) {
      if (cur.pattern[t] && !cur.pattern[t + 1])
        apply_adjacent_move(rel, cur, t, Mef);
      else
        apply_adjacent_move(rel, cur, t, Mfe);
    }
  }
  return cur;
}

std::vector<WordTerm> expand_to_normal(const UnitaryRelation& rel,
                                       const std::vector<Gen>& letters) {
  if (rel.is_permutation()) {
    NormalWord w = normalize(*rel.perm(), letters);
    return {WordTerm{std::move(w), Scalar(1.0, 0.0)}};
  }
  int k = 0;
  for (const Gen& g : letters) k += g.is_e ? 1 : 0;
  const int l = static_cast<int>(letters.size()) - k;
  Pattern dst;
  for (int t = 0; t < k; ++t) dst.push_back(true);
  for (int t = 0; t < l; ++t) dst.push_back(false);

  TensorCoeffs tc = pattern_transform(rel, indicator(rel, letters), dst);
  std::vector<WordTerm> out;
  const int m = rel.m(), n = rel.n();
  for (Eigen::Index idx = 0; idx < tc.data.size(); ++idx) {
    const Scalar c = tc.data[idx];
    if (std::abs(c) < 1e-14) continue;
    NormalWord w;
    std::size_t rest = static_cast<std::size_t>(idx);
    std::size_t fsz = 1;
    for (int t = 0; t < l; ++t) fsz *= static_cast<std::size_t>(n);
    std::size_t eidx = rest / fsz, fidx = rest % fsz;
    w.e.resize(k);
    for (int t = k - 1; t >= 0; --t) {
      w.e[t] = static_cast<int>(eidx % m);
      eidx /= m;
    }
    w.f.resize(l);
    for (int t = l - 1; t >= 0; --t) {
      w.f[t] = static_cast<int>(fidx % n);
      fidx /= n;
    }
    out.push_back(WordTerm{std::move(w), c});
  }
  return out;
}

std::vector<WordTerm> append_normalized(const UnitaryRelation& rel, const NormalWord& w,
                                        const std::vector<Gen>& suffix) {
  std::vector<Gen> letters = letters_of(w);
  letters.insert(letters.end(), suffix.begin(), suffix.end());
  return expand_to_normal(rel, letters);
}

}  // namespace dilab
