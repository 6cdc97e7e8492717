#include "dilab/fock.hpp"

#include <algorithm>
#include <stdexcept>

#include "dilab/numkernel.hpp"

namespace dilab {

TruncFock::TruncFock(UnitaryRelation rel, int K, int L, std::size_t basis_limit, int max_len)
    : rel_(std::move(rel)), K_(K), L_(L), max_len_(max_len < 0 ? K + L : max_len) {
  if (K_ < 0 || L_ < 0) throw std::invalid_argument("TruncFock: cutoffs must be nonnegative");

  const int m = rel_.m(), n = rel_.n();
  std::size_t count = 0;
  for (int k = 0; k <= K_; ++k) {
    std::size_t ek = 1;
    for (int t = 0; t < k; ++t) ek *= static_cast<std::size_t>(m);
    for (int l = 0; l <= L_; ++l) {
      if (k + l > max_len_) continue;
      std::size_t fl = 1;
      for (int t = 0; t < l; ++t) fl *= static_cast<std::size_t>(n);
      count += ek * fl;
      if (count > basis_limit) throw std::invalid_argument("TruncFock: basis size limit exceeded");
    }
  }

  basis_.reserve(count);
  for (int t = 0; t <= std::min(K_ + L_, max_len_); ++t)
    for (int k = std::max(0, t - L_); k <= std::min(t, K_); ++k) {
      for (NormalWord& w : words_of_degree(m, n, k, t - k)) basis_.push_back(std::move(w));
    }
  index_.reserve(basis_.size());
  for (std::size_t idx = 0; idx < basis_.size(); ++idx)
    index_.emplace(basis_[idx], static_cast<Eigen::Index>(idx));

  const Eigen::Index d = dim();
  cre_e_.assign(m, SpMat(d, d));
  cre_f_.assign(n, SpMat(d, d));

  std::vector<std::vector<Triplet>> te(m), tf(n);
  for (std::size_t col = 0; col < basis_.size(); ++col) {
    const NormalWord& w = basis_[col];
    // e_i prepends and stays normal.
    if (w.edeg() + 1 <= K_ && w.length() + 1 <= max_len_) {
      for (int i = 0; i < m; ++i) {
        NormalWord tgt = w;
        tgt.e.insert(tgt.e.begin(), i);
        te[i].emplace_back(index_.at(tgt), static_cast<Eigen::Index>(col), Scalar(1.0, 0.0));
      }
    }
    // f_j enters from the left and is rewritten to e-first form.
    if (w.fdeg() + 1 <= L_ && w.length() + 1 <= max_len_) {
      for (int j = 0; j < n; ++j) {
        std::vector<Gen> letters;
        letters.reserve(w.length() + 1);
        letters.push_back(Gen{false, j});
        for (const Gen& g : letters_of(w)) letters.push_back(g);
        for (const WordTerm& t : expand_to_normal(rel_, letters))
          tf[j].emplace_back(index_.at(t.word), static_cast<Eigen::Index>(col), t.coeff);
      }
    }
  }
  for (int i = 0; i < m; ++i) cre_e_[i].setFromTriplets(te[i].begin(), te[i].end());
  for (int j = 0; j < n; ++j) cre_f_[j].setFromTriplets(tf[j].begin(), tf[j].end());
}

Eigen::Index TruncFock::index_of(const NormalWord& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? -1 : it->second;
}

SpMat TruncFock::lambda(const NormalWord& w) const {
  SpMat out = sparse_identity(dim());
  // Apply letters right to left.
  for (auto it = w.f.rbegin(); it != w.f.rend(); ++it) out = SpMat(creation_f(*it) * out);
  for (auto it = w.e.rbegin(); it != w.e.rend(); ++it) out = SpMat(creation_e(*it) * out);
  return out;
}

std::vector<bool> TruncFock::interior_mask(int r) const {
  std::vector<bool> mask(basis_.size());
  for (std::size_t idx = 0; idx < basis_.size(); ++idx) {
    const NormalWord& w = basis_[idx];
    mask[idx] = w.edeg() + r <= K_ && w.fdeg() + r <= L_ && w.length() + 2 * r <= max_len_;
  }
  return mask;
}

TruncFock build_fock(const UnitaryRelation& rel, int K, int L, std::size_t basis_limit,
                     int max_len) {
  return TruncFock(rel, K, L, basis_limit, max_len);
}

void MatPoly::validate() const {
  if (terms.empty()) return;
  const Eigen::Index p = terms.front().first.rows(), q = terms.front().first.cols();
  for (const auto& [c, w] : terms) {
    if (c.rows() != p || c.cols() != q)
      throw std::invalid_argument("MatPoly: coefficient shapes differ");
    if (!c.allFinite()) throw std::invalid_argument("MatPoly: non-finite coefficient");
  }
  for (std::size_t a = 0; a < terms.size(); ++a)
    for (std::size_t b = a + 1; b < terms.size(); ++b)
      if (terms[a].second == terms[b].second)
        throw std::invalid_argument("MatPoly: duplicate word");
}

MatPoly scalar_poly(const std::vector<std::pair<Scalar, NormalWord>>& terms) {
  MatPoly p;
  for (const auto& [c, w] : terms) {
    CMat block(1, 1);
    block(0, 0) = c;
    p.terms.emplace_back(std::move(block), w);
  }
  p.validate();
  return p;
}

SpMat apply_poly(const TruncFock& fk, const MatPoly& x) {
  x.validate();
  for (const auto& [c, w] : x.terms)
    if (w.edeg() > fk.K() || w.fdeg() > fk.L() || w.length() > fk.max_len())
      throw std::invalid_argument("apply_poly: word exceeds the cutoff");
  const Eigen::Index N = fk.dim();
  const Eigen::Index p = x.coeff_rows(), q = x.coeff_cols();
  SpMat out(p * N, q * N);
  for (const auto& [c, w] : x.terms) out += kron_sparse(c, fk.lambda(w));
  return out;
}

std::vector<double> norm_lower_seq(const UnitaryRelation& rel, const MatPoly& x, int max_cutoff,
                                   std::size_t basis_limit) {
  if (max_cutoff < 1) throw std::invalid_argument("norm_lower_seq: max_cutoff must be >= 1");
  x.validate();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_cutoff));
  for (int c = 1; c <= max_cutoff; ++c) {
    const TruncFock fk = build_fock(rel, c, c, basis_limit);
    out.push_back(opnorm(apply_poly(fk, x)));
  }
  return out;
}

std::pair<SpMat, SpMat> boundary_projections(const TruncFock& fk) {
  const Eigen::Index d = fk.dim();
  SpMat P = sparse_identity(d), Q = sparse_identity(d);
  for (int i = 0; i < fk.rel().m(); ++i) {
    const SpMat& c = fk.creation_e(i);
    P = SpMat(P - SpMat(c * SpMat(c.adjoint())));
  }
  for (int j = 0; j < fk.rel().n(); ++j) {
    const SpMat& c = fk.creation_f(j);
    Q = SpMat(Q - SpMat(c * SpMat(c.adjoint())));
  }
  P.prune([](Eigen::Index, Eigen::Index, const Scalar& v) { return v != Scalar(0.0, 0.0); });
  Q.prune([](Eigen::Index, Eigen::Index, const Scalar& v) { return v != Scalar(0.0, 0.0); });
  return {P, Q};
}

}  // namespace dilab
