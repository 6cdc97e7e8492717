#include "dilab/reps.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dilab/numkernel.hpp"
#include "dilab/semigroup.hpp"

namespace dilab {

void FiniteRep::check_shapes() const {
  if (static_cast<int>(E.size()) != rel.m() || static_cast<int>(F.size()) != rel.n())
    throw std::invalid_argument("FiniteRep: generator count mismatch");
  for (const CMat& x : E)
    if (x.rows() != d || x.cols() != d) throw std::invalid_argument("FiniteRep: shape mismatch");
  for (const CMat& x : F)
    if (x.rows() != d || x.cols() != d) throw std::invalid_argument("FiniteRep: shape mismatch");
}

ValidationReport validate(const FiniteRep& rep, double tol) {
  rep.check_shapes();
  const int m = rep.rel.m(), n = rep.rel.n(), d = rep.d;
  ValidationReport r;

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      CMat resid = rep.E[i] * rep.F[j];
      for (int ip = 0; ip < m; ++ip)
        for (int jp = 0; jp < n; ++jp)
          resid -= rep.rel.u()(i * n + j, ip * n + jp) * rep.F[jp] * rep.E[ip];
      r.commutation_residual = std::max(r.commutation_residual, opnorm(resid));
    }

  r.row_norm_e = opnorm(hstack(rep.E));
  r.row_norm_f = opnorm(hstack(rep.F));
  r.row_contractive = r.row_norm_e <= 1.0 + tol && r.row_norm_f <= 1.0 + tol;

  const CMat id = CMat::Identity(d, d);
  CMat de = CMat::Zero(d, d), df = CMat::Zero(d, d);
  for (const CMat& x : rep.E) de += x * x.adjoint();
  for (const CMat& x : rep.F) df += x * x.adjoint();
  r.defect_e = opnorm(CMat(de - id));
  r.defect_f = opnorm(CMat(df - id));
  r.defect_free = r.defect_e <= tol && r.defect_f <= tol;

  for (const CMat& x : rep.E)
    r.partial_isometry_residual =
        std::max(r.partial_isometry_residual, opnorm(CMat(x * x.adjoint() * x - x)));
  for (const CMat& x : rep.F)
    r.partial_isometry_residual =
        std::max(r.partial_isometry_residual, opnorm(CMat(x * x.adjoint() * x - x)));
  r.partially_isometric = r.partial_isometry_residual <= tol;

  CMat grame = CMat::Zero(m * d, m * d), gramf = CMat::Zero(n * d, n * d);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      grame.block(a * d, b * d, d, d) = rep.E[a].adjoint() * rep.E[b];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      gramf.block(a * d, b * d, d, d) = rep.F[a].adjoint() * rep.F[b];
  r.isom_gram_e = opnorm(CMat(grame - CMat::Identity(m * d, m * d)));
  r.isom_gram_f = opnorm(CMat(gramf - CMat::Identity(n * d, n * d)));
  r.row_isometric = r.isom_gram_e <= tol && r.isom_gram_f <= tol;
  r.row_isometry_possible_e = m == 1;
  r.row_isometry_possible_f = n == 1;
  return r;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os.precision(12);
  os << "commutation residual " << commutation_residual << "\n"
     << "row norms e " << row_norm_e << "  f " << row_norm_f << "\n"
     << "row contractive " << (row_contractive ? "yes" : "no") << "\n"
     << "partially isometric " << (partially_isometric ? "yes" : "no") << " (residual "
     << partial_isometry_residual << ")\n"
     << "defect free " << (defect_free ? "yes" : "no") << " (e " << defect_e << ", f " << defect_f
     << ")\n"
     << "row isometric " << (row_isometric ? "yes" : "no");
  if (!row_isometry_possible_e || !row_isometry_possible_f)
    os << " (impossible in finite dimension for a family of size >= 2)";
  return os.str();
}

void check_atomic(const AtomicRep& a) {
  if (static_cast<int>(a.e_edge.size()) != a.rel.m() ||
      static_cast<int>(a.f_edge.size()) != a.rel.n())
    throw std::invalid_argument("AtomicRep: generator count mismatch");
  auto check_family = [&](const std::vector<std::map<int, std::pair<int, Scalar>>>& fam) {
    for (const auto& edges : fam) {
      std::vector<bool> hit(static_cast<std::size_t>(a.vertices), false);
      for (const auto& [src, tgt] : edges) {
        if (src < 0 || src >= a.vertices || tgt.first < 0 || tgt.first >= a.vertices)
          throw std::invalid_argument("AtomicRep: vertex out of range");
        if (std::abs(std::abs(tgt.second) - 1.0) > 1e-12)
          throw std::invalid_argument("AtomicRep: edge scalar is not unimodular");
        if (hit[static_cast<std::size_t>(tgt.first)])
          throw std::invalid_argument("AtomicRep: generator is not injective");
        hit[static_cast<std::size_t>(tgt.first)] = true;
      }
    }
  };
  check_family(a.e_edge);
  check_family(a.f_edge);
}

namespace {

// Composition of partial maps: first inner, then outer.
std::optional<std::pair<int, Scalar>> compose(
    const std::map<int, std::pair<int, Scalar>>& outer,
    const std::map<int, std::pair<int, Scalar>>& inner, int x) {
  auto it = inner.find(x);
  if (it == inner.end()) return std::nullopt;
  auto jt = outer.find(it->second.first);
  if (jt == outer.end()) return std::nullopt;
  return std::make_pair(jt->second.first, jt->second.second * it->second.second);
}

}  // namespace

double atomic_commutation_residual(const AtomicRep& a) {
  double worst = 0.0;
  for (int i = 0; i < a.rel.m(); ++i)
    for (int j = 0; j < a.rel.n(); ++j) {
      auto [ip, jp] = a.rel.theta(i, j);
      for (int x = 0; x < a.vertices; ++x) {
        const auto lhs = compose(a.e_edge[static_cast<std::size_t>(i)],
                                 a.f_edge[static_cast<std::size_t>(j)], x);
        const auto rhs = compose(a.f_edge[static_cast<std::size_t>(jp)],
                                 a.e_edge[static_cast<std::size_t>(ip)], x);
        if (lhs.has_value() != rhs.has_value()) {
          worst = std::max(worst, 1.0);
        } else if (lhs && rhs) {
          if (lhs->first != rhs->first)
            worst = std::max(worst, 1.0);
          else
            worst = std::max(worst, std::abs(lhs->second - rhs->second));
        }
      }
    }
  return worst;
}

bool atomic_defect_free(const AtomicRep& a) {
  auto indegree_one = [&](const std::vector<std::map<int, std::pair<int, Scalar>>>& fam) {
    std::vector<int> deg(static_cast<std::size_t>(a.vertices), 0);
    for (const auto& edges : fam)
      for (const auto& [src, tgt] : edges) ++deg[static_cast<std::size_t>(tgt.first)];
    return std::all_of(deg.begin(), deg.end(), [](int x) { return x == 1; });
  };
  return indegree_one(a.e_edge) && indegree_one(a.f_edge);
}

FiniteRep atomic_to_matrices(const AtomicRep& a) {
  check_atomic(a);
  FiniteRep rep{from_perm(a.rel), a.vertices, {}, {}};
  auto to_mat = [&](const std::map<int, std::pair<int, Scalar>>& edges) {
    CMat x = CMat::Zero(a.vertices, a.vertices);
    for (const auto& [src, tgt] : edges) x(tgt.first, src) = tgt.second;
    return x;
  };
  for (const auto& edges : a.e_edge) rep.E.push_back(to_mat(edges));
  for (const auto& edges : a.f_edge) rep.F.push_back(to_mat(edges));
  return rep;
}

AtomicRep shift_atomic(const PermRelation& rel, int vertices, int ashift, int bshift,
                       const std::vector<int>& ecolor, const std::vector<int>& fcolor,
                       const std::vector<Scalar>& escalar, const std::vector<Scalar>& fscalar) {
  if (vertices <= 0) throw std::invalid_argument("shift_atomic: need vertices");
  if (static_cast<int>(ecolor.size()) != vertices || static_cast<int>(fcolor.size()) != vertices ||
      static_cast<int>(escalar.size()) != vertices || static_cast<int>(fscalar.size()) != vertices)
    throw std::invalid_argument("shift_atomic: per-vertex data size mismatch");
  AtomicRep a{rel, vertices,
              std::vector<std::map<int, std::pair<int, Scalar>>>(static_cast<std::size_t>(rel.m())),
              std::vector<std::map<int, std::pair<int, Scalar>>>(static_cast<std::size_t>(rel.n()))};
  auto mod = [&](int x) { return ((x % vertices) + vertices) % vertices; };
  for (int x = 0; x < vertices; ++x) {
    a.e_edge[static_cast<std::size_t>(ecolor[static_cast<std::size_t>(x)])][mod(x - ashift)] = {
        x, escalar[static_cast<std::size_t>(x)]};
    a.f_edge[static_cast<std::size_t>(fcolor[static_cast<std::size_t>(x)])][mod(x - bshift)] = {
        x, fscalar[static_cast<std::size_t>(x)]};
  }
  check_atomic(a);
  return a;
}

Tail::Tail(std::vector<std::pair<int, int>> pre, std::vector<std::pair<int, int>> cyc)
    : prefix(std::move(pre)), cycle(std::move(cyc)) {
  if (cycle.empty()) throw std::invalid_argument("Tail: cycle must be nonempty");
}

std::pair<int, int> Tail::block(int s) const {
  if (s < static_cast<int>(prefix.size())) return prefix[static_cast<std::size_t>(s)];
  const std::size_t t = static_cast<std::size_t>(s - static_cast<int>(prefix.size()));
  return cycle[t % cycle.size()];
}

// ---------------------------------------------------------------------------
// TailVector

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int t = 0; t < e; ++t) r *= b;
  return r;
}

constexpr std::size_t kComponentLimit = std::size_t(1) << 24;

Pattern ef_pattern(int k, int l) {
  Pattern p;
  for (int t = 0; t < k; ++t) p.push_back(true);
  for (int t = 0; t < l; ++t) p.push_back(false);
  return p;
}

}  // namespace

TailVector::TailVector(const UnitaryRelation& rel, const Tail& tail, int level,
                       const NormalWord& w)
    : rel_(&rel), tail_(&tail), level_(level) {
  if (level < 0) throw std::invalid_argument("TailVector: negative level");
  const int k = w.edeg(), l = w.fdeg();
  const std::size_t me = ipow(static_cast<std::size_t>(rel.m()), k);
  const std::size_t nf = ipow(static_cast<std::size_t>(rel.n()), l);
  CVec data = CVec::Zero(static_cast<Eigen::Index>(me * nf));
  std::size_t eidx = 0, fidx = 0;
  for (int t : w.e) eidx = eidx * static_cast<std::size_t>(rel.m()) + static_cast<std::size_t>(t);
  for (int t : w.f) fidx = fidx * static_cast<std::size_t>(rel.n()) + static_cast<std::size_t>(t);
  data[static_cast<Eigen::Index>(eidx * nf + fidx)] = 1.0;
  comp_[{k, l}] = std::move(data);
}

CVec& TailVector::at(int k, int l) {
  auto it = comp_.find({k, l});
  if (it == comp_.end()) {
    const std::size_t sz = ipow(static_cast<std::size_t>(rel_->m()), k) *
                           ipow(static_cast<std::size_t>(rel_->n()), l);
    if (sz > kComponentLimit) throw std::length_error("TailVector: component too large");
    it = comp_.emplace(std::make_pair(k, l), CVec::Zero(static_cast<Eigen::Index>(sz))).first;
  }
  return it->second;
}

void TailVector::prune() {
  for (auto it = comp_.begin(); it != comp_.end();) {
    if (it->second.size() == 0 || it->second.norm() == 0.0)
      it = comp_.erase(it);
    else
      ++it;
  }
}

void TailVector::descend() {
  const auto [a, b] = tail_->block(level_);
  const std::size_t m = static_cast<std::size_t>(rel_->m());
  const std::size_t n = static_cast<std::size_t>(rel_->n());
  std::map<std::pair<int, int>, CVec> next;
  for (const auto& [deg, data] : comp_) {
    const auto [k, l] = deg;
    // Embed at pattern [E^k F^l E F] with the block letters fixed, then
    // rewrite to e-first form.
    TensorCoeffs tc;
    tc.pattern = ef_pattern(k, l);
    tc.pattern.push_back(true);
    tc.pattern.push_back(false);
    const std::size_t sz = static_cast<std::size_t>(data.size());
    if (sz * m * n > kComponentLimit) throw std::length_error("TailVector: component too large");
    tc.data = CVec::Zero(static_cast<Eigen::Index>(sz * m * n));
    for (std::size_t w = 0; w < sz; ++w) {
      const Scalar v = data[static_cast<Eigen::Index>(w)];
      if (v == Scalar(0.0, 0.0)) continue;
      tc.data[static_cast<Eigen::Index>((w * m + static_cast<std::size_t>(a)) * n +
                                        static_cast<std::size_t>(b))] = v;
    }
    TensorCoeffs out = pattern_transform(*rel_, tc, ef_pattern(k + 1, l + 1));
    CVec& slot = next[{k + 1, l + 1}];
    if (slot.size() == 0)
      slot = std::move(out.data);
    else
      slot += out.data;
  }
  comp_ = std::move(next);
  ++level_;
}

void TailVector::descend_to(int level) {
  while (level_ < level) descend();
}

void TailVector::create_e(int i) {
  const std::size_t m = static_cast<std::size_t>(rel_->m());
  std::map<std::pair<int, int>, CVec> next;
  for (const auto& [deg, data] : comp_) {
    const auto [k, l] = deg;
    const std::size_t sz = static_cast<std::size_t>(data.size());
    if (sz * m > kComponentLimit) throw std::length_error("TailVector: component too large");
    CVec out = CVec::Zero(static_cast<Eigen::Index>(sz * m));
    out.segment(static_cast<Eigen::Index>(static_cast<std::size_t>(i) * sz),
                static_cast<Eigen::Index>(sz)) = data;
    next[{k + 1, l}] = std::move(out);
  }
  comp_ = std::move(next);
  prune();
}

void TailVector::create_f(int j) {
  const std::size_t n = static_cast<std::size_t>(rel_->n());
  std::map<std::pair<int, int>, CVec> next;
  for (const auto& [deg, data] : comp_) {
    const auto [k, l] = deg;
    TensorCoeffs tc;
    tc.pattern.push_back(false);
    for (bool p : ef_pattern(k, l)) tc.pattern.push_back(p);
    const std::size_t sz = static_cast<std::size_t>(data.size());
    if (sz * n > kComponentLimit) throw std::length_error("TailVector: component too large");
    tc.data = CVec::Zero(static_cast<Eigen::Index>(sz * n));
    tc.data.segment(static_cast<Eigen::Index>(static_cast<std::size_t>(j) * sz),
                    static_cast<Eigen::Index>(sz)) = data;
    TensorCoeffs out = pattern_transform(*rel_, tc, ef_pattern(k, l + 1));
    CVec& slot = next[{k, l + 1}];
    if (slot.size() == 0)
      slot = std::move(out.data);
    else
      slot += out.data;
  }
  comp_ = std::move(next);
  prune();
}

void TailVector::adjoint_e(int i) {
  bool needs = false;
  for (const auto& [deg, data] : comp_)
    if (deg.first == 0 && data.norm() != 0.0) needs = true;
  if (needs) descend();
  const std::size_t m = static_cast<std::size_t>(rel_->m());
  std::map<std::pair<int, int>, CVec> next;
  for (const auto& [deg, data] : comp_) {
    const auto [k, l] = deg;
    if (k == 0) continue;
    const std::size_t sz = static_cast<std::size_t>(data.size()) / m;
    next[{k - 1, l}] = data.segment(static_cast<Eigen::Index>(static_cast<std::size_t>(i) * sz),
                                    static_cast<Eigen::Index>(sz));
  }
  comp_ = std::move(next);
  prune();
}

void TailVector::adjoint_f(int j) {
  bool needs = false;
  for (const auto& [deg, data] : comp_)
    if (deg.second == 0 && data.norm() != 0.0) needs = true;
  if (needs) descend();
  const std::size_t n = static_cast<std::size_t>(rel_->n());
  std::map<std::pair<int, int>, CVec> next;
  for (const auto& [deg, data] : comp_) {
    const auto [k, l] = deg;
    if (l == 0) continue;
    TensorCoeffs tc{ef_pattern(k, l), data};
    Pattern dst;
    dst.push_back(false);
    for (bool p : ef_pattern(k, l - 1)) dst.push_back(p);
    TensorCoeffs out = pattern_transform(*rel_, tc, dst);
    const std::size_t sz = static_cast<std::size_t>(out.data.size()) / n;
    CVec piece = out.data.segment(static_cast<Eigen::Index>(static_cast<std::size_t>(j) * sz),
                                  static_cast<Eigen::Index>(sz));
    CVec& slot = next[{k, l - 1}];
    if (slot.size() == 0)
      slot = std::move(piece);
    else
      slot += piece;
  }
  comp_ = std::move(next);
  prune();
}

void TailVector::apply(const StarLetter& l) {
  if (l.is_e) {
    if (l.star)
      adjoint_e(l.index);
    else
      create_e(l.index);
  } else {
    if (l.star)
      adjoint_f(l.index);
    else
      create_f(l.index);
  }
}

void TailVector::add(const TailVector& other, Scalar weight) {
  TailVector o = other;
  o.descend_to(level_);
  descend_to(o.level());
  for (const auto& [deg, data] : o.comp_) {
    CVec& slot = at(deg.first, deg.second);
    slot += weight * data;
  }
  prune();
}

void TailVector::scale(Scalar a) {
  for (auto& [deg, data] : comp_) data *= a;
}

Scalar TailVector::inner(const TailVector& other) const {
  TailVector a = *this, b = other;
  const int lvl = std::max(a.level(), b.level());
  a.descend_to(lvl);
  b.descend_to(lvl);
  Scalar s(0.0, 0.0);
  for (const auto& [deg, data] : a.comp_) {
    auto it = b.comp_.find(deg);
    if (it != b.comp_.end()) s += data.dot(it->second);
  }
  return s;
}

double TailVector::norm() const {
  double s = 0.0;
  for (const auto& [deg, data] : comp_) s += data.squaredNorm();
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Truncated tail representations

Eigen::Index TailRep::class_index(int level, const NormalWord& w) const {
  for (std::size_t t = 0; t < labels.size(); ++t)
    if (labels[t].first == level && labels[t].second == w) return static_cast<Eigen::Index>(t);
  return -1;
}

namespace {

std::vector<NormalWord> words_up_to_length(int m, int n, int maxlen) {
  std::vector<NormalWord> out;
  for (int t = 0; t <= maxlen; ++t)
    for (int k = 0; k <= t; ++k)
      for (NormalWord& w : words_of_degree(m, n, k, t - k)) out.push_back(std::move(w));
  return out;
}

std::pair<int, NormalWord> canonical_pair(const PermRelation& rel, const Tail& tail, int s,
                                          NormalWord w) {
  while (s > 0) {
    const auto [i, j] = tail.block(s - 1);
    NormalWord q;
    if (!divide_right_block(rel, w, i, j, &q)) break;
    w = std::move(q);
    --s;
  }
  return {s, std::move(w)};
}

NormalWord prepend_e(const NormalWord& w, int i) {
  NormalWord z = w;
  z.e.insert(z.e.begin(), i);
  return z;
}

struct LevelWordLess {
  bool operator()(const std::pair<int, NormalWord>& a, const std::pair<int, NormalWord>& b) const {
    if (a.first != b.first) return a.first < b.first;
    if (a.second == b.second) return false;
    return word_less(a.second, b.second);
  }
};

void check_tail_indices(const Tail& tail, int m, int n) {
  auto ok = [&](const std::pair<int, int>& b) {
    return b.first >= 0 && b.first < m && b.second >= 0 && b.second < n;
  };
  for (const auto& b : tail.prefix)
    if (!ok(b)) throw std::out_of_range("tail_rep: tail index out of range");
  for (const auto& b : tail.cycle)
    if (!ok(b)) throw std::out_of_range("tail_rep: tail index out of range");
}

}  // namespace

TailRep tail_rep(const PermRelation& rel, const Tail& tail, int depth, int word_cutoff) {
  if (depth < 1) throw std::invalid_argument("tail_rep: depth must be >= 1");
  if (word_cutoff < 0) throw std::invalid_argument("tail_rep: word_cutoff must be >= 0");
  check_tail_indices(tail, rel.m(), rel.n());

  TailRep tr;
  tr.tail = tail;
  tr.depth = depth;
  tr.word_cutoff = word_cutoff;
  tr.atomic_basis = true;

  const auto words = words_up_to_length(rel.m(), rel.n(), word_cutoff);
  std::map<std::pair<int, NormalWord>, Eigen::Index, LevelWordLess> index;
  for (int s = 0; s < depth; ++s)
    for (const NormalWord& w : words) {
      if (s > 0) {
        const auto [i, j] = tail.block(s - 1);
        if (divide_right_block(rel, w, i, j, nullptr)) continue;  // not canonical
      }
      const Eigen::Index idx = static_cast<Eigen::Index>(tr.labels.size());
      tr.labels.emplace_back(s, w);
      index.emplace(std::make_pair(s, w), idx);
    }

  const Eigen::Index N = static_cast<Eigen::Index>(tr.labels.size());
  tr.rep.rel = from_perm(rel);
  tr.rep.d = static_cast<int>(N);
  tr.rep.E.assign(static_cast<std::size_t>(rel.m()), CMat::Zero(N, N));
  tr.rep.F.assign(static_cast<std::size_t>(rel.n()), CMat::Zero(N, N));
  tr.grading.resize(static_cast<std::size_t>(N));
  tr.interior.resize(static_cast<std::size_t>(N));

  for (Eigen::Index col = 0; col < N; ++col) {
    const auto& [s, w] = tr.labels[static_cast<std::size_t>(col)];
    tr.grading[static_cast<std::size_t>(col)] = {w.edeg() - s, w.fdeg() - s};
    tr.interior[static_cast<std::size_t>(col)] = s + 2 <= depth && w.length() + 2 <= word_cutoff;

    for (int i = 0; i < rel.m(); ++i) {
      auto [s2, w2] = canonical_pair(rel, tail, s, prepend_e(w, i));
      if (w2.length() > word_cutoff) continue;
      tr.rep.E[static_cast<std::size_t>(i)](index.at({s2, w2}), col) = 1.0;
    }
    for (int j = 0; j < rel.n(); ++j) {
      std::vector<Gen> letters;
      letters.push_back(Gen{false, j});
      for (const Gen& g : letters_of(w)) letters.push_back(g);
      auto [s2, w2] = canonical_pair(rel, tail, s, normalize(rel, letters));
      if (w2.length() > word_cutoff) continue;
      tr.rep.F[static_cast<std::size_t>(j)](index.at({s2, w2}), col) = 1.0;
    }
  }
  std::vector<Eigen::Index> icols;
  for (Eigen::Index t = 0; t < N; ++t)
    if (tr.interior[static_cast<std::size_t>(t)]) icols.push_back(t);
  tr.interior_coords = CMat::Zero(N, static_cast<Eigen::Index>(icols.size()));
  for (std::size_t t = 0; t < icols.size(); ++t)
    tr.interior_coords(icols[t], static_cast<Eigen::Index>(t)) = 1.0;
  return tr;
}

TailRep tail_rep(const UnitaryRelation& rel, const Tail& tail, int depth, int word_cutoff,
                 std::size_t basis_limit) {
  if (rel.is_permutation()) {
    TailRep tr = tail_rep(*rel.perm(), tail, depth, word_cutoff);
    tr.rep.rel = rel;
    return tr;
  }
  if (depth < 1) throw std::invalid_argument("tail_rep: depth must be >= 1");
  if (word_cutoff < 0) throw std::invalid_argument("tail_rep: word_cutoff must be >= 0");
  check_tail_indices(tail, rel.m(), rel.n());

  const int m = rel.m(), n = rel.n();
  const auto words = words_up_to_length(m, n, word_cutoff);
  struct Span {
    int s;
    NormalWord w;
  };
  std::vector<Span> span;
  std::map<std::pair<int, NormalWord>, Eigen::Index, LevelWordLess> span_index;
  for (int s = 0; s < depth; ++s)
    for (const NormalWord& w : words) {
      span_index.emplace(std::make_pair(s, w), static_cast<Eigen::Index>(span.size()));
      span.push_back({s, w});
    }
  const Eigen::Index S = static_cast<Eigen::Index>(span.size());
  if (static_cast<std::size_t>(S) > basis_limit)
    throw std::invalid_argument("tail_rep: spanning set exceeds the basis limit");

  // Ambient coordinates at the deepest level; inner products are exact.
  std::vector<TailVector> amb;
  amb.reserve(static_cast<std::size_t>(S));
  for (const Span& sp : span) {
    TailVector v(rel, tail, sp.s, sp.w);
    v.descend_to(depth - 1);
    amb.push_back(std::move(v));
  }

  // Grades partition the spanning set; the Gram matrix is block diagonal.
  std::map<std::pair<int, int>, std::vector<Eigen::Index>> by_grade;
  for (Eigen::Index t = 0; t < S; ++t) {
    const Span& sp = span[static_cast<std::size_t>(t)];
    by_grade[{sp.w.edeg() - sp.s, sp.w.fdeg() - sp.s}].push_back(t);
  }

  CMat G = CMat::Zero(S, S);
  for (const auto& [grade, idxs] : by_grade)
    for (std::size_t a = 0; a < idxs.size(); ++a)
      for (std::size_t b = a; b < idxs.size(); ++b) {
        const Scalar v =
            amb[static_cast<std::size_t>(idxs[a])].inner(amb[static_cast<std::size_t>(idxs[b])]);
        G(idxs[a], idxs[b]) = v;
        G(idxs[b], idxs[a]) = std::conj(v);
      }

  TailRep tr;
  tr.tail = tail;
  tr.depth = depth;
  tr.word_cutoff = word_cutoff;
  tr.atomic_basis = false;

  std::vector<CVec> onb_coords;  // columns in spanning coordinates
  for (const auto& [grade, idxs] : by_grade) {
    const Eigen::Index ng = static_cast<Eigen::Index>(idxs.size());
    CMat Gg(ng, ng);
    for (Eigen::Index a = 0; a < ng; ++a)
      for (Eigen::Index b = 0; b < ng; ++b)
        Gg(a, b) = G(idxs[static_cast<std::size_t>(a)], idxs[static_cast<std::size_t>(b)]);
    Eigen::SelfAdjointEigenSolver<CMat> es(Gg);
    const double lmax = std::max(1e-300, es.eigenvalues().maxCoeff());
    bool all_interior = true;
    for (Eigen::Index t : idxs) {
      const Span& sp = span[static_cast<std::size_t>(t)];
      if (!(sp.s + 2 <= depth && sp.w.length() + 2 <= word_cutoff)) all_interior = false;
    }
    for (Eigen::Index t = 0; t < ng; ++t) {
      const double lam = es.eigenvalues()(t);
      if (lam <= 1e-12 * lmax) continue;
      CVec col = CVec::Zero(S);
      for (Eigen::Index a = 0; a < ng; ++a)
        col[idxs[static_cast<std::size_t>(a)]] = es.eigenvectors()(a, t) / std::sqrt(lam);
      onb_coords.push_back(std::move(col));
      tr.grading.push_back(grade);
      tr.interior.push_back(all_interior);
    }
  }
  const Eigen::Index R = static_cast<Eigen::Index>(onb_coords.size());
  CMat C(S, R);
  for (Eigen::Index t = 0; t < R; ++t) C.col(t) = onb_coords[static_cast<std::size_t>(t)];

  // Generator action on spanning coordinates. A target word that leaves the
  // length range is re-expressed one level down when its trailing block can
  // be stripped; the orthogonal remainder drops out of the compression.
  auto strip_block = [&](const NormalWord& z, int s) -> std::vector<WordTerm> {
    const int k = z.edeg(), l = z.fdeg();
    if (s < 1 || k < 1 || l < 1) return {};
    const auto [a, b] = tail.block(s - 1);
    TensorCoeffs tc = indicator(rel, letters_of(z));
    Pattern dst = ef_pattern(k - 1, l - 1);
    dst.push_back(true);
    dst.push_back(false);
    TensorCoeffs back = pattern_transform(rel, tc, dst);
    const std::size_t mn = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
    const std::size_t outer = static_cast<std::size_t>(back.data.size()) / mn;
    const std::size_t want =
        static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b);
    std::vector<WordTerm> out;
    std::size_t fsz = 1;
    for (int t = 0; t < l - 1; ++t) fsz *= static_cast<std::size_t>(n);
    for (std::size_t w = 0; w < outer; ++w) {
      const Scalar c = back.data[static_cast<Eigen::Index>(w * mn + want)];
      if (std::abs(c) < 1e-14) continue;
      NormalWord y;
      std::size_t eidx = w / fsz, fidx = w % fsz;
      y.e.resize(static_cast<std::size_t>(k - 1));
      for (int t = k - 2; t >= 0; --t) {
        y.e[static_cast<std::size_t>(t)] = static_cast<int>(eidx % static_cast<std::size_t>(m));
        eidx /= static_cast<std::size_t>(m);
      }
      y.f.resize(static_cast<std::size_t>(l - 1));
      for (int t = l - 2; t >= 0; --t) {
        y.f[static_cast<std::size_t>(t)] = static_cast<int>(fidx % static_cast<std::size_t>(n));
        fidx /= static_cast<std::size_t>(n);
      }
      out.push_back(WordTerm{std::move(y), c});
    }
    return out;
  };

  auto add_target = [&](CMat& A, Eigen::Index col, int s, const NormalWord& z, Scalar c) {
    if (z.length() <= word_cutoff) {
      A(span_index.at({s, z}), col) += c;
      return;
    }
    for (const WordTerm& t : strip_block(z, s))
      if (t.word.length() <= word_cutoff) A(span_index.at({s - 1, t.word}), col) += c * t.coeff;
  };

  std::vector<CMat> Ae(static_cast<std::size_t>(m), CMat::Zero(S, S));
  std::vector<CMat> Af(static_cast<std::size_t>(n), CMat::Zero(S, S));
  for (Eigen::Index col = 0; col < S; ++col) {
    const Span& sp = span[static_cast<std::size_t>(col)];
    for (int i = 0; i < m; ++i)
      add_target(Ae[static_cast<std::size_t>(i)], col, sp.s, prepend_e(sp.w, i), Scalar(1.0, 0.0));
    for (int j = 0; j < n; ++j) {
      std::vector<Gen> letters;
      letters.push_back(Gen{false, j});
      for (const Gen& g : letters_of(sp.w)) letters.push_back(g);
      for (const WordTerm& t : expand_to_normal(rel, letters))
        add_target(Af[static_cast<std::size_t>(j)], col, sp.s, t.word, t.coeff);
    }
  }

  tr.rep.rel = rel;
  tr.rep.d = static_cast<int>(R);
  for (int i = 0; i < m; ++i)
    tr.rep.E.push_back(C.adjoint() * G * Ae[static_cast<std::size_t>(i)] * C);
  for (int j = 0; j < n; ++j)
    tr.rep.F.push_back(C.adjoint() * G * Af[static_cast<std::size_t>(j)] * C);

  // Interior spanning vectors, expressed in the orthonormal basis.
  std::vector<Eigen::Index> icols;
  for (Eigen::Index t = 0; t < S; ++t) {
    const Span& sp = span[static_cast<std::size_t>(t)];
    if (sp.s + 2 <= depth && sp.w.length() + 2 <= word_cutoff) icols.push_back(t);
  }
  tr.interior_coords = CMat::Zero(R, static_cast<Eigen::Index>(icols.size()));
  const CMat CHG = C.adjoint() * G;
  for (std::size_t t = 0; t < icols.size(); ++t)
    tr.interior_coords.col(static_cast<Eigen::Index>(t)) = CHG.col(icols[t]);
  return tr;
}

CVec gauge_unitary(const TailRep& tr, Scalar alpha, Scalar beta) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12 || std::abs(std::abs(beta) - 1.0) > 1e-12)
    throw std::invalid_argument("gauge_unitary: scalars must be unimodular");
  CVec d(tr.dim());
  for (Eigen::Index t = 0; t < tr.dim(); ++t) {
    const auto [g1, g2] = tr.grading[static_cast<std::size_t>(t)];
    d[t] = std::pow(alpha, g1) * std::pow(beta, g2);
  }
  return d;
}

}  // namespace dilab
