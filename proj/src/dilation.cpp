#include "dilab/dilation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <sstream>
#include <stdexcept>

#include "dilab/numkernel.hpp"
#include "dilab/semigroup.hpp"

namespace dilab {

std::vector<FreeWord> free_words_up_to(int p, int maxlen) {
  std::vector<FreeWord> out{{}};
  std::vector<FreeWord> level{{}};
  for (int t = 0; t < maxlen; ++t) {
    std::vector<FreeWord> next;
    for (const FreeWord& w : level)
      for (int i = 0; i < p; ++i) {
        FreeWord z = w;
        z.push_back(i);
        next.push_back(z);
        out.push_back(std::move(z));
      }
    level = std::move(next);
  }
  return out;
}

CMat free_word_product(const std::vector<CMat>& gens, const FreeWord& w) {
  const Eigen::Index d = gens.empty() ? 1 : gens.front().rows();
  CMat out = CMat::Identity(d, d);
  for (int i : w) out = out * gens[static_cast<std::size_t>(i)];
  return out;
}

CMat gram_oracle(const std::vector<CMat>& gens, const FreeWord& w, const FreeWord& wp) {
  const Eigen::Index d = gens.empty() ? 1 : gens.front().rows();
  auto is_prefix = [](const FreeWord& a, const FreeWord& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
  };
  if (is_prefix(w, wp)) {
    const FreeWord v(wp.begin() + static_cast<std::ptrdiff_t>(w.size()), wp.end());
    return free_word_product(gens, v);
  }
  if (is_prefix(wp, w)) {
    const FreeWord v(w.begin() + static_cast<std::ptrdiff_t>(wp.size()), w.end());
    return free_word_product(gens, v).adjoint();
  }
  return CMat::Zero(d, d);
}

CMat gram_orthonormalize(const CMat& G, Eigen::Index lead, double rank_tol) {
  const Eigen::Index n = G.rows();
  if (lead > 0 &&
      (G.topLeftCorner(lead, lead) - CMat::Identity(lead, lead)).norm() > 1e-9)
    throw std::invalid_argument("gram_orthonormalize: leading block is not the identity");
  if (lead == n) return CMat::Identity(n, n);

  const CMat G12 = G.block(0, lead, lead, n - lead);
  const CMat schur =
      G.block(lead, lead, n - lead, n - lead) - G12.adjoint() * G12;
  Eigen::SelfAdjointEigenSolver<CMat> es(schur);
  const double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < es.eigenvalues().size(); ++t)
    if (es.eigenvalues()(t) > rank_tol * lmax) keep.push_back(t);

  CMat cprime(n - lead, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t)
    cprime.col(static_cast<Eigen::Index>(t)) =
        es.eigenvectors().col(keep[t]) / std::sqrt(es.eigenvalues()(keep[t]));

  CMat C = CMat::Zero(n, lead + cprime.cols());
  C.topLeftCorner(lead, lead) = CMat::Identity(lead, lead);
  C.block(0, lead, lead, cprime.cols()) = -G12 * cprime;
  C.block(lead, lead, n - lead, cprime.cols()) = cprime;
  return C;
}

namespace {

CMat masked_cols(const CMat& a, const std::vector<bool>& mask) {
  std::vector<Eigen::Index> cols;
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (mask[c]) cols.push_back(static_cast<Eigen::Index>(c));
  CMat out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
  return out;
}

// Modified Gram-Schmidt append; returns true when the column was kept.
bool mgs_append(std::vector<CVec>& basis, CVec v, double keep_tol) {
  for (int pass = 0; pass < 2; ++pass)
    for (const CVec& b : basis) v -= b * b.dot(v);
  const double nv = v.norm();
  if (nv <= keep_tol) return false;
  basis.push_back(v / nv);
  return true;
}

CMat basis_matrix(const std::vector<CVec>& basis, Eigen::Index rows) {
  CMat out(rows, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t t = 0; t < basis.size(); ++t) out.col(static_cast<Eigen::Index>(t)) = basis[t];
  return out;
}

}  // namespace

DilationResult fbp_dilate(const std::vector<CMat>& A, int depth, double tol) {
  if (A.empty()) throw std::invalid_argument("fbp_dilate: empty family");
  const int p = static_cast<int>(A.size());
  const Eigen::Index d = A.front().rows();
  for (const CMat& a : A)
    if (a.rows() != d || a.cols() != d) throw std::invalid_argument("fbp_dilate: shape mismatch");
  if (depth < 1) throw std::invalid_argument("fbp_dilate: depth must be >= 1");

  const CMat R = hstack(A);
  if (opnorm(R) > 1.0 + tol)
    throw std::domain_error("fbp_dilate: the family is not a row contraction");
  const CMat D = psd_sqrt(CMat(CMat::Identity(p * d, p * d) - R.adjoint() * R));

  const auto words = free_words_up_to(p, depth);
  std::map<FreeWord, Eigen::Index> widx;
  for (std::size_t t = 0; t < words.size(); ++t) widx[words[t]] = static_cast<Eigen::Index>(t);
  const Eigen::Index W = static_cast<Eigen::Index>(words.size());
  const Eigen::Index amb = d + p * d * W;

  DilationResult out;
  out.ambient_dim = amb;
  out.J = CMat::Zero(amb, d);
  out.J.topLeftCorner(d, d) = CMat::Identity(d, d);

  auto kindex = [&](Eigen::Index word, Eigen::Index r) { return d + word * (p * d) + r; };

  for (int i = 0; i < p; ++i) {
    CMat S = CMat::Zero(amb, amb);
    S.topLeftCorner(d, d) = A[static_cast<std::size_t>(i)];
    // Defect column of the Schaeffer block, entering at the vacuum word.
    S.block(kindex(0, 0), 0, p * d, d) = D.block(0, i * d, p * d, d);
    for (Eigen::Index t = 0; t < W; ++t) {
      const FreeWord& x = words[static_cast<std::size_t>(t)];
      if (static_cast<int>(x.size()) + 1 > depth) continue;
      FreeWord ix;
      ix.reserve(x.size() + 1);
      ix.push_back(i);
      ix.insert(ix.end(), x.begin(), x.end());
      const Eigen::Index tgt = widx.at(ix);
      for (Eigen::Index r = 0; r < p * d; ++r) S(kindex(tgt, r), kindex(t, r)) = 1.0;
    }
    out.S.push_back(std::move(S));
  }

  out.interior.assign(static_cast<std::size_t>(amb), false);
  for (Eigen::Index h = 0; h < d; ++h) out.interior[static_cast<std::size_t>(h)] = true;
  for (Eigen::Index t = 0; t < W; ++t)
    if (static_cast<int>(words[static_cast<std::size_t>(t)].size()) + 1 <= depth)
      for (Eigen::Index r = 0; r < p * d; ++r)
        out.interior[static_cast<std::size_t>(kindex(t, r))] = true;

  // Minimal part: the orbit of the original space, orthonormalized through
  // the closed-form Gram.
  CMat X(amb, W * d);
  for (Eigen::Index t = 0; t < W; ++t) {
    const FreeWord& x = words[static_cast<std::size_t>(t)];
    if (x.empty()) {
      X.middleCols(t * d, d) = out.J;
    } else {
      const FreeWord rest(x.begin() + 1, x.end());
      X.middleCols(t * d, d) =
          out.S[static_cast<std::size_t>(x.front())] * X.middleCols(widx.at(rest) * d, d);
    }
  }
  CMat G(W * d, W * d);
  for (Eigen::Index a = 0; a < W; ++a)
    for (Eigen::Index b = 0; b < W; ++b)
      G.block(a * d, b * d, d, d) =
          gram_oracle(A, words[static_cast<std::size_t>(a)], words[static_cast<std::size_t>(b)]);
  const CMat C = gram_orthonormalize(G, d);
  out.minimal_basis = X * C;
  for (int i = 0; i < p; ++i)
    out.minimal_S.push_back(out.minimal_basis.adjoint() * out.S[static_cast<std::size_t>(i)] *
                            out.minimal_basis);

  // Diagnostics.
  const CMat id = CMat::Identity(amb, amb);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      CMat diff = out.S[static_cast<std::size_t>(i)].adjoint() * out.S[static_cast<std::size_t>(j)];
      if (i == j) diff -= id;
      out.isometry_residual =
          std::max(out.isometry_residual, masked_cols(diff, out.interior).norm());
    }
  for (Eigen::Index t = 0; t < W; ++t) {
    const CMat aw = free_word_product(A, words[static_cast<std::size_t>(t)]);
    out.compression_residual = std::max(
        out.compression_residual, (out.J.adjoint() * X.middleCols(t * d, d) - aw).norm());
  }
  CMat def = id;
  for (const CMat& S : out.S) def -= S * S.adjoint();
  out.defect_residual = masked_cols(def, out.interior).norm();
  const CMat P = out.minimal_basis * out.minimal_basis.adjoint();
  for (Eigen::Index t = 0; t < W; ++t) {
    if (static_cast<int>(words[static_cast<std::size_t>(t)].size()) + 1 > depth) continue;
    for (const CMat& S : out.S) {
      const CMat img = S * X.middleCols(t * d, d);
      out.minimality_gap = std::max(out.minimality_gap, (img - P * img).norm());
    }
  }
  return out;
}

WanderingDecomposition wandering_decomposition(const DilationResult& dil, int depth) {
  const Eigen::Index amb = dil.ambient_dim;
  const Eigen::Index d = dil.J.cols();
  const int p = static_cast<int>(dil.S.size());
  if (p == 0) throw std::invalid_argument("wandering_decomposition: no generators");

  // Orbit of the original space.
  std::vector<CVec> mbasis;
  std::vector<CMat> level{dil.J};
  for (Eigen::Index h = 0; h < d; ++h) mgs_append(mbasis, dil.J.col(h), 1e-9);
  std::vector<CMat> inner_cols{dil.J};
  for (int t = 1; t <= depth; ++t) {
    std::vector<CMat> next;
    for (const CMat& blk : level)
      for (const CMat& S : dil.S) {
        CMat img = S * blk;
        for (Eigen::Index h = 0; h < d; ++h) mgs_append(mbasis, img.col(h), 1e-9);
        next.push_back(std::move(img));
      }
    if (t <= depth - 1)
      for (const CMat& blk : next) inner_cols.push_back(blk);
    level = std::move(next);
  }
  WanderingDecomposition out;
  out.minimal_basis = basis_matrix(mbasis, amb);
  out.minimal_dim = out.minimal_basis.cols();

  const CMat Q = out.minimal_basis;
  auto deflate = [&](CVec v) {
    v -= Q * (Q.adjoint() * v);
    return v;
  };

  // Reducing on the interior: adjoints keep the inner orbit inside M.
  for (const CMat& blk : inner_cols)
    for (const CMat& S : dil.S) {
      const CMat img = S.adjoint() * blk;
      for (Eigen::Index h = 0; h < d; ++h)
        out.reducing_residual = std::max(out.reducing_residual, deflate(img.col(h)).norm());
    }

  // Wandering vectors of the complement: the defect range inside M-perp.
  CMat def = CMat::Identity(amb, amb);
  for (const CMat& S : dil.S) def -= S * S.adjoint();
  std::vector<CVec> wbasis;
  for (Eigen::Index b = 0; b < amb; ++b) {
    CVec v = deflate(def * deflate(CVec(CVec::Unit(amb, b))));
    mgs_append(wbasis, std::move(v), 1e-7);
  }
  out.wandering_basis = basis_matrix(wbasis, amb);
  out.multiplicity = out.wandering_basis.cols();

  // The complement is exhausted by the orbit of the wandering space.
  std::vector<CVec> all = mbasis;
  std::vector<CVec> wlevel = wbasis;
  for (const CVec& w : wbasis) mgs_append(all, w, 1e-9);
  for (int t = 1; t <= depth; ++t) {
    std::vector<CVec> next;
    for (const CVec& w : wlevel)
      for (const CMat& S : dil.S) {
        CVec img = S * w;
        next.push_back(img);
        mgs_append(all, std::move(img), 1e-9);
      }
    wlevel = std::move(next);
  }
  const CMat All = basis_matrix(all, amb);
  for (Eigen::Index b = 0; b < amb; ++b) {
    if (!dil.interior[static_cast<std::size_t>(b)]) continue;
    CVec v = CVec::Unit(amb, b);
    v -= All * (All.adjoint() * v);
    out.span_residual = std::max(out.span_residual, v.norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Star dilations of defect-free representations

Eigen::Index LevelChain::level_dim(int s) const {
  return static_cast<Eigen::Index>(words[static_cast<std::size_t>(s)].size()) * sigma.d;
}

CMat LevelChain::embed_from_origin(int t) const {
  CMat J = CMat::Identity(sigma.d, sigma.d);
  for (int s = 0; s < t; ++s) J = V[static_cast<std::size_t>(s)] * J;
  return J;
}

std::vector<CMat> LevelChain::compressed_E(int t) const {
  std::vector<CMat> out;
  for (const CMat& e : E[static_cast<std::size_t>(t)])
    out.push_back(V[static_cast<std::size_t>(t)].adjoint() * e);
  return out;
}

std::vector<CMat> LevelChain::compressed_F(int t) const {
  std::vector<CMat> out;
  for (const CMat& f : F[static_cast<std::size_t>(t)])
    out.push_back(V[static_cast<std::size_t>(t)].adjoint() * f);
  return out;
}

LevelChain star_dilate_defect_free(const FiniteRep& sigma, int s_max, unsigned word_order_seed,
                                   double tol, bool require_defect_free) {
  sigma.check_shapes();
  if (s_max < 1) throw std::invalid_argument("star_dilate_defect_free: s_max must be >= 1");
  const ValidationReport vr = validate(sigma, tol);
  if (require_defect_free && !vr.defect_free) {
    std::ostringstream os;
    os << "star_dilate_defect_free: representation is not defect free (residual e "
       << vr.defect_e << ", f " << vr.defect_f << ")";
    throw std::domain_error(os.str());
  }
  if (require_defect_free && !vr.row_contractive)
    throw std::domain_error("star_dilate_defect_free: representation is not row contractive");

  const UnitaryRelation& rel = sigma.rel;
  const int m = rel.m(), n = rel.n(), d = sigma.d;

  LevelChain ch;
  ch.sigma = sigma;
  ch.s_max = s_max;
  for (int s = 0; s <= s_max; ++s) {
    auto ws = words_of_degree(m, n, s, s);
    if (word_order_seed != 0) {
      std::mt19937 gen(word_order_seed + static_cast<unsigned>(s));
      std::shuffle(ws.begin(), ws.end(), gen);
    }
    ch.words.push_back(std::move(ws));
  }

  std::vector<std::map<NormalWord, Eigen::Index, WordLess>> widx(
      static_cast<std::size_t>(s_max + 1));
  for (int s = 0; s <= s_max; ++s)
    for (std::size_t t = 0; t < ch.words[static_cast<std::size_t>(s)].size(); ++t)
      widx[static_cast<std::size_t>(s)][ch.words[static_cast<std::size_t>(s)][t]] =
          static_cast<Eigen::Index>(t);

  std::vector<CMat> sig_block(static_cast<std::size_t>(m * n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      sig_block[static_cast<std::size_t>(i * n + j)] =
          sigma.E[static_cast<std::size_t>(i)] * sigma.F[static_cast<std::size_t>(j)];

  for (int s = 0; s < s_max; ++s) {
    const auto& cur = ch.words[static_cast<std::size_t>(s)];
    const Eigen::Index lo = static_cast<Eigen::Index>(cur.size()) * d;
    const Eigen::Index hi =
        static_cast<Eigen::Index>(ch.words[static_cast<std::size_t>(s + 1)].size()) * d;
    CMat V = CMat::Zero(hi, lo);
    std::vector<CMat> Es(static_cast<std::size_t>(m), CMat::Zero(hi, lo));
    std::vector<CMat> Fs(static_cast<std::size_t>(n), CMat::Zero(hi, lo));

    for (std::size_t wt = 0; wt < cur.size(); ++wt) {
      const NormalWord& w = cur[wt];
      const Eigen::Index col = static_cast<Eigen::Index>(wt) * d;
      // V: right insertion of the degree-(1,1) partition of unity.
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          for (const WordTerm& t :
               append_normalized(rel, w, {Gen{true, i}, Gen{false, j}})) {
            const Eigen::Index row = widx[static_cast<std::size_t>(s + 1)].at(t.word) * d;
            V.block(row, col, d, d) +=
                t.coeff * sig_block[static_cast<std::size_t>(i * n + j)].adjoint();
          }
        }
      // E_i: prepend e_i, fill with f_j on the right.
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          NormalWord z = w;
          z.e.insert(z.e.begin(), i);
          z.f.push_back(j);
          const Eigen::Index row = widx[static_cast<std::size_t>(s + 1)].at(z) * d;
          Es[static_cast<std::size_t>(i)].block(row, col, d, d) +=
              sigma.F[static_cast<std::size_t>(j)].adjoint();
        }
      // F_j: prepend f_j, fill with e_i on the right.
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) {
          std::vector<Gen> letters;
          letters.push_back(Gen{false, j});
          for (const Gen& g : letters_of(w)) letters.push_back(g);
          letters.push_back(Gen{true, i});
          for (const WordTerm& t : expand_to_normal(rel, letters)) {
            const Eigen::Index row = widx[static_cast<std::size_t>(s + 1)].at(t.word) * d;
            Fs[static_cast<std::size_t>(j)].block(row, col, d, d) +=
                t.coeff * sigma.E[static_cast<std::size_t>(i)].adjoint();
          }
        }
    }
    ch.V.push_back(std::move(V));
    ch.E.push_back(std::move(Es));
    ch.F.push_back(std::move(Fs));
  }

  // Diagnostics.
  for (int s = 0; s < s_max; ++s) {
    const CMat& V = ch.V[static_cast<std::size_t>(s)];
    ch.isometry_residual = std::max(
        ch.isometry_residual,
        opnorm(CMat(V.adjoint() * V - CMat::Identity(V.cols(), V.cols()))));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        CMat g = ch.E[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)].adjoint() *
                 ch.E[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
        if (i == j) g -= CMat::Identity(g.rows(), g.cols());
        ch.row_isometry_residual = std::max(ch.row_isometry_residual, opnorm(g));
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CMat g = ch.F[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)].adjoint() *
                 ch.F[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
        if (i == j) g -= CMat::Identity(g.rows(), g.cols());
        ch.row_isometry_residual = std::max(ch.row_isometry_residual, opnorm(g));
      }
  }
  for (int s = 0; s + 1 < s_max; ++s) {
    for (int i = 0; i < m; ++i)
      ch.chain_residual = std::max(
          ch.chain_residual,
          opnorm(CMat(ch.E[static_cast<std::size_t>(s + 1)][static_cast<std::size_t>(i)] *
                          ch.V[static_cast<std::size_t>(s)] -
                      ch.V[static_cast<std::size_t>(s + 1)] *
                          ch.E[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)])));
    for (int j = 0; j < n; ++j)
      ch.chain_residual = std::max(
          ch.chain_residual,
          opnorm(CMat(ch.F[static_cast<std::size_t>(s + 1)][static_cast<std::size_t>(j)] *
                          ch.V[static_cast<std::size_t>(s)] -
                      ch.V[static_cast<std::size_t>(s + 1)] *
                          ch.F[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)])));
  }
  {
    const int t = s_max - 1;
    const CMat J = ch.embed_from_origin(t);
    const auto Ec = ch.compressed_E(t);
    const auto Fc = ch.compressed_F(t);
    for (int i = 0; i < m; ++i)
      ch.compression_residual =
          std::max(ch.compression_residual,
                   (J.adjoint() * Ec[static_cast<std::size_t>(i)] * J -
                    sigma.E[static_cast<std::size_t>(i)])
                       .norm());
    for (int j = 0; j < n; ++j)
      ch.compression_residual =
          std::max(ch.compression_residual,
                   (J.adjoint() * Fc[static_cast<std::size_t>(j)] * J -
                    sigma.F[static_cast<std::size_t>(j)])
                       .norm());
    const Eigen::Index dim = ch.level_dim(t);
    CMat de = CMat::Zero(dim, dim), df = CMat::Zero(dim, dim);
    for (const CMat& x : Ec) de += x * x.adjoint();
    for (const CMat& x : Fc) df += x * x.adjoint();
    ch.defect_residual =
        std::max(opnorm(CMat(de - CMat::Identity(dim, dim))),
                 opnorm(CMat(df - CMat::Identity(dim, dim))));
  }
  return ch;
}

namespace {

// Chain-route coordinates of pi(w) h at the top level: apply the level maps
// letter by letter, then climb with the connecting isometries.
CMat chain_route_vectors(const LevelChain& ch, const NormalWord& w, int top) {
  CMat cur = CMat::Identity(ch.sigma.d, ch.sigma.d);
  int level = 0;
  std::vector<Gen> letters = letters_of(w);
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    const auto& maps = it->is_e ? ch.E[static_cast<std::size_t>(level)]
                                : ch.F[static_cast<std::size_t>(level)];
    cur = maps[static_cast<std::size_t>(it->index)] * cur;
    ++level;
  }
  for (int s = level; s < top; ++s) cur = ch.V[static_cast<std::size_t>(s)] * cur;
  return cur;
}

// Closed-form lift of (w, .) to common degree (S, S): a map from words of
// degree (S, S) to d x d coefficient blocks.
std::map<NormalWord, CMat, WordLess> closed_form_lift(const FiniteRep& sigma, const NormalWord& w,
                                                      int S) {
  const int m = sigma.rel.m(), n = sigma.rel.n(), d = sigma.d;
  std::map<NormalWord, CMat, WordLess> out;
  const int a = S - w.edeg(), b = S - w.fdeg();
  if (a < 0 || b < 0) throw std::invalid_argument("closed_form_lift: word too deep");
  for (const NormalWord& v : words_of_degree(m, n, a, b)) {
    CMat sv = CMat::Identity(d, d);
    for (int i : v.e) sv = sv * sigma.E[static_cast<std::size_t>(i)];
    for (int j : v.f) sv = sv * sigma.F[static_cast<std::size_t>(j)];
    for (const WordTerm& t : append_normalized(sigma.rel, w, letters_of(v))) {
      auto it = out.find(t.word);
      if (it == out.end()) it = out.emplace(t.word, CMat::Zero(d, d)).first;
      it->second += t.coeff * sv.adjoint();
    }
  }
  return out;
}

}  // namespace

UniquenessReport uniqueness_check(const FiniteRep& sigma, int s_max, int trials, unsigned seed) {
  const LevelChain ch1 = star_dilate_defect_free(sigma, s_max, 0);
  const LevelChain ch2 = star_dilate_defect_free(sigma, s_max, seed == 0 ? 1 : seed);
  const int m = sigma.rel.m(), n = sigma.rel.n(), d = sigma.d;

  // Sample words of length <= s_max (the chain route climbs one level per
  // letter).
  std::vector<NormalWord> sample;
  for (int len = 0; len <= std::min(2, s_max); ++len)
    for (int k = 0; k <= len; ++k)
      for (const NormalWord& w : words_of_degree(m, n, k, len - k)) sample.push_back(w);
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> lend(0, s_max);
  std::uniform_int_distribution<int> em(0, m - 1), fn(0, n - 1), coin(0, 1);
  for (int t = 0; t < trials; ++t) {
    NormalWord w;
    const int len = lend(gen);
    for (int q = 0; q < len; ++q) {
      if (coin(gen) == 1 && w.fdeg() == 0)
        w.e.push_back(em(gen));
      else
        w.f.push_back(fn(gen));
    }
    sample.push_back(w);
  }

  UniquenessReport rep;
  rep.pairs_checked = 0;
  const int top = s_max;
  std::vector<CMat> vec1, vec2;
  int S = 0;
  for (const NormalWord& w : sample) S = std::max({S, w.edeg(), w.fdeg()});
  for (const NormalWord& w : sample) {
    vec1.push_back(chain_route_vectors(ch1, w, top));
    vec2.push_back(chain_route_vectors(ch2, w, top));
  }
  std::vector<std::map<NormalWord, CMat, WordLess>> lifts;
  for (const NormalWord& w : sample) lifts.push_back(closed_form_lift(sigma, w, S));

  for (std::size_t a = 0; a < sample.size(); ++a)
    for (std::size_t b = 0; b < sample.size(); ++b) {
      const CMat ga = vec1[a].adjoint() * vec1[b];
      CMat gb = CMat::Zero(d, d);
      for (const auto& [z, Ma] : lifts[a]) {
        auto it = lifts[b].find(z);
        if (it != lifts[b].end()) gb += Ma.adjoint() * it->second;
      }
      rep.gram_deviation = std::max(rep.gram_deviation, (ga - gb).cwiseAbs().maxCoeff());
      const CMat gc = vec2[a].adjoint() * vec2[b];
      rep.correspondence_deviation =
          std::max(rep.correspondence_deviation, (ga - gc).cwiseAbs().maxCoeff());
      ++rep.pairs_checked;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Two-family dilation

DilationResult solel_dilate(const FiniteRep& sigma, int depth, double tol,
                            Eigen::Index ambient_limit) {
  sigma.check_shapes();
  if (depth < 2) throw std::invalid_argument("solel_dilate: depth must be >= 2");
  const ValidationReport vr = validate(sigma, tol);
  if (vr.row_norm_e > 1.0 + tol || vr.row_norm_f > 1.0 + tol)
    throw std::domain_error("solel_dilate: not row contractive");

  const UnitaryRelation& rel = sigma.rel;
  const int m = rel.m(), n = rel.n(), d = sigma.d, mn = m * n;

  const TruncFock fk = build_fock(rel, depth, depth, 200000, depth);
  const Eigen::Index df = fk.dim();
  const Eigen::Index amb = d + static_cast<Eigen::Index>(mn) * d * df;
  if (amb > ambient_limit)
    throw std::invalid_argument("solel_dilate: truncated space exceeds the ambient limit");

  const CMat Re = hstack(sigma.E), Rf = hstack(sigma.F);
  const CMat De = psd_sqrt(CMat(CMat::Identity(m * d, m * d) - Re.adjoint() * Re));
  const CMat Df = psd_sqrt(CMat(CMat::Identity(n * d, n * d) - Rf.adjoint() * Rf));

  auto kindex = [&](Eigen::Index vh, Eigen::Index x) { return d + vh * df + x; };

  std::vector<CMat> S(static_cast<std::size_t>(m), CMat::Zero(amb, amb));
  std::vector<CMat> T(static_cast<std::size_t>(n), CMat::Zero(amb, amb));
  for (int i = 0; i < m; ++i) {
    CMat& Si = S[static_cast<std::size_t>(i)];
    Si.topLeftCorner(d, d) = sigma.E[static_cast<std::size_t>(i)];
    for (Eigen::Index r = 0; r < m * d; ++r)
      for (Eigen::Index h = 0; h < d; ++h) {
        const Scalar v = De(r, i * d + h);
        if (v != Scalar(0.0)) Si(kindex(r, 0), h) = v;
      }
    const CMat lam = CMat(fk.creation_e(i));
    for (Eigen::Index vh = 0; vh < mn * d; ++vh)
      for (Eigen::Index c = 0; c < df; ++c)
        for (Eigen::Index rr = 0; rr < df; ++rr) {
          const Scalar v = lam(rr, c);
          if (v != Scalar(0.0)) Si(kindex(vh, rr), kindex(vh, c)) = v;
        }
  }
  for (int j = 0; j < n; ++j) {
    CMat& Tj = T[static_cast<std::size_t>(j)];
    Tj.topLeftCorner(d, d) = sigma.F[static_cast<std::size_t>(j)];
    for (Eigen::Index r = 0; r < n * d; ++r)
      for (Eigen::Index h = 0; h < d; ++h) {
        const Scalar v = Df(r, j * d + h);
        if (v != Scalar(0.0)) Tj(kindex(r, 0), h) = v;
      }
    const CMat lam = CMat(fk.creation_f(j));
    for (Eigen::Index vh = 0; vh < mn * d; ++vh)
      for (Eigen::Index c = 0; c < df; ++c)
        for (Eigen::Index rr = 0; rr < df; ++rr) {
          const Scalar v = lam(rr, c);
          if (v != Scalar(0.0)) Tj(kindex(vh, rr), kindex(vh, c)) = v;
        }
  }

  // The two alternating-product dilations of the mn-tuple.
  std::vector<CMat> TS(static_cast<std::size_t>(mn));
  for (int ip = 0; ip < m; ++ip)
    for (int jp = 0; jp < n; ++jp)
      TS[static_cast<std::size_t>(ip * n + jp)] =
          T[static_cast<std::size_t>(jp)] * S[static_cast<std::size_t>(ip)];
  std::vector<CMat> pi1, pi2, gens;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      pi1.push_back(S[static_cast<std::size_t>(i)] * T[static_cast<std::size_t>(j)]);
      CMat p2 = CMat::Zero(amb, amb);
      for (int ip = 0; ip < m; ++ip)
        for (int jp = 0; jp < n; ++jp) {
          const Scalar c = rel.u()(i * n + j, ip * n + jp);
          if (c != Scalar(0.0)) p2 += c * TS[static_cast<std::size_t>(ip * n + jp)];
        }
      pi2.push_back(std::move(p2));
      gens.push_back(sigma.E[static_cast<std::size_t>(i)] * sigma.F[static_cast<std::size_t>(j)]);
    }

  CMat J = CMat::Zero(amb, d);
  J.topLeftCorner(d, d) = CMat::Identity(d, d);

  const int n2 = depth / 2;
  const auto words = free_words_up_to(mn, n2);
  std::map<FreeWord, Eigen::Index> widx;
  for (std::size_t t = 0; t < words.size(); ++t) widx[words[t]] = static_cast<Eigen::Index>(t);
  const Eigen::Index W = static_cast<Eigen::Index>(words.size());

  auto orbit = [&](const std::vector<CMat>& pis) {
    CMat X(amb, W * d);
    for (Eigen::Index t = 0; t < W; ++t) {
      const FreeWord& x = words[static_cast<std::size_t>(t)];
      if (x.empty()) {
        X.middleCols(t * d, d) = J;
      } else {
        const FreeWord rest(x.begin() + 1, x.end());
        X.middleCols(t * d, d) =
            pis[static_cast<std::size_t>(x.front())] * X.middleCols(widx.at(rest) * d, d);
      }
    }
    return X;
  };
  const CMat X1 = orbit(pi1), X2 = orbit(pi2);

  CMat G(W * d, W * d);
  for (Eigen::Index a = 0; a < W; ++a)
    for (Eigen::Index b = 0; b < W; ++b)
      G.block(a * d, b * d, d, d) =
          gram_oracle(gens, words[static_cast<std::size_t>(a)], words[static_cast<std::size_t>(b)]);
  const CMat C = gram_orthonormalize(G, d);
  const CMat Q1 = X1 * C, Q2 = X2 * C;

  // Wandering complements and the orbit bases. Alongside the full basis,
  // collect the structured columns (minimal orbit and wandering orbit with
  // one word of headroom); those are where the matching is meaningful.
  auto build_full_basis = [&](const std::vector<CMat>& pis, const CMat& Q, CMat* structured) {
    std::vector<CVec> basis;
    for (Eigen::Index c = 0; c < Q.cols(); ++c) basis.push_back(Q.col(c));
    CMat def = CMat::Identity(amb, amb);
    for (const CMat& pg : pis) def -= pg * pg.adjoint();
    std::vector<CVec> omegas;
    for (Eigen::Index b = d; b < amb; ++b) {
      CVec v = CVec::Unit(amb, b);
      v -= Q * (Q.adjoint() * v);
      v = def * v;
      v -= Q * (Q.adjoint() * v);
      if (mgs_append(basis, v, 1e-7)) omegas.push_back(basis.back());
    }
    std::vector<CVec> inner;
    std::vector<CVec> level = omegas;
    for (const CVec& w : omegas) inner.push_back(w);
    for (int t = 1; t <= n2; ++t) {
      std::vector<CVec> next;
      for (const CVec& w : level)
        for (const CMat& pg : pis) {
          CVec img = pg * w;
          if (t <= n2 - 1) inner.push_back(img);
          if (mgs_append(basis, img, 1e-7)) next.push_back(basis.back());
        }
      level = std::move(next);
    }
    for (Eigen::Index b = 0; b < amb && static_cast<Eigen::Index>(basis.size()) < amb; ++b)
      mgs_append(basis, CVec(CVec::Unit(amb, b)), 1e-7);
    if (static_cast<Eigen::Index>(basis.size()) != amb)
      throw std::runtime_error("solel_dilate: basis completion failed");
    if (structured) *structured = basis_matrix(inner, amb);
    return basis_matrix(basis, amb);
  };
  CMat wander1;
  const CMat B1 = build_full_basis(pi1, Q1, &wander1);
  const CMat B2 = build_full_basis(pi2, Q2, nullptr);

  // Matching unitary, polished so the original space is fixed exactly.
  const CMat Wraw = B2 * B1.adjoint();
  CMat Wfix = CMat::Zero(amb, amb);
  Wfix.topLeftCorner(d, d) = CMat::Identity(d, d);
  {
    const CMat K = Wraw.block(d, d, amb - d, amb - d);
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat(K.adjoint() * K));
    CMat isqrt = CMat::Zero(amb - d, amb - d);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index t = 0; t < ev.size(); ++t) {
      const double lam = std::max(ev[t], 1e-300);
      isqrt += es.eigenvectors().col(t) * (1.0 / std::sqrt(lam)) *
               es.eigenvectors().col(t).adjoint();
    }
    Wfix.block(d, d, amb - d, amb - d) = K * isqrt;
  }

  DilationResult out;
  out.ambient_dim = amb;
  out.J = J;
  for (int i = 0; i < m; ++i) out.S.push_back(S[static_cast<std::size_t>(i)] * Wfix);
  for (int j = 0; j < n; ++j) out.T.push_back(Wfix.adjoint() * T[static_cast<std::size_t>(j)]);

  out.interior.assign(static_cast<std::size_t>(amb), false);
  for (Eigen::Index h = 0; h < d; ++h) out.interior[static_cast<std::size_t>(h)] = true;
  for (Eigen::Index vh = 0; vh < mn * d; ++vh)
    for (Eigen::Index x = 0; x < df; ++x)
      if (fk.basis()[static_cast<std::size_t>(x)].length() + 2 <= depth)
        out.interior[static_cast<std::size_t>(kindex(vh, x))] = true;

  out.minimal_basis = Q1;
  for (int i = 0; i < m; ++i)
    out.minimal_S.push_back(Q1.adjoint() * out.S[static_cast<std::size_t>(i)] * Q1);
  for (int j = 0; j < n; ++j)
    out.minimal_T.push_back(Q1.adjoint() * out.T[static_cast<std::size_t>(j)] * Q1);

  // Diagnostics. The matching unitary intertwines the two constructions on
  // the structured part of the space (minimal orbit + wandering orbit), so
  // residuals are evaluated on those vectors: the orbit of H under the
  // returned generators with one word of headroom, and the wandering orbit.
  CMat test(amb, 0);
  {
    std::vector<CVec> cols;
    std::vector<CMat> level{J};
    for (Eigen::Index h = 0; h < d; ++h) cols.push_back(J.col(h));
    for (int t = 1; t + 1 <= n2; ++t) {
      std::vector<CMat> next;
      for (const CMat& blk : level)
        for (int g = 0; g < mn; ++g) {
          CMat img = out.S[static_cast<std::size_t>(g / n)] *
                     (out.T[static_cast<std::size_t>(g % n)] * blk);
          for (Eigen::Index h = 0; h < d; ++h) cols.push_back(img.col(h));
          next.push_back(std::move(img));
        }
      level = std::move(next);
    }
    for (Eigen::Index c = 0; c < wander1.cols(); ++c) cols.push_back(wander1.col(c));
    test = basis_matrix(cols, amb);
  }

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      CMat g = out.S[static_cast<std::size_t>(i)].adjoint() *
               (out.S[static_cast<std::size_t>(j)] * test);
      if (i == j) g -= test;
      out.isometry_residual = std::max(out.isometry_residual, g.norm());
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CMat g = out.T[static_cast<std::size_t>(i)].adjoint() *
               (out.T[static_cast<std::size_t>(j)] * test);
      if (i == j) g -= test;
      out.isometry_residual = std::max(out.isometry_residual, g.norm());
    }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      CMat resid = out.S[static_cast<std::size_t>(i)] *
                   (out.T[static_cast<std::size_t>(j)] * test);
      for (int ip = 0; ip < m; ++ip)
        for (int jp = 0; jp < n; ++jp) {
          const Scalar c = rel.u()(i * n + j, ip * n + jp);
          if (c != Scalar(0.0))
            resid -= c * (out.T[static_cast<std::size_t>(jp)] *
                          (out.S[static_cast<std::size_t>(ip)] * test));
        }
      out.commutation_residual = std::max(out.commutation_residual, resid.norm());
    }
  for (int i = 0; i < m; ++i)
    out.compression_residual = std::max(
        out.compression_residual,
        (J.adjoint() * out.S[static_cast<std::size_t>(i)] * J - sigma.E[static_cast<std::size_t>(i)])
            .norm());
  for (int j = 0; j < n; ++j)
    out.compression_residual = std::max(
        out.compression_residual,
        (J.adjoint() * out.T[static_cast<std::size_t>(j)] * J - sigma.F[static_cast<std::size_t>(j)])
            .norm());

  // Defect identities hold on the orbit of H when sigma is defect free
  // (minimal row-isometric dilations of defect-free representations stay
  // defect free); measured on the orbit with headroom.
  {
    std::vector<CVec> cols;
    std::vector<CMat> level{J};
    for (Eigen::Index h = 0; h < d; ++h) cols.push_back(J.col(h));
    for (int t = 1; t + 1 <= n2; ++t) {
      std::vector<CMat> next;
      for (const CMat& blk : level)
        for (int g = 0; g < mn; ++g) {
          CMat img = out.S[static_cast<std::size_t>(g / n)] *
                     (out.T[static_cast<std::size_t>(g % n)] * blk);
          for (Eigen::Index h = 0; h < d; ++h) cols.push_back(img.col(h));
          next.push_back(std::move(img));
        }
      level = std::move(next);
    }
    const CMat orbit = basis_matrix(cols, amb);
    CMat de = orbit, dfm = orbit;
    for (const CMat& x : out.S) de -= x * (x.adjoint() * orbit);
    for (const CMat& x : out.T) dfm -= x * (x.adjoint() * orbit);
    out.defect_residual = std::max(de.norm(), dfm.norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Atomic star dilation

namespace {

struct WeightedUF {
  std::vector<int> parent;
  std::vector<Scalar> phase;  // vec(node) = phase * vec(parent)

  explicit WeightedUF(int size) : parent(static_cast<std::size_t>(size)), phase(static_cast<std::size_t>(size), Scalar(1.0)) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  std::pair<int, Scalar> find(int x) {
    if (parent[static_cast<std::size_t>(x)] == x) return {x, Scalar(1.0)};
    auto [root, ph] = find(parent[static_cast<std::size_t>(x)]);
    parent[static_cast<std::size_t>(x)] = root;
    phase[static_cast<std::size_t>(x)] *= ph;
    return {root, phase[static_cast<std::size_t>(x)]};
  }

  // vec(a) = ratio * vec(b); returns false on an inconsistent rejoin.
  bool unite(int a, int b, Scalar ratio) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return std::abs(pa - ratio * pb) < 1e-9;
    parent[static_cast<std::size_t>(ra)] = rb;
    phase[static_cast<std::size_t>(ra)] = ratio * pb / pa;
    return true;
  }
};

}  // namespace

AtomicDilation atomic_star_dilate(const AtomicRep& a, int depth) {
  check_atomic(a);
  if (depth < 0) throw std::invalid_argument("atomic_star_dilate: depth must be >= 0");
  if (atomic_commutation_residual(a) > 1e-12)
    throw std::invalid_argument("atomic_star_dilate: commutation squares do not close");

  const PermRelation& rel = a.rel;
  const int m = rel.m(), n = rel.n(), V = a.vertices;

  // Unique predecessors; absence or duplication is the defect-free failure.
  std::vector<std::tuple<int, int, Scalar>> epred(static_cast<std::size_t>(V), {-1, -1, Scalar(0.0)});
  std::vector<std::tuple<int, int, Scalar>> fpred(static_cast<std::size_t>(V), {-1, -1, Scalar(0.0)});
  for (int i = 0; i < m; ++i)
    for (const auto& [src, tgt] : a.e_edge[static_cast<std::size_t>(i)]) {
      if (std::get<0>(epred[static_cast<std::size_t>(tgt.first)]) != -1)
        throw std::domain_error("atomic_star_dilate: vertex " + std::to_string(tgt.first) +
                                " has two incoming e-edges");
      epred[static_cast<std::size_t>(tgt.first)] = {i, src, tgt.second};
    }
  for (int j = 0; j < n; ++j)
    for (const auto& [src, tgt] : a.f_edge[static_cast<std::size_t>(j)]) {
      if (std::get<0>(fpred[static_cast<std::size_t>(tgt.first)]) != -1)
        throw std::domain_error("atomic_star_dilate: vertex " + std::to_string(tgt.first) +
                                " has two incoming f-edges");
      fpred[static_cast<std::size_t>(tgt.first)] = {j, src, tgt.second};
    }
  for (int k = 0; k < V; ++k) {
    if (std::get<0>(epred[static_cast<std::size_t>(k)]) == -1)
      throw std::domain_error("atomic_star_dilate: vertex " + std::to_string(k) +
                              " has no incoming e-edge (not defect free)");
    if (std::get<0>(fpred[static_cast<std::size_t>(k)]) == -1)
      throw std::domain_error("atomic_star_dilate: vertex " + std::to_string(k) +
                              " has no incoming f-edge (not defect free)");
  }

  if (depth == 0) {
    AtomicDilation out;
    out.graph = a;
    for (int k = 0; k < V; ++k) {
      out.classes.emplace(std::make_pair(NormalWord{}, k), std::make_pair(k, Scalar(1.0)));
      out.original_vertex_class.push_back(k);
    }
    out.interior.assign(static_cast<std::size_t>(V), false);
    return out;
  }

  // Materialized pairs (word, vertex) with degree <= (depth, depth).
  std::vector<NormalWord> words;
  for (int k = 0; k <= depth; ++k)
    for (int l = 0; l <= depth; ++l)
      for (NormalWord& w : words_of_degree(m, n, k, l)) words.push_back(std::move(w));
  std::map<NormalWord, int, WordLess> widx;
  for (std::size_t t = 0; t < words.size(); ++t) widx[words[t]] = static_cast<int>(t);
  const int P = static_cast<int>(words.size()) * V;
  auto pidx = [&](int w, int k) { return w * V + k; };

  WeightedUF uf(P);
  for (std::size_t wt = 0; wt < words.size(); ++wt) {
    const NormalWord& w = words[wt];
    for (int k = 0; k < V; ++k) {
      // vec(w, k) = (1/alpha) vec(w e_i0, k0) with sigma(e_i0) zeta_k0 = alpha xi_k.
      if (w.edeg() + 1 <= depth) {
        const auto& [i0, k0, alpha] = epred[static_cast<std::size_t>(k)];
        const NormalWord z = multiply(rel, w, NormalWord{{i0}, {}});
        if (!uf.unite(pidx(static_cast<int>(wt), k), pidx(widx.at(z), k0),
                      Scalar(1.0) / alpha))
          throw std::logic_error("atomic_star_dilate: inconsistent e-lift");
      }
      if (w.fdeg() + 1 <= depth) {
        const auto& [j0, k0, beta] = fpred[static_cast<std::size_t>(k)];
        const NormalWord z = multiply(rel, w, NormalWord{{}, {j0}});
        if (!uf.unite(pidx(static_cast<int>(wt), k), pidx(widx.at(z), k0),
                      Scalar(1.0) / beta))
          throw std::logic_error("atomic_star_dilate: inconsistent f-lift");
      }
    }
  }

  // Classes, canonical representatives, and relative phases.
  std::map<int, std::vector<int>> members;
  for (int t = 0; t < P; ++t) members[uf.find(t).first].push_back(t);

  AtomicDilation out;
  out.classes = decltype(out.classes)();
  std::vector<std::pair<NormalWord, int>> rep_of_class;
  std::map<int, int> root_to_class;
  for (const auto& [root, mem] : members) {
    std::pair<NormalWord, int> best{words[static_cast<std::size_t>(mem.front() / V)],
                                    mem.front() % V};
    for (int t : mem) {
      std::pair<NormalWord, int> cand{words[static_cast<std::size_t>(t / V)], t % V};
      if (WordVertexLess{}(cand, best)) best = cand;
    }
    root_to_class[root] = static_cast<int>(rep_of_class.size());
    rep_of_class.push_back(best);
  }
  const int NC = static_cast<int>(rep_of_class.size());

  auto locate = [&](const NormalWord& w, int k) -> std::pair<int, Scalar> {
    auto [root, ph] = uf.find(pidx(widx.at(w), k));
    const int cls = root_to_class.at(root);
    const auto& rep = rep_of_class[static_cast<std::size_t>(cls)];
    auto [rroot, rph] = uf.find(pidx(widx.at(rep.first), rep.second));
    // vec(w,k) = ph * vec(root), vec(rep) = rph * vec(root)
    return {cls, ph / rph};
  };
  for (std::size_t wt = 0; wt < words.size(); ++wt)
    for (int k = 0; k < V; ++k)
      out.classes.emplace(std::make_pair(words[wt], k), locate(words[wt], k));

  // Edges by left multiplication, checked across all in-range members.
  out.graph.rel = rel;
  out.graph.vertices = NC;
  out.graph.e_edge.assign(static_cast<std::size_t>(m), {});
  out.graph.f_edge.assign(static_cast<std::size_t>(n), {});
  auto place_edge = [&](std::map<int, std::pair<int, Scalar>>& edges, int src, int dst, Scalar c) {
    auto it = edges.find(src);
    if (it == edges.end()) {
      edges[src] = {dst, c};
      return;
    }
    if (it->second.first != dst || std::abs(it->second.second - c) > 1e-9)
      throw std::logic_error("atomic_star_dilate: inconsistent edge across class members");
  };
  for (const auto& [pair, loc] : out.classes) {
    const auto& [w, k] = pair;
    const auto& [cls, ph] = loc;
    for (int i = 0; i < m; ++i) {
      if (w.edeg() + 1 > depth) continue;
      NormalWord z = w;
      z.e.insert(z.e.begin(), i);
      const auto [cls2, ph2] = locate(z, k);
      // pi(e_i) (ph^{-1} vec(w,k) as the class vector) = (ph2/ph) vec(cls2)
      place_edge(out.graph.e_edge[static_cast<std::size_t>(i)], cls, cls2, ph2 / ph);
    }
    for (int j = 0; j < n; ++j) {
      if (w.fdeg() + 1 > depth) continue;
      std::vector<Gen> letters;
      letters.push_back(Gen{false, j});
      for (const Gen& g : letters_of(w)) letters.push_back(g);
      const NormalWord z = normalize(rel, letters);
      const auto [cls2, ph2] = locate(z, k);
      place_edge(out.graph.f_edge[static_cast<std::size_t>(j)], cls, cls2, ph2 / ph);
    }
  }
  check_atomic(out.graph);

  out.original_vertex_class.resize(static_cast<std::size_t>(V));
  for (int k = 0; k < V; ++k) {
    const auto [cls, ph] = locate(NormalWord{}, k);
    out.original_vertex_class[static_cast<std::size_t>(k)] = cls;
    if (std::abs(ph - Scalar(1.0)) > 1e-12)
      throw std::logic_error("atomic_star_dilate: original vertex carries a phase");
  }

  out.interior.assign(static_cast<std::size_t>(NC), false);
  for (int c = 0; c < NC; ++c) {
    const auto& rep = rep_of_class[static_cast<std::size_t>(c)];
    out.interior[static_cast<std::size_t>(c)] =
        rep.first.edeg() + 1 <= depth && rep.first.fdeg() + 1 <= depth;
  }
  return out;
}

}  // namespace dilab
