#pragma once

#include <unordered_map>
#include <vector>

#include "dilab/types.hpp"
#include "dilab/urelations.hpp"
#include "dilab/words.hpp"

namespace dilab {

// The Fock space of the relation truncated by degree: basis vectors are the
// normal words with e-degree <= K, f-degree <= L (and, optionally, total
// length <= max_len). Creation operators annihilate across the boundary,
// i.e. they are the compressions of the untruncated creations, so norms of
// polynomials in them are honest lower bounds. Basis order is graded-lex,
// fixed for bit-reproducible matrices.
class TruncFock {
 public:
  TruncFock(UnitaryRelation rel, int K, int L, std::size_t basis_limit = 200000,
            int max_len = -1);

  const UnitaryRelation& rel() const { return rel_; }
  int K() const { return K_; }
  int L() const { return L_; }
  int max_len() const { return max_len_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  const std::vector<NormalWord>& basis() const { return basis_; }

  // -1 when the word is outside the truncation.
  Eigen::Index index_of(const NormalWord& w) const;

  const SpMat& creation_e(int i) const { return cre_e_.at(i); }
  const SpMat& creation_f(int j) const { return cre_f_.at(j); }

  // lambda(w) as a product of truncated creations.
  SpMat lambda(const NormalWord& w) const;

  // Columns with room for `r` more letters of each kind before hitting the
  // cutoff. Isometry and commutation identities are exact on r = 1 columns.
  std::vector<bool> interior_mask(int r = 1) const;

 private:
  UnitaryRelation rel_;
  int K_, L_, max_len_;
  std::vector<NormalWord> basis_;
  std::unordered_map<NormalWord, Eigen::Index, WordHash> index_;
  std::vector<SpMat> cre_e_, cre_f_;
};

TruncFock build_fock(const UnitaryRelation& rel, int K, int L,
                     std::size_t basis_limit = 200000, int max_len = -1);

// A polynomial with matrix coefficients: sum of coeff (x) word. All
// coefficient blocks share one p x q shape and words are distinct.
struct MatPoly {
  std::vector<std::pair<CMat, NormalWord>> terms;

  Eigen::Index coeff_rows() const { return terms.empty() ? 1 : terms.front().first.rows(); }
  Eigen::Index coeff_cols() const { return terms.empty() ? 1 : terms.front().first.cols(); }
  void validate() const;
};

MatPoly scalar_poly(const std::vector<std::pair<Scalar, NormalWord>>& terms);

// sum_t coeff_t (x) lambda(word_t) on the truncated basis.
SpMat apply_poly(const TruncFock& fk, const MatPoly& x);

// Compression norms ||P_c lambda(x) P_c|| at square cutoffs (c, c) for
// c = 1..max_cutoff. The sequence is nondecreasing and every entry is a
// lower bound for the untruncated norm.
std::vector<double> norm_lower_seq(const UnitaryRelation& rel, const MatPoly& x,
                                   int max_cutoff, std::size_t basis_limit = 200000);

// P = I - sum_i L_i L_i*, Q = I - sum_j L_j L_j*. P projects onto the pure-f
// span, Q onto the pure-e span, and PQ = QP is the rank-one projection onto
// the vacuum.
std::pair<SpMat, SpMat> boundary_projections(const TruncFock& fk);

}  // namespace dilab
