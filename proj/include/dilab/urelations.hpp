#pragma once

#include <optional>
#include <vector>

#include "dilab/semigroup.hpp"
#include "dilab/types.hpp"
#include "dilab/words.hpp"

namespace dilab {

// Commutation data given by a unitary u in M_{mn}(C):
//   e_i (x) f_j = sum_{i',j'} u[(i,j),(i',j')] f_{j'} (x) e_{i'}.
// Rows are indexed by (i,j) and columns by (i',j'), both flattened
// lexicographically as i*n + j. Construction rejects a non-unitary u.
class UnitaryRelation {
 public:
  UnitaryRelation();  // the trivial 1x1 relation
  UnitaryRelation(int m, int n, CMat u, double tau_unitary = 1e-10);

  int m() const { return m_; }
  int n() const { return n_; }
  const CMat& u() const { return u_; }

  // Set when u is exactly a 0/1 permutation matrix.
  const std::optional<PermRelation>& perm() const { return perm_; }
  bool is_permutation() const { return perm_.has_value(); }

 private:
  int m_, n_;
  CMat u_;
  std::optional<PermRelation> perm_;
};

UnitaryRelation from_perm(const PermRelation& rel);

// Coefficient reindexing for a single adjacent pair.
// ef_to_fe: input over (i,j) flattened i*n+j, output over (j',i')
// flattened j'*m+i'. fe_to_ef is its inverse.
CVec ef_to_fe(const UnitaryRelation& rel, const CVec& c);
CVec fe_to_ef(const UnitaryRelation& rel, const CVec& c);

// A coefficient array over one tensor-product pattern of E = C^m and
// F = C^n. data is flattened with the first letter slowest (the letter at
// position p has extent m or n and stride = product of later extents).
struct TensorCoeffs {
  Pattern pattern;
  CVec data;
};

TensorCoeffs indicator(const UnitaryRelation& rel, const std::vector<Gen>& letters);
std::size_t pattern_size(const UnitaryRelation& rel, const Pattern& p);

// Reindexes src onto dst_pattern by adjacent (E,F) moves, commuting the
// leftmost out-of-place pair first. The result does not depend on the
// route; that is a tested property, not an assumption.
TensorCoeffs pattern_transform(const UnitaryRelation& rel, const TensorCoeffs& src,
                               const Pattern& dst_pattern);

// A finitely supported combination of normal words.
struct WordTerm {
  NormalWord word;
  Scalar coeff;
};

// Expands a raw generator sequence into its e-first form. For a
// permutation relation this is a single word with coefficient 1;
// in general it is a combination obtained from the u-moves.
std::vector<WordTerm> expand_to_normal(const UnitaryRelation& rel,
                                       const std::vector<Gen>& letters);

// Right concatenation on an already-normal word, expanded to e-first form.
std::vector<WordTerm> append_normalized(const UnitaryRelation& rel, const NormalWord& w,
                                        const std::vector<Gen>& suffix);

}  // namespace dilab
