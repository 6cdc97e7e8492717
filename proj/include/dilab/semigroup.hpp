#pragma once

#include <cstdint>
#include <vector>

#include "dilab/words.hpp"

namespace dilab {

// Commutation data for a rank-2 single-vertex semigroup: a bijection
// theta of {0..m-1} x {0..n-1} encoding the relations
//   e_i f_j = f_{j'} e_{i'}   where theta(i, j) = (i', j').
// Pairs are flattened as i*n + j.
class PermRelation {
 public:
  PermRelation() : PermRelation(1, 1, {0}) {}  // the trivial relation
  PermRelation(int m, int n, std::vector<int> table);

  int m() const { return m_; }
  int n() const { return n_; }
  const std::vector<int>& table() const { return fwd_; }

  int pair_index(int i, int j) const { return i * n_ + j; }
  std::pair<int, int> pair_of(int idx) const { return {idx / n_, idx % n_}; }

  // theta(i, j) = (i', j').
  std::pair<int, int> theta(int i, int j) const;
  // theta^{-1}(i', j') = (i, j).
  std::pair<int, int> theta_inv(int ip, int jp) const;

 private:
  int m_, n_;
  std::vector<int> fwd_, inv_;
};

// e_i f_j = f_{j'} e_{i'}; returns (j', i').
std::pair<int, int> commute_ef(const PermRelation& rel, int i, int j);

// Left-to-right rewriting to the unique e-first normal form.
NormalWord normalize(const PermRelation& rel, const std::vector<Gen>& letters);

// The unique factorization of w matching the pattern p. Requires p to have
// exactly edeg(w) E's and fdeg(w) F's.
std::vector<Gen> factor(const PermRelation& rel, const NormalWord& w, const Pattern& p);

NormalWord multiply(const PermRelation& rel, const NormalWord& a, const NormalWord& b);

// True when g = q * (e_i f_j) for some q; on success q is written out.
// The quotient is unique when it exists.
bool divide_right_block(const PermRelation& rel, const NormalWord& g, int i, int j,
                        NormalWord* quotient);

// All normal words of degree exactly (k, l), in graded-lex order.
std::vector<NormalWord> words_of_degree(int m, int n, int k, int l);

// Isomorphism classes of the semigroups over all (mn)! permutations.
// Two relations are isomorphic when one table maps to the other under a
// relabeling of the e's, a relabeling of the f's, or (when m == n) an
// exchange of the two families. Each class lists its tables with the
// lexicographically least one first.
struct ClassifyResult {
  int m = 0, n = 0;
  std::vector<std::vector<std::vector<int>>> classes;
  std::size_t permutation_count = 0;
};

ClassifyResult classify(int m, int n, std::size_t max_permutations = 40320);

// Canonical form (lex-least table over the isomorphism orbit).
std::vector<int> canonical_table(const PermRelation& rel);
bool is_isomorphic(const PermRelation& a, const PermRelation& b);

// Common 2x2 relations.
PermRelation flip_relation();             // theta(i,j) = (j,i)
PermRelation forward_cycle_relation();    // 3-cycle (1,1)->(1,2)->(2,1)->(1,1)
PermRelation reverse_cycle_relation();    // 3-cycle (1,1)->(2,1)->(1,2)->(1,1)
PermRelation identity_relation(int m, int n);

}  // namespace dilab
