#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dilab/types.hpp"
#include "dilab/urelations.hpp"
#include "dilab/words.hpp"

namespace dilab {

// A representation by d x d matrices: E[i] = sigma(e_i), F[j] = sigma(f_j).
struct FiniteRep {
  UnitaryRelation rel;
  int d = 0;
  std::vector<CMat> E, F;

  void check_shapes() const;
};

struct ValidationReport {
  double commutation_residual = 0.0;
  double row_norm_e = 0.0, row_norm_f = 0.0;
  double defect_e = 0.0, defect_f = 0.0;        // ||sum XX* - I||
  double isom_gram_e = 0.0, isom_gram_f = 0.0;  // ||(X_a* X_b) - I||
  double partial_isometry_residual = 0.0;       // max ||XX*X - X||
  bool row_contractive = false;
  bool partially_isometric = false;
  bool defect_free = false;
  bool row_isometric = false;
  // Finite-dimensional row isometries need m = 1 (resp. n = 1); the report
  // flags when the family size alone rules them out.
  bool row_isometry_possible_e = false;
  bool row_isometry_possible_f = false;

  std::string summary() const;
};

ValidationReport validate(const FiniteRep& rep, double tol = 1e-9);

// A representation that permutes a basis up to unimodular scalars. Each
// generator is a partial injective map vertex -> (vertex, scalar).
struct AtomicRep {
  PermRelation rel;
  int vertices = 0;
  // e_edge[i][src] = (dst, scalar) when defined.
  std::vector<std::map<int, std::pair<int, Scalar>>> e_edge, f_edge;
};

// Structural validity: indices in range, scalars unimodular, each
// generator injective. Throws on violation.
void check_atomic(const AtomicRep& a);

// Max deviation of the commutation squares e_i f_j = f_{j'} e_{i'}
// as partial maps (including domains). 0 for an honest representation.
double atomic_commutation_residual(const AtomicRep& a);

// Every vertex has exactly one incoming e-edge over all i and one
// incoming f-edge over all j.
bool atomic_defect_free(const AtomicRep& a);

FiniteRep atomic_to_matrices(const AtomicRep& a);

// Cyclic-shift construction: vertex x receives its e-edge from x - ashift
// with color ecolor[x] and scalar escalar[x], and its f-edge from
// x - bshift likewise. In-degrees are 1 by construction; the commutation
// squares must be checked with atomic_commutation_residual.
AtomicRep shift_atomic(const PermRelation& rel, int vertices, int ashift, int bshift,
                       const std::vector<int>& ecolor, const std::vector<int>& fcolor,
                       const std::vector<Scalar>& escalar, const std::vector<Scalar>& fscalar);

// An eventually periodic infinite word of degree-(1,1) blocks
// (i_0, j_0)(i_1, j_1)...; block(s) looks up prefix then cycle.
struct Tail {
  std::vector<std::pair<int, int>> prefix;
  std::vector<std::pair<int, int>> cycle;

  Tail() : cycle{{0, 0}} {}
  Tail(std::vector<std::pair<int, int>> pre, std::vector<std::pair<int, int>> cyc);

  std::pair<int, int> block(int s) const;
};

// A vector in the inductive-limit space of a tail representation,
// held exactly: a level s >= 0 plus a finitely supported coefficient
// array per degree. Generators and their adjoints act exactly; adjoints
// descend to deeper levels as needed, so no truncation error ever enters.
class TailVector {
 public:
  TailVector(const UnitaryRelation& rel, const Tail& tail, int level, const NormalWord& w);

  int level() const { return level_; }
  const std::map<std::pair<int, int>, CVec>& components() const { return comp_; }

  void descend();  // re-express at level + 1
  void descend_to(int level);

  void create_e(int i);
  void create_f(int j);
  void adjoint_e(int i);
  void adjoint_f(int j);
  void apply(const StarLetter& l);

  void add(const TailVector& other, Scalar weight = Scalar(1.0, 0.0));
  void scale(Scalar a);
  Scalar inner(const TailVector& other) const;  // conjugate-linear in *this
  double norm() const;

 private:
  const UnitaryRelation* rel_;
  const Tail* tail_;
  int level_ = 0;
  std::map<std::pair<int, int>, CVec> comp_;

  CVec& at(int k, int l);
  void prune();
};

// A truncated tail representation: matrices on an orthonormal basis of
// span{ iota_s(xi_w) : 0 <= s < depth, |w| <= word_cutoff }. depth counts
// levels.
struct TailRep {
  FiniteRep rep;
  Tail tail;
  int depth = 0, word_cutoff = 0;
  // Bigraded weight (edeg - level, fdeg - level) of each basis vector.
  std::vector<std::pair<int, int>> grading;
  // Basis vectors with room for one more block and one more letter; the
  // first-order identities are exact on these columns.
  std::vector<bool> interior;
  // Coordinates (in the orthonormal basis) of a spanning family of the
  // interior subspace; the columns are where first-order identities hold.
  CMat interior_coords;
  // Permutation path: canonical (level, word) label per basis vector.
  std::vector<std::pair<int, NormalWord>> labels;
  bool atomic_basis = false;

  Eigen::Index dim() const { return rep.d; }
  // Index of the class of (level, word), or -1 outside the truncation.
  Eigen::Index class_index(int level, const NormalWord& w) const;
};

TailRep tail_rep(const PermRelation& rel, const Tail& tail, int depth, int word_cutoff);
TailRep tail_rep(const UnitaryRelation& rel, const Tail& tail, int depth, int word_cutoff,
                 std::size_t basis_limit = 200000);

// Diagonal unitary with phase alpha^{g1} beta^{g2} on a basis vector of
// grade (g1, g2). Conjugation scales e-generators by alpha and
// f-generators by beta on the interior.
CVec gauge_unitary(const TailRep& tr, Scalar alpha, Scalar beta);

}  // namespace dilab
