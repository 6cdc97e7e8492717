#pragma once

#include <map>
#include <vector>

#include "dilab/fock.hpp"
#include "dilab/reps.hpp"
#include "dilab/types.hpp"

namespace dilab {

// Words of the free semigroup on p letters, as index sequences.
using FreeWord = std::vector<int>;

std::vector<FreeWord> free_words_up_to(int p, int maxlen);
CMat free_word_product(const std::vector<CMat>& gens, const FreeWord& w);

// Gram block of vectors pi(w) h against pi(w') h' in any minimal
// row-isometric dilation: sigma(v) when w' = w v, sigma(v)* (adjoint) when
// w = w' v, zero when neither word extends the other. Convention: the
// returned block G satisfies  (pi(w) J)^* (pi(w') J) = G.
CMat gram_oracle(const std::vector<CMat>& gens, const FreeWord& w, const FreeWord& wp);

// Orthonormalizes a spanning family given its Gram matrix, keeping the
// leading block (assumed exactly the identity) as the first basis vectors.
// Returns coefficients C with C^* G C = I of full numerical rank.
CMat gram_orthonormalize(const CMat& G, Eigen::Index lead, double rank_tol = 1e-12);

struct DilationResult {
  Eigen::Index ambient_dim = 0;
  std::vector<CMat> S, T;  // generator matrices; T is empty for one family
  CMat J;                  // isometric embedding of the original space
  std::vector<bool> interior;  // ambient basis vectors with full headroom

  CMat minimal_basis;              // ONB columns of the minimal part
  std::vector<CMat> minimal_S, minimal_T;

  // Frobenius residuals over the construction's interior test vectors
  // (masked ambient columns for the one-family dilation, the orbit and
  // wandering columns for the two-family one). Frobenius dominates the
  // operator norm, so small values certify the operator statement.
  double isometry_residual = 0.0;
  double compression_residual = 0.0;
  double defect_residual = 0.0;
  double minimality_gap = 0.0;
  double commutation_residual = 0.0;  // two-family constructions only
};

// Row-isometric dilation of a free-semigroup row contraction, built from
// the defect operator D = (I - R*R)^{1/2} and a truncated shift of
// multiplicity p*d. Includes the minimal part.
DilationResult fbp_dilate(const std::vector<CMat>& A, int depth, double tol = 1e-9);

struct WanderingDecomposition {
  Eigen::Index minimal_dim = 0;
  CMat minimal_basis;
  CMat wandering_basis;         // ONB of the wandering space of the complement
  double reducing_residual = 0.0;
  double span_residual = 0.0;   // how much of the interior escapes M + orbit
  Eigen::Index multiplicity = 0;
};

WanderingDecomposition wandering_decomposition(const DilationResult& d, int depth);

// The unique minimal star-dilation of a defect-free row contraction,
// realized as a chain of levels: level s is spanned by (w, h) with w of
// degree (s, s), carrying the standard inner product. V[s] embeds level s
// into level s+1 through the defect-free partition of unity; E[s][i] and
// F[s][j] implement the generators level s -> s+1.
struct LevelChain {
  FiniteRep sigma;
  int s_max = 0;
  std::vector<std::vector<NormalWord>> words;  // per level, degree (s,s)
  std::vector<CMat> V;                         // s -> s+1, s < s_max
  std::vector<std::vector<CMat>> E, F;         // s -> s+1, s < s_max

  double isometry_residual = 0.0;   // max ||V* V - I||
  double chain_residual = 0.0;      // max ||V E - E V|| across levels
  double row_isometry_residual = 0.0;  // chain maps: C_i* C_j = delta
  double compression_residual = 0.0;   // level-0 compression vs sigma
  double defect_residual = 0.0;        // top-level compressed defect

  Eigen::Index level_dim(int s) const;
  // Lift of level 0 into level t via the V chain.
  CMat embed_from_origin(int t) const;
  // Compression of the dilation to level t (t <= s_max - 1).
  std::vector<CMat> compressed_E(int t) const;
  std::vector<CMat> compressed_F(int t) const;
};

// By default a non-defect-free input is rejected with the offending
// residual; require_defect_free = false builds the chain anyway so the
// connecting-map residual can be inspected (it then matches the defect).
LevelChain star_dilate_defect_free(const FiniteRep& sigma, int s_max,
                                   unsigned word_order_seed = 0, double tol = 1e-9,
                                   bool require_defect_free = true);

struct UniquenessReport {
  double gram_deviation = 0.0;          // chain route vs closed-form formula
  double correspondence_deviation = 0.0;  // two independent chains
  int pairs_checked = 0;
};

UniquenessReport uniqueness_check(const FiniteRep& sigma, int s_max, int trials,
                                  unsigned seed = 12345);

// Two-family row-isometric dilation at truncation depth N: Schaeffer blocks
// for both families over a shared truncated product-system Fock space, the
// two alternating-product dilations matched through their common Gram, and
// the matching unitary extended over wandering complements.
DilationResult solel_dilate(const FiniteRep& sigma, int depth, double tol = 1e-9,
                            Eigen::Index ambient_limit = 4000);

struct WordVertexLess {
  bool operator()(const std::pair<NormalWord, int>& a,
                  const std::pair<NormalWord, int>& b) const {
    if (!(a.first == b.first)) return word_less(a.first, b.first);
    return a.second < b.second;
  }
};

// The minimal star-dilation of a defect-free atomic representation,
// materialized to words of degree <= (depth, depth) componentwise.
struct AtomicDilation {
  AtomicRep graph;
  // class index of (word, original vertex), with the scalar relating
  // pi(word) xi_k to the class representative vector
  std::map<std::pair<NormalWord, int>, std::pair<int, Scalar>, WordVertexLess> classes;
  std::vector<int> original_vertex_class;  // class of (empty, k)
  std::vector<bool> interior;              // rep degree <= depth-1 both ways
};

AtomicDilation atomic_star_dilate(const AtomicRep& a, int depth);

}  // namespace dilab
