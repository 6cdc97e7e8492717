#pragma once

#include <map>
#include <string>
#include <vector>

#include "dilab/reps.hpp"
#include "dilab/types.hpp"
#include "dilab/urelations.hpp"
#include "dilab/words.hpp"

namespace dilab {

// A monomial x y* with x, y in normal form.
struct StarMonomial {
  NormalWord x, y;

  // (edeg x - edeg y, fdeg x - fdeg y)
  std::pair<int, int> net_degree() const {
    return {x.edeg() - y.edeg(), x.fdeg() - y.fdeg()};
  }
  friend bool operator==(const StarMonomial&, const StarMonomial&) = default;
};

struct StarMonomialLess {
  bool operator()(const StarMonomial& a, const StarMonomial& b) const {
    if (!(a.x == b.x)) return word_less(a.x, b.x);
    if (a.y == b.y) return false;
    return word_less(a.y, b.y);
  }
};

// A finite combination of star monomials. Zero coefficients are never
// stored; 1e-14 is the pruning threshold.
struct StarPoly {
  std::map<StarMonomial, Scalar, StarMonomialLess> terms;

  void add(const StarMonomial& mon, Scalar c);
  bool empty() const { return terms.empty(); }
  // Max of edeg/fdeg over both sides of all terms.
  int max_degree() const;
  std::string str() const;
};

StarPoly star_monomial(const NormalWord& x, const NormalWord& y, Scalar c = Scalar(1.0, 0.0));

// A raw *-monomial combination, adjoints allowed anywhere.
struct RawTerm {
  Scalar coeff;
  std::vector<StarLetter> letters;
};
using RawPoly = std::vector<RawTerm>;

// Rewrites to the x y* normal form, pushing adjoints right with the
// delta-contractions for like-generator pairs and the u-twisted exchange
// rules when an adjoint meets the other family. The exchange rules hold in
// every defect-free row-isometric representation; evaluating the result in
// a truncated regular representation instead is unsound.
StarPoly reduce(const UnitaryRelation& rel, const RawPoly& p);
StarPoly reduce(const UnitaryRelation& rel, const std::vector<StarLetter>& monomial);

// Rewrites every term so the y side has degree (s, s) by inserting the
// defect-free partitions of the identity on the right. Valid only in the
// defect-free quotient, like the exchange rules above.
StarPoly cuntz_reduce(const UnitaryRelation& rel, const StarPoly& p, int s);

// (x1 y1*)(x2 y2*) = delta_{y1,x2} (x1 y2*). Requires d(y1) = d(x2); the
// general product must route through reduce instead.
StarPoly matrix_unit_product(const StarMonomial& t1, const StarMonomial& t2);

StarPoly adjoint(const StarPoly& p);

// Keeps exactly the net-degree-(0,0) terms.
StarPoly expectation(const StarPoly& p);

// Scales each term by alpha^(net e-degree) beta^(net f-degree).
StarPoly gauge(const StarPoly& p, Scalar alpha, Scalar beta);

// pi(x) pi(y)* v and raw-monomial evaluation in a tail representation.
TailVector apply_star_monomial(const StarMonomial& mon, const TailVector& v);
TailVector apply_star_poly(const StarPoly& p, const TailVector& v);
TailVector apply_raw_monomial(const std::vector<StarLetter>& letters, const TailVector& v);

}  // namespace dilab
