#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace dilab {

// A generator letter. Indices are 0-based internally; text and JSON use
// 1-based tokens ("e1", "f2").
struct Gen {
  bool is_e = true;
  int index = 0;

  friend bool operator==(const Gen&, const Gen&) = default;
};

// A letter of a *-monomial: a generator or its adjoint.
struct StarLetter {
  bool is_e = true;
  int index = 0;
  bool star = false;

  friend bool operator==(const StarLetter&, const StarLetter&) = default;
};

// A word in canonical e-first form: e_{u1}..e_{uk} f_{v1}..f_{vl}.
// The empty word is the identity.
struct NormalWord {
  std::vector<int> e;  // e-indices, left to right
  std::vector<int> f;  // f-indices, left to right

  int edeg() const { return static_cast<int>(e.size()); }
  int fdeg() const { return static_cast<int>(f.size()); }
  int length() const { return edeg() + fdeg(); }
  std::pair<int, int> degree() const { return {edeg(), fdeg()}; }
  bool empty() const { return e.empty() && f.empty(); }

  friend bool operator==(const NormalWord&, const NormalWord&) = default;
};

// Graded-lexicographic order: by total length, then e-degree, then the
// e-indices, then the f-indices. Fixed so that bases and term maps are
// reproducible across runs.
bool word_less(const NormalWord& a, const NormalWord& b);

struct WordLess {
  bool operator()(const NormalWord& a, const NormalWord& b) const {
    return word_less(a, b);
  }
};

struct WordHash {
  std::size_t operator()(const NormalWord& w) const;
};

// Factorization pattern over the two-letter alphabet {E, F}.
using Pattern = std::vector<bool>;  // true = E, false = F

inline int count_e(const Pattern& p) {
  int k = 0;
  for (bool b : p) k += b ? 1 : 0;
  return k;
}
inline int count_f(const Pattern& p) { return static_cast<int>(p.size()) - count_e(p); }

Pattern pattern_of(const NormalWord& w);            // E^k F^l
Pattern pattern_of(const std::vector<Gen>& letters);

// Text format: whitespace- or '.'-separated tokens "e1", "f2" (1-based).
// The empty string is the empty word. Anything else is rejected.
std::vector<Gen> parse_word(const std::string& text, int m, int n);
// Star tokens allow a postfix '*': "e1* f2".
std::vector<StarLetter> parse_star_word(const std::string& text, int m, int n);

std::string to_string(const Gen& g);
std::string to_string(const std::vector<Gen>& letters);
std::string to_string(const NormalWord& w);
std::string to_string(const std::vector<StarLetter>& letters);

std::vector<Gen> letters_of(const NormalWord& w);

}  // namespace dilab
