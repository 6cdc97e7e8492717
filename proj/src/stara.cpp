#include "dilab/stara.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace dilab {

namespace {

constexpr double kPrune = 1e-14;

// Normal letter order: plain e, plain f, starred f, starred e.
int letter_rank(const StarLetter& l) {
  if (!l.star) return l.is_e ? 0 : 1;
  return l.is_e ? 3 : 2;
}

}  // namespace

void StarPoly::add(const StarMonomial& mon, Scalar c) {
  auto it = terms.find(mon);
  if (it == terms.end()) {
    if (std::abs(c) > kPrune) terms.emplace(mon, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) <= kPrune) terms.erase(it);
}

int StarPoly::max_degree() const {
  int d = 0;
  for (const auto& [mon, c] : terms) {
    d = std::max({d, mon.x.edeg(), mon.x.fdeg(), mon.y.edeg(), mon.y.fdeg()});
  }
  return d;
}

std::string StarPoly::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [mon, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << std::real(c);
    if (std::imag(c) >= 0)
      os << "+" << std::imag(c) << "i)";
    else
      os << std::imag(c) << "i)";
    std::string body;
    if (!mon.x.empty()) body += to_string(mon.x);
    for (auto it = mon.y.f.rbegin(); it != mon.y.f.rend(); ++it) {
      if (!body.empty()) body += ' ';
      body += "f" + std::to_string(*it + 1) + "*";
    }
    for (auto it = mon.y.e.rbegin(); it != mon.y.e.rend(); ++it) {
      if (!body.empty()) body += ' ';
      body += "e" + std::to_string(*it + 1) + "*";
    }
    if (body.empty()) body = "1";
    os << " " << body;
  }
  return os.str();
}

StarPoly star_monomial(const NormalWord& x, const NormalWord& y, Scalar c) {
  StarPoly p;
  p.add(StarMonomial{x, y}, c);
  return p;
}

namespace {

struct Work {
  Scalar coeff;
  std::vector<StarLetter> letters;
};

// Index of the first adjacent out-of-order pair, or -1 when sorted.
int first_violation(const std::vector<StarLetter>& w) {
  for (std::size_t t = 0; t + 1 < w.size(); ++t)
    if (letter_rank(w[t]) > letter_rank(w[t + 1])) return static_cast<int>(t);
  return -1;
}

StarMonomial collect(const std::vector<StarLetter>& w) {
  StarMonomial mon;
  std::vector<int> star_f, star_e;
  for (const StarLetter& l : w) {
    if (!l.star) {
      (l.is_e ? mon.x.e : mon.x.f).push_back(l.index);
    } else {
      (l.is_e ? star_e : star_f).push_back(l.index);
    }
  }
  // y* reads f*'s then e*'s, each the reverse of y's letters.
  mon.y.f.assign(star_f.rbegin(), star_f.rend());
  mon.y.e.assign(star_e.rbegin(), star_e.rend());
  return mon;
}

}  // namespace

StarPoly reduce(const UnitaryRelation& rel, const RawPoly& p) {
  const int m = rel.m(), n = rel.n();
  const CMat& u = rel.u();
  StarPoly out;
  std::deque<Work> todo;
  for (const RawTerm& t : p) {
    for (const StarLetter& l : t.letters) {
      const int bound = l.is_e ? m : n;
      if (l.index < 0 || l.index >= bound)
        throw std::out_of_range("reduce: generator index out of range");
    }
    todo.push_back(Work{t.coeff, t.letters});
  }

  while (!todo.empty()) {
    Work w = std::move(todo.front());
    todo.pop_front();
    if (std::abs(w.coeff) <= kPrune) continue;
    const int t = first_violation(w.letters);
    if (t < 0) {
      out.add(collect(w.letters), w.coeff);
      continue;
    }
    const StarLetter a = w.letters[static_cast<std::size_t>(t)];
    const StarLetter b = w.letters[static_cast<std::size_t>(t + 1)];
    auto emit = [&](std::vector<StarLetter> pair_repl, Scalar c) {
      Work nw;
      nw.coeff = w.coeff * c;
      nw.letters.assign(w.letters.begin(), w.letters.begin() + t);
      for (StarLetter& l : pair_repl) nw.letters.push_back(l);
      nw.letters.insert(nw.letters.end(), w.letters.begin() + t + 2, w.letters.end());
      todo.push_back(std::move(nw));
    };

    const int ra = letter_rank(a), rb = letter_rank(b);
    if (ra == 1 && rb == 0) {
      // f_l e_k = sum conj(u[(i,j),(k,l)]) e_i f_j
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          const Scalar c = std::conj(u(i * n + j, b.index * n + a.index));
          if (c != Scalar(0.0, 0.0))
            emit({StarLetter{true, i, false}, StarLetter{false, j, false}}, c);
        }
    } else if (ra == 3 && rb == 2) {
      // e_a* f_b* = sum u[(i,j),(a,b)] f_j* e_i*
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          const Scalar c = u(i * n + j, a.index * n + b.index);
          if (c != Scalar(0.0, 0.0))
            emit({StarLetter{false, j, true}, StarLetter{true, i, true}}, c);
        }
    } else if (ra == 3 && rb == 0) {
      // e_i* e_j = delta_ij
      if (a.index == b.index) emit({}, Scalar(1.0, 0.0));
    } else if (ra == 2 && rb == 1) {
      // f_i* f_j = delta_ij
      if (a.index == b.index) emit({}, Scalar(1.0, 0.0));
    } else if (ra == 3 && rb == 1) {
      // e_i* f_j = sum_k sum_j' conj(u[(i,j'),(k,j)]) f_j' e_k*   (defect free)
      for (int k = 0; k < m; ++k)
        for (int jp = 0; jp < n; ++jp) {
          const Scalar c = std::conj(u(a.index * n + jp, k * n + b.index));
          if (c != Scalar(0.0, 0.0))
            emit({StarLetter{false, jp, false}, StarLetter{true, k, true}}, c);
        }
    } else if (ra == 2 && rb == 0) {
      // f_j* e_i = sum_k sum_j' u[(i,j'),(k,j)] e_k f_j'*   (defect free)
      for (int k = 0; k < m; ++k)
        for (int jp = 0; jp < n; ++jp) {
          const Scalar c = u(b.index * n + jp, k * n + a.index);
          if (c != Scalar(0.0, 0.0))
            emit({StarLetter{true, k, false}, StarLetter{false, jp, true}}, c);
        }
    } else {
      throw std::logic_error("reduce: unexpected letter ranks");
    }
  }
  return out;
}

StarPoly reduce(const UnitaryRelation& rel, const std::vector<StarLetter>& monomial) {
  return reduce(rel, RawPoly{RawTerm{Scalar(1.0, 0.0), monomial}});
}

StarPoly cuntz_reduce(const UnitaryRelation& rel, const StarPoly& p, int s) {
  StarPoly out;
  for (const auto& [mon, c] : p.terms) {
    const int a = s - mon.y.edeg(), b = s - mon.y.fdeg();
    if (a < 0 || b < 0)
      throw std::invalid_argument("cuntz_reduce: level below the term degree");
    for (const NormalWord& v : words_of_degree(rel.m(), rel.n(), a, b)) {
      const auto letters = letters_of(v);
      const auto xs = append_normalized(rel, mon.x, letters);
      const auto ys = append_normalized(rel, mon.y, letters);
      for (const WordTerm& xt : xs)
        for (const WordTerm& yt : ys)
          out.add(StarMonomial{xt.word, yt.word}, c * xt.coeff * std::conj(yt.coeff));
    }
  }
  return out;
}

StarPoly matrix_unit_product(const StarMonomial& t1, const StarMonomial& t2) {
  if (t1.y.degree() != t2.x.degree())
    throw std::invalid_argument("matrix_unit_product: inner degrees differ");
  StarPoly out;
  if (t1.y == t2.x) out.add(StarMonomial{t1.x, t2.y}, Scalar(1.0, 0.0));
  return out;
}

StarPoly adjoint(const StarPoly& p) {
  StarPoly out;
  for (const auto& [mon, c] : p.terms) out.add(StarMonomial{mon.y, mon.x}, std::conj(c));
  return out;
}

StarPoly expectation(const StarPoly& p) {
  StarPoly out;
  for (const auto& [mon, c] : p.terms)
    if (mon.net_degree() == std::pair<int, int>{0, 0}) out.add(mon, c);
  return out;
}

StarPoly gauge(const StarPoly& p, Scalar alpha, Scalar beta) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12 || std::abs(std::abs(beta) - 1.0) > 1e-12)
    throw std::invalid_argument("gauge: scalars must be unimodular");
  StarPoly out;
  for (const auto& [mon, c] : p.terms) {
    const auto [g1, g2] = mon.net_degree();
    out.add(mon, c * std::pow(alpha, g1) * std::pow(beta, g2));
  }
  return out;
}

TailVector apply_star_monomial(const StarMonomial& mon, const TailVector& v) {
  TailVector out = v;
  // pi(y)* with factors applied right to left.
  for (int i : mon.y.e) out.adjoint_e(i);
  for (int j : mon.y.f) out.adjoint_f(j);
  // pi(x) likewise.
  for (auto it = mon.x.f.rbegin(); it != mon.x.f.rend(); ++it) out.create_f(*it);
  for (auto it = mon.x.e.rbegin(); it != mon.x.e.rend(); ++it) out.create_e(*it);
  return out;
}

TailVector apply_star_poly(const StarPoly& p, const TailVector& v) {
  TailVector acc = v;
  acc.scale(Scalar(0.0, 0.0));
  for (const auto& [mon, c] : p.terms) acc.add(apply_star_monomial(mon, v), c);
  return acc;
}

TailVector apply_raw_monomial(const std::vector<StarLetter>& letters, const TailVector& v) {
  TailVector out = v;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) out.apply(*it);
  return out;
}

}  // namespace dilab
