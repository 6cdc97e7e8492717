#pragma once

#include <random>

#include "dilab/reps.hpp"
#include "dilab/semigroup.hpp"
#include "dilab/urelations.hpp"

namespace dilab::testing {

inline CMat haar_unitary(int d, std::mt19937& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CMat g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = Scalar(dist(gen), dist(gen));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    const Scalar piv = r(c, c);
    if (std::abs(piv) > 0) q.col(c) *= piv / std::abs(piv);
  }
  return q;
}

inline CMat random_matrix(int r, int c, std::mt19937& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CMat a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a(i, j) = Scalar(dist(gen), dist(gen));
  return a;
}

inline CVec random_cvec(Eigen::Index d, std::mt19937& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CVec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = Scalar(dist(gen), dist(gen));
  return v;
}

inline Scalar random_phase(std::mt19937& gen) {
  std::uniform_real_distribution<double> dist(0.0, 2.0 * 3.14159265358979323846);
  return std::polar(1.0, dist(gen));
}

// Sampling over cyclic-shift structures: e-colors are drawn freely, f-colors
// are propagated through the commutation squares along each a-orbit, and the
// scalar cocycle is solved along b-orbits. Candidates failing the wrap-around
// consistency are rejected; survivors are defect free with exact squares.
inline std::vector<AtomicRep> random_defect_free_atomics(const PermRelation& rel, int count,
                                                         int max_vertices, std::mt19937& gen) {
  std::vector<AtomicRep> out;
  std::uniform_int_distribution<int> vdist(1, max_vertices);
  int guard = 0;
  while (static_cast<int>(out.size()) < count && ++guard < 200000) {
    const int v = vdist(gen);
    std::uniform_int_distribution<int> shift(0, v - 1);
    const int a = shift(gen), b = shift(gen);
    auto mod = [&](int x) { return ((x % v) + v) % v; };
    std::uniform_int_distribution<int> ec(0, rel.m() - 1), fc(0, rel.n() - 1);
    std::vector<int> ecolor(static_cast<std::size_t>(v));
    for (int x = 0; x < v; ++x) ecolor[static_cast<std::size_t>(x)] = ec(gen);

    // theta(ce(x), cf(x-a)) = (ce(x-b), cf(x)) for every x.
    std::vector<int> fcolor(static_cast<std::size_t>(v), -1);
    bool ok = true;
    for (int seed = 0; seed < v && ok; ++seed) {
      if (fcolor[static_cast<std::size_t>(seed)] != -1) continue;
      fcolor[static_cast<std::size_t>(seed)] = fc(gen);
      int prev = seed;
      for (int x = mod(seed + a);; x = mod(x + a)) {
        const auto [ip, jp] =
            rel.theta(ecolor[static_cast<std::size_t>(x)], fcolor[static_cast<std::size_t>(prev)]);
        if (fcolor[static_cast<std::size_t>(x)] == -1) {
          fcolor[static_cast<std::size_t>(x)] = jp;
        } else {
          ok = fcolor[static_cast<std::size_t>(x)] == jp;  // wrap-around check
          break;
        }
        prev = x;
      }
    }
    if (ok)
      for (int x = 0; x < v && ok; ++x) {
        const auto [ip, jp] = rel.theta(ecolor[static_cast<std::size_t>(x)],
                                        fcolor[static_cast<std::size_t>(mod(x - a))]);
        ok = ip == ecolor[static_cast<std::size_t>(mod(x - b))] &&
             jp == fcolor[static_cast<std::size_t>(x)];
      }
    if (!ok) continue;

    // es(x) fs(x-a) = fs(x) es(x-b); with fs = 1 this pins es on b-orbits.
    std::vector<Scalar> es(static_cast<std::size_t>(v)),
        fs(static_cast<std::size_t>(v), Scalar(1.0, 0.0));
    std::vector<bool> seen(static_cast<std::size_t>(v), false);
    for (int x = 0; x < v; ++x) {
      if (seen[static_cast<std::size_t>(x)]) continue;
      const Scalar val = random_phase(gen);
      int y = x;
      while (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        es[static_cast<std::size_t>(y)] = val;
        y = mod(y - b);
      }
    }
    try {
      AtomicRep cand = shift_atomic(rel, v, a, b, ecolor, fcolor, es, fs);
      if (atomic_commutation_residual(cand) == 0.0 && atomic_defect_free(cand))
        out.push_back(std::move(cand));
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

// The five-basis-vector row-contractive representation on
// {xi0, xi1, xi2, zeta1, zeta2} used across the test suites.
inline FiniteRep five_dim_flip_rep() {
  FiniteRep rep{from_perm(flip_relation()), 5, {}, {}};
  auto unit = [&](int r, int c) {
    CMat x = CMat::Zero(5, 5);
    x(r, c) = 1.0;
    return x;
  };
  rep.E = {unit(3, 1), unit(4, 1)};
  rep.F = {unit(3, 0), unit(4, 2)};
  return rep;
}

inline AtomicRep five_dim_flip_graph() {
  AtomicRep a{flip_relation(), 5,
              std::vector<std::map<int, std::pair<int, Scalar>>>(2),
              std::vector<std::map<int, std::pair<int, Scalar>>>(2)};
  // vertices: 0 = xi0, 1 = xi1, 2 = xi2, 3 = zeta1, 4 = zeta2
  a.e_edge[0][1] = {3, Scalar(1.0)};
  a.e_edge[1][1] = {4, Scalar(1.0)};
  a.f_edge[0][0] = {3, Scalar(1.0)};
  a.f_edge[1][2] = {4, Scalar(1.0)};
  return a;
}

inline FiniteRep scalar_flip_rep() {
  FiniteRep rep{from_perm(flip_relation()), 1, {}, {}};
  CMat one(1, 1), zero(1, 1);
  one(0, 0) = 1.0;
  zero(0, 0) = 0.0;
  rep.E = {one, zero};
  rep.F = {one, zero};
  return rep;
}

}  // namespace dilab::testing
