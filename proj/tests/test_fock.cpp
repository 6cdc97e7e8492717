#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dilab/fock.hpp"
#include "dilab/numkernel.hpp"
#include "dilab/semigroup.hpp"

using namespace dilab;

namespace {

CMat haar_unitary(int d, std::mt19937& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CMat g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = Scalar(dist(gen), dist(gen));
  Eigen::HouseholderQR<CMat> qr(g);
  return CMat(qr.householderQ());
}

// Restrict columns to a mask; rows stay full.
CMat masked_cols(const SpMat& a, const std::vector<bool>& mask) {
  const CMat d(a);
  std::vector<Eigen::Index> cols;
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (mask[c]) cols.push_back(static_cast<Eigen::Index>(c));
  CMat out(d.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = d.col(cols[c]);
  return out;
}

}  // namespace

TEST_CASE("basis sizes") {
  const UnitaryRelation u = from_perm(flip_relation());
  CHECK(build_fock(u, 2, 2).dim() == 49);
  const TruncFock f0 = build_fock(u, 0, 0);
  CHECK(f0.dim() == 1);
  CHECK(f0.creation_e(0).nonZeros() == 0);
  CHECK(f0.creation_f(1).nonZeros() == 0);
  CHECK_THROWS_AS(build_fock(u, 9, 9, 1000), std::invalid_argument);
}

TEST_CASE("flip relation holds exactly on the vacuum") {
  const UnitaryRelation u = from_perm(flip_relation());
  const TruncFock fk = build_fock(u, 2, 2);
  CVec vac = CVec::Zero(fk.dim());
  vac[0] = 1.0;
  // e_2 f_1 = f_2 e_1
  const CVec lhs = fk.creation_e(1) * (fk.creation_f(0) * vac);
  const CVec rhs = fk.creation_f(1) * (fk.creation_e(0) * vac);
  CHECK((lhs - rhs).norm() == 0.0);
  CHECK(lhs.norm() == 1.0);
}

TEST_CASE("interior isometry and orthogonal ranges") {
  std::mt19937 gen(2);
  const std::vector<UnitaryRelation> rels = {from_perm(flip_relation()),
                                             UnitaryRelation(2, 2, haar_unitary(4, gen))};
  for (const auto& u : rels) {
    const TruncFock fk = build_fock(u, 3, 3);
    const auto mask = fk.interior_mask();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const SpMat prod = SpMat(fk.creation_e(i).adjoint()) * fk.creation_e(j);
        CMat diff = CMat(prod);
        if (i == j) diff -= CMat::Identity(fk.dim(), fk.dim());
        CHECK(masked_cols(diff.sparseView(), mask).norm() < 1e-12);

        const SpMat prodf = SpMat(fk.creation_f(i).adjoint()) * fk.creation_f(j);
        CMat difff = CMat(prodf);
        if (i == j) difff -= CMat::Identity(fk.dim(), fk.dim());
        CHECK(masked_cols(difff.sparseView(), mask).norm() < 1e-12);
      }
  }
}

TEST_CASE("interior commutation relations") {
  std::mt19937 gen(3);
  const std::vector<UnitaryRelation> rels = {from_perm(forward_cycle_relation()),
                                             UnitaryRelation(2, 2, haar_unitary(4, gen))};
  for (const auto& u : rels) {
    const TruncFock fk = build_fock(u, 3, 3);
    const auto mask = fk.interior_mask();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CMat lhs = CMat(SpMat(fk.creation_e(i) * fk.creation_f(j)));
        for (int ip = 0; ip < 2; ++ip)
          for (int jp = 0; jp < 2; ++jp)
            lhs -= u.u()(i * 2 + j, ip * 2 + jp) *
                   CMat(SpMat(fk.creation_f(jp) * fk.creation_e(ip)));
        CHECK(masked_cols(lhs.sparseView(), mask).norm() < 1e-12);
      }
  }
}

TEST_CASE("apply_poly basics") {
  const UnitaryRelation u = from_perm(flip_relation());
  const TruncFock fk = build_fock(u, 1, 1);

  const MatPoly one = scalar_poly({{Scalar(1.0), NormalWord{}}});
  CHECK((CMat(apply_poly(fk, one)) - CMat::Identity(fk.dim(), fk.dim())).norm() == 0.0);

  const MatPoly e1 = scalar_poly({{Scalar(1.0), NormalWord{{0}, {}}}});
  CHECK(opnorm(apply_poly(fk, e1)) == doctest::Approx(1.0).epsilon(1e-12));

  const MatPoly x = scalar_poly(
      {{Scalar(1.0), NormalWord{{0}, {}}}, {Scalar(1.0), NormalWord{{}, {1}}}});
  CHECK(opnorm(apply_poly(fk, x)) <= std::sqrt(2.0) + 1e-9);

  const MatPoly deep = scalar_poly({{Scalar(1.0), NormalWord{{0, 0}, {}}}});
  CHECK_THROWS_AS(apply_poly(fk, deep), std::invalid_argument);
}

TEST_CASE("norm lower bounds stay under the limit norm and increase") {
  const UnitaryRelation u = from_perm(flip_relation());

  const MatPoly one = scalar_poly({{Scalar(1.0), NormalWord{}}});
  for (double v : norm_lower_seq(u, one, 3)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  CMat b1(1, 2), b2(1, 2), c1(1, 2), c2(1, 2);
  b1 << 1, 0;
  b2 << 1, 0;
  c1 << 0, 1;
  c2 << 0, -1;
  MatPoly X;
  X.terms = {{b1, NormalWord{{0}, {}}},
             {b2, NormalWord{{1}, {}}},
             {c1, NormalWord{{}, {0}}},
             {c2, NormalWord{{}, {1}}}};
  const auto seq = norm_lower_seq(u, X, 4);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    CHECK(seq[t] <= std::sqrt(2.0) + 1e-9);
    if (t > 0) CHECK(seq[t] >= seq[t - 1] - 1e-10);
  }

  const MatPoly ef = scalar_poly(
      {{Scalar(1.0), NormalWord{{0}, {}}}, {Scalar(1.0), NormalWord{{}, {1}}}});
  const auto seq2 = norm_lower_seq(u, ef, 4);
  for (std::size_t t = 0; t < seq2.size(); ++t) {
    CHECK(seq2[t] <= std::sqrt(2.0) + 1e-9);
    if (t > 0) CHECK(seq2[t] >= seq2[t - 1] - 1e-10);
  }
}

TEST_CASE("compressions of distinct words have orthogonal columns") {
  std::mt19937 gen(5);
  const UnitaryRelation u(2, 2, haar_unitary(4, gen));
  const TruncFock fk = build_fock(u, 3, 3);
  const auto mask = fk.interior_mask(2);
  const auto words = words_of_degree(2, 2, 1, 1);
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      const CMat ga = masked_cols(fk.lambda(words[a]), mask);
      const CMat gb = masked_cols(fk.lambda(words[b]), mask);
      CHECK((ga.adjoint() * gb).norm() < 1e-12);
    }
}

TEST_CASE("boundary projections") {
  const UnitaryRelation u = from_perm(flip_relation());
  const TruncFock fk = build_fock(u, 2, 2);
  const auto [P, Q] = boundary_projections(fk);

  CHECK((CMat(P) * CMat(P) - CMat(P)).norm() < 1e-12);
  CHECK((CMat(Q) * CMat(Q) - CMat(Q)).norm() < 1e-12);

  const CMat PQ = CMat(P) * CMat(Q);
  CHECK((PQ - CMat(Q) * CMat(P)).norm() < 1e-12);
  Eigen::JacobiSVD<CMat> svd(PQ);
  int rank = 0;
  for (Eigen::Index t = 0; t < svd.singularValues().size(); ++t)
    if (svd.singularValues()(t) > 1e-10) ++rank;
  CHECK(rank == 1);
  // PQ is the vacuum projection.
  CHECK(std::abs(PQ(0, 0) - Scalar(1.0)) < 1e-12);
  CHECK(PQ.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // trace(P) counts the pure-f words.
  double trace = 0.0;
  for (Eigen::Index t = 0; t < fk.dim(); ++t) trace += std::real(CMat(P)(t, t));
  int pure_f = 0;
  for (const NormalWord& w : fk.basis())
    if (w.edeg() == 0) ++pure_f;
  CHECK(trace == doctest::Approx(pure_f).epsilon(1e-12));
  CHECK(pure_f == 7);
}

TEST_CASE("boundary projections for a general unitary") {
  std::mt19937 gen(8);
  const UnitaryRelation u(2, 2, haar_unitary(4, gen));
  const TruncFock fk = build_fock(u, 2, 2);
  const auto [P, Q] = boundary_projections(fk);
  CHECK((CMat(P) * CMat(P) - CMat(P)).norm() < 1e-10);
  const CMat PQ = CMat(P) * CMat(Q);
  CHECK(PQ.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("matpoly validation") {
  MatPoly bad;
  CMat a(1, 2), b(2, 1);
  a << 1, 0;
  b << 1, 0;
  bad.terms = {{a, NormalWord{}}, {b, NormalWord{{0}, {}}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  CHECK_THROWS_AS(scalar_poly({{Scalar(1.0), NormalWord{}}, {Scalar(2.0), NormalWord{}}}),
                  std::invalid_argument);
}
