#include "dilab/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <random>
#include <stdexcept>

namespace dilab {

bool all_finite(const CMat& a) { return a.allFinite(); }

double opnorm(const CMat& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("opnorm: empty matrix");
  if (!a.allFinite()) throw std::invalid_argument("opnorm: non-finite entries");
  // Largest eigenvalue of the Gram matrix on the smaller side. (BDCSVD is
  // avoided: it returns wrong leading singular values for some complex
  // inputs in Eigen 3.4.)
  if (a.rows() <= 32 && a.cols() <= 32) {
    Eigen::JacobiSVD<CMat> svd(a);
    return svd.singularValues()(0);
  }
  const CMat gram = a.rows() <= a.cols() ? CMat(a * a.adjoint()) : CMat(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<CMat> es(gram);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace {

CVec seeded_unit_vector(Eigen::Index d) {
  // Deterministic start so repeated runs give identical output.
  std::mt19937_64 gen(0x5eed5eedULL ^ static_cast<std::uint64_t>(d));
  std::normal_distribution<double> dist(0.0, 1.0);
  CVec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = Scalar(dist(gen), dist(gen));
  v.normalize();
  return v;
}

// Largest eigenvalue of the PSD operator x -> a*(a x) by Lanczos with full
// reorthogonalization and thick restarts. Returns the converged Ritz value.
double lanczos_top_eig(const SpMat& a, double tol) {
  const Eigen::Index d = a.cols();
  const SpMat ah = SpMat(a.adjoint());
  auto apply = [&](const CVec& x) -> CVec { return ah * (a * x); };

  const int max_steps = std::min<Eigen::Index>(d, 150);
  const int max_restarts = 60;
  CVec start = seeded_unit_vector(d);
  double best = 0.0;

  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<CVec> basis;
    std::vector<double> alpha, beta;  // beta[k] couples step k and k+1
    CVec v = start;
    for (int k = 0; k < max_steps; ++k) {
      basis.push_back(v);
      CVec w = apply(v);
      alpha.push_back(std::real(v.dot(w)));
      // Full reorthogonalization, twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        for (const CVec& b : basis) w -= b * b.dot(w);
      const double nb = w.norm();
      const int kk = static_cast<int>(basis.size());
      // Ritz values of the tridiagonal section.
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(kk, kk);
      for (int t = 0; t < kk; ++t) T(t, t) = alpha[t];
      for (int t = 0; t + 1 < kk; ++t) T(t, t + 1) = T(t + 1, t) = beta[t];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      const int top = kk - 1;
      const double lam = es.eigenvalues()(top);
      const double resid = nb * std::abs(es.eigenvectors()(kk - 1, top));
      best = std::max(best, lam);
      if (resid <= tol * std::max(lam, 1e-30) || nb <= tol * std::max(lam, 1e-30)) {
        CVec ritz = CVec::Zero(d);
        for (int t = 0; t < kk; ++t) ritz += basis[t] * es.eigenvectors()(t, top);
        const double rn = ritz.norm();
        if (rn > 0) {
          ritz /= rn;
          return std::real(ritz.dot(apply(ritz)));
        }
        return lam;
      }
      if (nb <= 1e-300) break;
      beta.push_back(nb);
      v = w / nb;
    }
    // Restart from the current top Ritz vector.
    {
      const int kk = static_cast<int>(basis.size());
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(kk, kk);
      for (int t = 0; t < kk; ++t) T(t, t) = alpha[t];
      for (int t = 0; t + 1 < kk; ++t) T(t, t + 1) = T(t + 1, t) = beta[t];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      CVec ritz = CVec::Zero(d);
      for (int t = 0; t < kk; ++t) ritz += basis[t] * es.eigenvectors()(t, kk - 1);
      const double rn = ritz.norm();
      if (rn <= 1e-300) {
        start = seeded_unit_vector(d + restart + 1);
      } else {
        start = ritz / rn;
      }
    }
  }
  throw std::runtime_error("opnorm: Lanczos iteration did not converge");
}

}  // namespace

double opnorm(const SpMat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("opnorm: empty matrix");
  if (a.rows() <= 2000 && a.cols() <= 2000) return opnorm(CMat(a));
  if (a.nonZeros() == 0) return 0.0;
  return std::sqrt(std::max(0.0, lanczos_top_eig(a, tol)));
}

CMat psd_sqrt(const CMat& a, double tau_psd) {
  if (a.rows() != a.cols()) throw std::invalid_argument("psd_sqrt: matrix must be square");
  if (!a.allFinite()) throw std::invalid_argument("psd_sqrt: non-finite entries");
  const double scale = std::max(1.0, a.norm());
  if ((a - a.adjoint()).norm() > 1e-9 * scale)
    throw std::invalid_argument("psd_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tau_psd)
      throw std::domain_error("psd_sqrt: eigenvalue below -tau_psd (not positive semidefinite)");
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

CMat hstack(const std::vector<CMat>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("hstack: no blocks");
  const Eigen::Index r = blocks.front().rows();
  Eigen::Index c = 0;
  for (const CMat& b : blocks) {
    if (b.rows() != r) throw std::invalid_argument("hstack: row mismatch");
    c += b.cols();
  }
  CMat out(r, c);
  Eigen::Index at = 0;
  for (const CMat& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

CMat vstack(const std::vector<CMat>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack: no blocks");
  const Eigen::Index c = blocks.front().cols();
  Eigen::Index r = 0;
  for (const CMat& b : blocks) {
    if (b.cols() != c) throw std::invalid_argument("vstack: column mismatch");
    r += b.rows();
  }
  CMat out(r, c);
  Eigen::Index at = 0;
  for (const CMat& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

SpMat kron_sparse(const CMat& a, const SpMat& b) {
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(a.size()) * static_cast<std::size_t>(b.nonZeros()));
  for (int kb = 0; kb < b.outerSize(); ++kb)
    for (SpMat::InnerIterator it(b, kb); it; ++it)
      for (Eigen::Index ra = 0; ra < a.rows(); ++ra)
        for (Eigen::Index ca = 0; ca < a.cols(); ++ca) {
          const Scalar v = a(ra, ca) * it.value();
          if (v != Scalar(0.0, 0.0))
            trips.emplace_back(ra * b.rows() + it.row(), ca * b.cols() + it.col(), v);
        }
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat sparse_identity(Eigen::Index d) {
  SpMat id(d, d);
  id.setIdentity();
  return id;
}

}  // namespace dilab
