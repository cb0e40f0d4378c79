#include "lbs/spectral.hpp"

#include "lbs/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

namespace lbs {

std::string_view to_string(EigenMethod method) {
  switch (method) {
    case EigenMethod::Auto: return "auto";
    case EigenMethod::Dense: return "dense";
    case EigenMethod::ShiftInvertLanczos: return "shift_invert_lanczos";
  }
  return "unknown";
}

EigenMethod eigen_method_from_string(std::string_view name) {
  if (name == "auto") return EigenMethod::Auto;
  if (name == "dense") return EigenMethod::Dense;
  if (name == "shift_invert_lanczos" || name == "lanczos") return EigenMethod::ShiftInvertLanczos;
  throw Error(ErrorKind::InvalidArgument, "unknown eigen method '" + std::string(name) + "'");
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// M-orthogonal projection onto the complement of the constants.
struct ConstantDeflation {
  Vec b;  // M * 1
  double area = 1.0;
  bool active = false;

  void apply(Mat& x) const {
    if (!active) return;
    const Eigen::RowVectorXd c = (b.transpose() * x) / area;
    x -= Vec::Ones(x.rows()) * c;
  }
};

// Rayleigh-Ritz of (A, M) on span(V); returns the m smallest Ritz pairs.
void rayleigh_ritz(const SparseMatrix& a, const SparseMatrix& m_mat, const Mat& v, int m,
                   Vec& values, Mat& vectors) {
  const Mat av = a * v;
  const Mat mv = m_mat * v;
  Mat h = v.transpose() * av;
  Mat g = v.transpose() * mv;
  h = 0.5 * (h + h.transpose()).eval();
  g = 0.5 * (g + g.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(h, g);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "Rayleigh-Ritz step failed");
  values = es.eigenvalues().head(m);
  vectors = v * es.eigenvectors().leftCols(m);
}

void finalize(const SparseMatrix& a, const SparseMatrix& m_mat, SpectralResult& r) {
  const int m = r.size();
  const Mat mu = m_mat * r.eigenvectors;
  // normalize in M and fix the sign so the largest entry is positive
  for (int i = 0; i < m; ++i) {
    const double nrm = std::sqrt(r.eigenvectors.col(i).dot(mu.col(i)));
    r.eigenvectors.col(i) /= nrm;
    Eigen::Index imax = 0;
    r.eigenvectors.col(i).cwiseAbs().maxCoeff(&imax);
    if (r.eigenvectors(imax, i) < 0) r.eigenvectors.col(i) *= -1.0;
  }
  const Mat au = a * r.eigenvectors;
  const Mat mu2 = m_mat * r.eigenvectors;
  r.residual_norms.resize(m);
  r.residual_floor.resize(m);
  const SparseMatrix a_abs = a.cwiseAbs();
  const SparseMatrix m_abs = m_mat.cwiseAbs();
  for (int i = 0; i < m; ++i) {
    const Vec res = au.col(i) - r.eigenvalues(i) * mu2.col(i);
    const double scale = std::abs(r.eigenvalues(i)) * mu2.col(i).norm();
    r.residual_norms(i) = res.norm() / scale;
    // rounding bound for forming A u - lambda M u in double precision
    const Vec au_abs = a_abs * r.eigenvectors.col(i).cwiseAbs();
    const Vec mu_abs = m_abs * r.eigenvectors.col(i).cwiseAbs();
    const double nnz_row = static_cast<double>(a.nonZeros()) / std::max<Eigen::Index>(1, a.rows());
    r.residual_floor(i) = 4.0 * nnz_row * std::numeric_limits<double>::epsilon() *
                          (au_abs + std::abs(r.eigenvalues(i)) * mu_abs).norm() / scale;
  }
  const Mat gram = r.eigenvectors.transpose() * mu2;
  r.ortho_defect = (gram - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
  const Vec ones = Vec::Ones(a.rows());
  r.mean_defect = (ones.transpose() * mu2).cwiseAbs().maxCoeff();
}

SpectralResult solve_dense(const SparseMatrix& a, const SparseMatrix& m_mat, int m,
                           const SolverSettings& s) {
  const Mat ad = Mat(a);
  const Mat md = Mat(m_mat);
  Eigen::LLT<Mat> llt(md);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::IndefiniteMass, "mass matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ad, md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense generalized eigensolver failed");
  const int skip = s.deflate_constant ? 1 : 0;
  Mat v = es.eigenvectors().middleCols(skip, m);

  SpectralResult r;
  r.method_used = EigenMethod::Dense;
  if (s.deflate_constant) {
    ConstantDeflation defl{m_mat * Vec::Ones(a.rows()), 0.0, true};
    defl.area = defl.b.sum();
    const Vec kernel = es.eigenvectors().col(0);
    // Only project when the discarded mode is the constant one (c = 1 for it).
    const double c = std::abs(defl.b.dot(kernel)) / std::sqrt(defl.area);
    if (c > 0.99) defl.apply(v);
  }
  rayleigh_ritz(a, m_mat, v, m, r.eigenvalues, r.eigenvectors);
  finalize(a, m_mat, r);
  return r;
}

// Block Lanczos on (A - sigma M)^{-1} M with full reorthogonalization in the
// M inner product; eigenpairs are extracted by Rayleigh-Ritz on (A, M).
template <class Factorization>
SpectralResult block_lanczos(const SparseMatrix& a, const SparseMatrix& m_mat, int m,
                             const SolverSettings& s, const Factorization& solver,
                             const ConstantDeflation& defl) {
  const int n = static_cast<int>(a.rows());
  const int avail = defl.active ? n - 1 : n;
  const int b = std::min(avail, s.block_size > 0 ? s.block_size : std::max(4, std::min(m, 16)));
  const int max_basis = std::min(avail, s.max_basis > 0 ? s.max_basis : std::max(8 * m + 80, 200));

  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal;
  auto random_block = [&](int cols) {
    Mat x(n, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < n; ++i) x(i, j) = normal(rng);
    return x;
  };

  Mat basis(n, 0);
  Mat mbasis(n, 0);  // M * basis
  Mat av(n, 0);      // A * basis
  Mat h(0, 0);       // basis^T A basis

  // Orthonormalize block w against the basis and itself (M inner product);
  // nearly dependent columns are dropped.
  auto append = [&](Mat w) {
    defl.apply(w);
    for (int pass = 0; pass < 2; ++pass)
      if (basis.cols() > 0) w -= basis * (mbasis.transpose() * w);
    std::vector<Vec> kept;
    for (int j = 0; j < w.cols() && basis.cols() + static_cast<int>(kept.size()) < max_basis; ++j) {
      Vec x = w.col(j);
      const double norm0 = std::sqrt(std::max(0.0, x.dot(m_mat * x)));
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) x -= basis * (mbasis.transpose() * x);
        for (const Vec& k : kept) x -= k * (k.dot(m_mat * x));
      }
      const double nrm = std::sqrt(std::max(0.0, x.dot(m_mat * x)));
      if (!(nrm > 1e-10 * norm0) || !(nrm > 0)) continue;
      kept.push_back(x / nrm);
    }
    if (kept.empty()) return 0;
    const int old = static_cast<int>(basis.cols());
    const int add = static_cast<int>(kept.size());
    Mat nb(n, add);
    for (int j = 0; j < add; ++j) nb.col(j) = kept[j];
    basis.conservativeResize(n, old + add);
    basis.rightCols(add) = nb;
    mbasis.conservativeResize(n, old + add);
    mbasis.rightCols(add) = m_mat * nb;
    av.conservativeResize(n, old + add);
    av.rightCols(add) = a * nb;
    Mat hn(old + add, old + add);
    hn.topLeftCorner(old, old) = h;
    const Mat cross = basis.transpose() * av.rightCols(add);
    hn.rightCols(add) = cross;
    hn.bottomLeftCorner(add, old) = cross.topRows(old).transpose();
    h = 0.5 * (hn + hn.transpose());
    return add;
  };

  const SparseMatrix a_abs = a.cwiseAbs();
  const SparseMatrix m_abs = m_mat.cwiseAbs();
  const double nnz_row = static_cast<double>(a.nonZeros()) / std::max<Eigen::Index>(1, a.rows());
  double worst = 0.0, worst_floor = 0.0;

  append(random_block(b));
  Mat block = basis;
  SpectralResult r;
  r.method_used = EigenMethod::ShiftInvertLanczos;
  while (true) {
    Mat w = solver.solve(m_mat * block);
    const int before = static_cast<int>(basis.cols());
    const int added = append(w);
    if (added < b && basis.cols() < max_basis) {
      // Krylov space (nearly) invariant: continue from fresh random directions.
      append(random_block(b - added));
    }
    block = basis.rightCols(basis.cols() - before);

    if (basis.cols() >= m + b || basis.cols() >= avail) {
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      const int k = std::min<int>(m, static_cast<int>(basis.cols()));
      const Vec values = es.eigenvalues().head(k);
      const Mat s_vec = es.eigenvectors().leftCols(k);
      const Mat u = basis * s_vec;
      const Mat au = av * s_vec;
      const Mat mu = mbasis * s_vec;
      bool converged = k == m;
      worst = worst_floor = 0.0;
      for (int i = 0; i < k && converged; ++i) {
        const double scale = std::abs(values(i)) * mu.col(i).norm();
        const double res = (au.col(i) - values(i) * mu.col(i)).norm() / scale;
        // rounding floor of the residual itself, as in finalize()
        const double floor = 4.0 * nnz_row * std::numeric_limits<double>::epsilon() *
                             (a_abs * u.col(i).cwiseAbs() + std::abs(values(i)) * (m_abs * u.col(i).cwiseAbs())).norm() /
                             scale;
        if (res > worst) {
          worst = res;
          worst_floor = floor;
        }
        if (!(res <= std::max(0.5 * s.tol_eig, floor))) converged = false;
      }
      if (converged || basis.cols() >= avail) {
        r.eigenvalues = values;
        r.eigenvectors = u;
        break;
      }
    }
    if (basis.cols() >= max_basis || block.cols() == 0)
      throw Error(ErrorKind::NoConvergence,
                  "Lanczos basis reached " + std::to_string(basis.cols()) +
                      " vectors without convergence (worst residual " + sci(worst) + ", floor " +
                      sci(worst_floor) + ")");
  }
  if (r.size() < m) throw Error(ErrorKind::NoConvergence, "Lanczos found fewer eigenpairs than requested");
  // One extra Rayleigh-Ritz on the converged vectors to clean the eigenvalues.
  Mat v = r.eigenvectors;
  defl.apply(v);
  rayleigh_ritz(a, m_mat, v, m, r.eigenvalues, r.eigenvectors);
  finalize(a, m_mat, r);
  return r;
}

SpectralResult solve_lanczos(const SparseMatrix& a, const SparseMatrix& m_mat, int m,
                             const SolverSettings& s) {
  const int n = static_cast<int>(a.rows());
  ConstantDeflation defl;
  defl.active = s.deflate_constant;
  defl.b = m_mat * Vec::Ones(n);
  defl.area = defl.b.sum();
  if (!(defl.area > 0)) throw Error(ErrorKind::IndefiniteMass, "mass matrix has non-positive total");

  double sigma = 0.0;
  if (s.shift) {
    sigma = *s.shift;
  } else {
    // Half the lowest eigenvalue of a round object of the same size, negated.
    const double dim_scale = a.rows() > 0 ? defl.area : 1.0;
    const double typical = 4.0 * std::numbers::pi / dim_scale;
    sigma = -0.5 * typical;
  }
  SparseMatrix shifted = a - sigma * m_mat;
  shifted.makeCompressed();
  if (sigma < 0) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
      throw Error(ErrorKind::IndefiniteMass, "A - sigma M factorization failed (mass not definite?)");
    if ((ldlt.vectorD().array() <= 0).any())
      throw Error(ErrorKind::IndefiniteMass, "A - sigma M is not positive definite");
    return block_lanczos(a, m_mat, m, s, ldlt, defl);
  }
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(shifted);
  lu.factorize(shifted);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "A - sigma M is singular");
  return block_lanczos(a, m_mat, m, s, lu, defl);
}

}  // namespace

SpectralResult solve_smallest(const SparseMatrix& a, const SparseMatrix& m_mat, int m,
                              const SolverSettings& s) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || m_mat.rows() != n || m_mat.cols() != n)
    throw Error(ErrorKind::InvalidArgument, "matrix dimensions do not agree");
  const int avail = s.deflate_constant ? n - 1 : n;
  if (m < 1 || m > avail)
    throw Error(ErrorKind::InvalidArgument, "requested " + std::to_string(m) + " eigenpairs of " +
                                                std::to_string(avail) + " available");
  EigenMethod method = s.method;
  if (method == EigenMethod::Auto) method = n <= s.dense_limit ? EigenMethod::Dense : EigenMethod::ShiftInvertLanczos;
  SpectralResult r = method == EigenMethod::Dense ? solve_dense(a, m_mat, m, s) : solve_lanczos(a, m_mat, m, s);
  for (int i = 0; i < r.size(); ++i) {
    if (!(r.residual_norms(i) <= std::max(s.tol_eig, r.residual_floor(i))))
      throw Error(ErrorKind::NoConvergence, "residual " + sci(r.residual_norms(i)) + " of eigenpair " +
                                                std::to_string(i) + " above tolerance");
  }
  if (!(r.ortho_defect <= s.tol_ortho))
    throw Error(ErrorKind::NoConvergence, "M-orthonormality defect " + sci(r.ortho_defect));
  return r;
}

SpectralResult solve_smallest(const AssembledForms& forms, int m, const SolverSettings& s) {
  return solve_smallest(forms.stiffness, forms.mass, m, s);
}

std::vector<int> match_cluster(const Eigen::VectorXd& ev, double lambda, int multiplicity) {
  const int n = static_cast<int>(ev.size());
  if (multiplicity < 1 || multiplicity > n)
    throw Error(ErrorKind::ClusterNotSeparated, "cluster larger than the computed spectrum");
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int s = 0; s + multiplicity <= n; ++s) {
    double d = 0.0;
    for (int i = s; i < s + multiplicity; ++i) d = std::max(d, std::abs(ev(i) - lambda));
    if (d < best_dist) {
      best_dist = d;
      best = s;
    }
  }
  const int end = best + multiplicity;
  if (end >= n)
    throw Error(ErrorKind::ClusterNotSeparated,
                "cluster at lambda = " + std::to_string(lambda) + " touches the end of the computed spectrum");
  const double spread = ev(end - 1) - ev(best);
  const double below = best == 0 ? ev(0) : ev(best) - ev(best - 1);  // the deflated mode sits at 0
  const double above = ev(end) - ev(end - 1);
  const double gap = std::min(below, above);
  if (gap < spread) {
    throw Error(ErrorKind::ClusterNotSeparated,
                "gap " + sci(gap) + " below cluster spread " + sci(spread) +
                    " at lambda = " + std::to_string(lambda));
  }
  std::vector<int> idx(multiplicity);
  for (int i = 0; i < multiplicity; ++i) idx[i] = best + i;
  return idx;
}

}  // namespace lbs
