#pragma once

#include "lbs/harmonics.hpp"
#include "lbs/spectral.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lbs {

/// Exact eigenfunction on the surface: value and tangential gradient at a
/// surface point.
using Eigenfunction = std::function<FunctionSample(const Vec3& y)>;

struct ExactEigenpair {
  double lambda = 0.0;
  int multiplicity = 1;
  std::vector<Eigenfunction> functions;  // orthonormal basis of the eigenspace
  std::string label;
  /// Numeric reference instead of a closed form.
  bool extrapolated = false;
  double uncertainty = 0.0;
};

/// The first `count` distinct nonzero eigenvalues with their eigenspaces.
/// Circle and sphere only; other surfaces throw UnsupportedSurface.
std::vector<ExactEigenpair> exact_spectrum(const SurfaceDescription& surface, int count);

/// Eigenpair number `index` (1-based: circle n, sphere l).
ExactEigenpair exact_eigenpair(const SurfaceDescription& surface, int index);

/// Factors relating the forms on the discrete surface and on the exact one at a
/// point x of the discrete surface.
struct GeometricFactors {
  double q = 1.0;                  // area ratio, Q dSigma = dsigma
  Mat3 a_gamma = Mat3::Zero();     // (1/Q) (P - dH) P_Gamma (P - dH)
  Vec3 nu = Vec3::Zero();          // exact normal at psi(x)
  Vec3 n_discrete = Vec3::Zero();  // normal of the discrete surface (zero for curves)
  double d = 0.0;
  Mat3 h = Mat3::Zero();
  Mat3 p = Mat3::Zero();
  Mat3 p_discrete = Mat3::Zero();
  Mat3 dpsi = Mat3::Zero();
};

GeometricFactors geometric_factors(const SurfaceDescription& surface, const Vec3& x,
                                   const TangentMatrix& jac);

enum class AlphaPolicy { MeanShift, Zero };

struct FunctionErrors {
  double l2 = 0.0;        // ||u - Pu - alpha||
  double energy = 0.0;    // ||grad(u - Pu)||
  double energy_z = 0.0;  // ||grad(u - Zu)||, Z the Galerkin projection
  double alpha = 0.0;
};

/// Target function sampled at a point of the discrete surface: value and
/// surface gradient there.
using DiscreteSurfaceSampler =
    std::function<FunctionSample(int cell, const Vec3& x, const TangentMatrix& jac, const RefPoint& xi)>;

/// Errors of the projections of a target onto span{U_j : j in J}. Integrals
/// are taken on the discrete surface with a rule of exactness 2r + 2k + 4.
FunctionErrors projection_errors(const FeSpace& space, const SpectralResult& result, const std::vector<int>& cluster,
                                 const DiscreteSurfaceSampler& target, AlphaPolicy policy);

/// Exact eigenfunction extended by composition with the closest-point map.
FunctionErrors lifted_error_norms(const SurfaceDescription& surface, const FeSpace& space,
                                  const SpectralResult& result, const std::vector<int>& cluster,
                                  const Eigenfunction& u, AlphaPolicy policy = AlphaPolicy::MeanShift);

/// Sampler of a discrete function given by its coefficient vector.
DiscreteSurfaceSampler discrete_sampler(const FeSpace& space, const Eigen::VectorXd& coeffs);

struct EigenvalueErrors {
  std::vector<double> per_index;  // |lambda - Lambda_j| for j in J
  double cluster_error = 0.0;     // max over the cluster
  double mu = 0.0;
  bool mu_truncated = true;  // the max runs over computed eigenvalues only
};

/// mu(J) = max_{l in J} max_{j not in J} |lambda_l / (Lambda_j - lambda_l)|.
EigenvalueErrors eigenvalue_errors_and_mu(const Eigen::VectorXd& eigenvalues, const std::vector<int>& cluster,
                                          double lambda);

/// Forms of discrete functions evaluated on the exact surface, through the
/// parametrization psi o F_T.
struct GammaForms {
  double a = 0.0;        // int_gamma grad v . grad w
  double m = 0.0;        // int_gamma v w
  double a_tilde = 0.0;  // int_gamma A_gamma grad v . grad w
  double m_tilde = 0.0;  // int_gamma v w / Q
};

GammaForms gamma_forms(const SurfaceDescription& surface, const FeSpace& space, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w, int extra_degree = 8);

struct ConsistencyMismatch {
  double stiffness = 0.0;  // |a(V,V) - A(V,V)|
  double mass = 0.0;       // |m(V,V) - M(V,V)|
};

/// Throws OracleInsufficient when two oracle rules disagree by more than
/// a hundredth of the mismatch being measured.
ConsistencyMismatch geometric_consistency_probe(const SurfaceDescription& surface, const FeSpace& space,
                                                const AssembledForms& forms, const Eigen::VectorXd& v);

/// Computable surrogate for the broken norm of d * curvature: max|d| * max|H|
/// over the assembly points of the discrete surface.
double distance_curvature_surrogate(const SurfaceDescription& surface, const FeSpace& space);

/// Richardson extrapolation of a sequence computed on halved meshes with
/// known rate. `estimate` is the change between the last two extrapolants.
struct Extrapolated {
  double value = 0.0;
  double estimate = 0.0;
};

Extrapolated richardson(const std::vector<double>& values, double rate);

struct ReferenceSettings {
  CellKind cell_kind = CellKind::Quad;
  int r = 4;
  int k = 4;
  int level_min = 1;
  int level_max = 3;
  int circle_segments = 4;
  SolverSettings solver;
  int threads = 0;
};

/// Reference eigenvalues (1-based indices into the deflated spectrum) from
/// high-order Gauss-Lobatto runs, extrapolated with rate min(2r, 2k).
std::vector<Extrapolated> reference_spectrum_extrapolated(const SurfaceDescription& surface,
                                                          const std::vector<int>& indices,
                                                          const ReferenceSettings& settings = {});

/// Throws ExtrapolationUnstable when estimate > 1% of the smallest study error.
void check_reference(const Extrapolated& ref, double smallest_error);

}  // namespace lbs
