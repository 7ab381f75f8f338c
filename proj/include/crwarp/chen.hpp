#pragma once

#include "crwarp/extrinsic.hpp"
#include "crwarp/grassmann.hpp"
#include "crwarp/tolerances.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace crwarp {

// ---------------------------------------------------------------------------
// Curvature sums over subspaces

/// tau(V) = sum_{i<j} K(v_i ^ v_j) over the frame's vectors. Throws
/// DegenerateInput for dim < 2.
double partial_scalar(const PlaneFunctional& curv, const Frame& subspace);

struct DeltaResult {
  double delta = 0.0;
  double tau = 0.0;
  PlaneMinimum minimum;
};

/// delta(V) = tau(V) - inf K over planes in V; 0 for dim 2.
DeltaResult delta_invariant(const PlaneFunctional& curv, const Frame& subspace,
                            const PlaneSearchBudget& budget, std::uint64_t seed);

struct TildeTau {
  double total = 0.0;  // ambient tau of the whole tangent space
  double nt = 0.0;     // of the holomorphic factor
  double nperp = 0.0;  // of the totally real factor
};

/// Throws ParityError for odd n1.
TildeTau tilde_tau_cr(int n1, int n2, double c);

/// |n^2 |H|^2 - 2 tau - |h|^2 + (c/4)(n(n-1) + 3 n1)|
double fundamental_identity_residual(double tau, double h_mean_norm_sq,
                                     double h_norm_sq, int n1, int n2, double c);

struct CoefficientIdentities {
  long long lhs_i = 0;   // n(n-1) + 3 n1 - n2(n2-1)
  long long rhs_i = 0;   // n1(n1 + 2 n2 + 2)
  long long lhs_ii = 0;  // n(n-1) + 3 n1 - n1(n1+2)
  long long rhs_ii = 0;  // n2(n2 + 2 n1 - 1)

  bool holds() const { return lhs_i == rhs_i && lhs_ii == rhs_ii; }
};

/// Throws ParityError for odd n1, DegenerateInput for n1 < 2 or n2 < 1.
CoefficientIdentities coeff_identities(int n1, int n2);

// ---------------------------------------------------------------------------
// The two inequalities

struct InequalityValues {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct InequalityInputs {
  int n1 = 0;
  int n2 = 0;
  double c = 0.0;
  double h_mean_norm_sq = 0.0;
  double warp_term = 0.0;  // n2 Delta f / f
  double delta_hat = 0.0;  // leaf-wise invariant of the factor
};

/// delta_hat(N_T) <= n^2/2 |H|^2 - warp_term + n1(n1+2n2+2)/2 c/4 - kmin.
/// Throws DegenerateInput if n1 < 2.
InequalityValues inequality_i(const InequalityInputs& in, double kmin_nt);

struct InequalityII {
  InequalityValues leafwise;
  /// delta_{N_perp} <= f^2 rhs + [C(n2,2) - 1] |grad f|^2, present when warp
  /// data is.
  std::optional<InequalityValues> intrinsic;
};

/// delta_hat(N_perp) <= n^2/2 |H|^2 - warp_term + n2(n2+2n1-1)/2 c/4 - c/4.
/// `delta_intrinsic` is the intrinsic invariant of the fiber when known
/// independently; otherwise it is obtained from delta_hat by transfer.
/// Throws DegenerateInput if n2 < 2.
InequalityII inequality_ii(const InequalityInputs& in,
                           const std::optional<WarpData>& warp,
                           std::optional<double> delta_intrinsic = std::nullopt);

// ---------------------------------------------------------------------------
// Proof bookkeeping. All functions below read h in an adapted frame: index
// blocks P (the factor carrying the distinguished plane, whose first two
// indices span it) and Q (the other factor), normal index 0 playing the
// role of e_{n+1}.

enum class Version { kI, kII };

std::string to_string(Version v);

struct IndexBlocks {
  std::vector<int> p;
  std::vector<int> q;
};

/// Version I: P = D_T = {0..n1-1}, Q = D_perp. Version II swaps them.
IndexBlocks index_blocks(int n1, int n2, Version version);

/// The seven non-negative groups of Theta (Theta' for version II).
std::array<double, 7> theta_groups(const SecondFundamentalForm& h,
                                   const IndexBlocks& blocks);
double theta(const SecondFundamentalForm& h, const IndexBlocks& blocks);
double theta(const SecondFundamentalForm& h, int n1, Version version);

/// Upsilon_1 (Upsilon_2 for version II):
/// 2 tau - (k-2)/(k-1) S_P^2 - S_Q^2 - 2 S_P S_Q - (c/4)(n(n-1) + 3 n1),
/// S_X = sum over X of h^{n+1}_xx and k = |P|. Throws DegenerateInput for k < 2.
double upsilon(const SecondFundamentalForm& h, double tau, int n1,
               const IndexBlocks& blocks, double c);

/// |S_P^2 - (k-1)(Upsilon + |h|^2)|, exact when e_{n+1} is parallel to H.
double upsilon_closure_residual(const SecondFundamentalForm& h, double upsilon,
                                const IndexBlocks& blocks);

struct Lemma1Result {
  double constraint_residual = 0.0;  // |(sum a)^2 - (n-1)(sum a^2 + beta)|
  double slack = 0.0;                // 2 a_1 a_2 - beta
  bool equality = false;             // a_1 + a_2 = a_3 = ... = a_n
};

Lemma1Result lemma1_check(std::span<const double> alphas, double beta,
                          double tol_exact = kDefaultTolerances.exact);

/// The Lemma 1 instance behind the slack decomposition: alphas = h^{n+1}_pp over P,
/// beta = Upsilon + sum_Q (h^{n+1}_qq)^2 + sum_{i != j} (h^{n+1}_ij)^2
///        + sum_{r >= n+2} |h^r|^2.
std::pair<std::vector<double>, double> lemma1_instance(
    const SecondFundamentalForm& h, double upsilon, const IndexBlocks& blocks);

enum class LemmaKind {
  kLemma2,
  kLemma3,
  kLemma3Literal,  // uncorrected variant without the h_{1A}, h_{2A} terms
};

std::string to_string(LemmaKind kind);

/// |LHS - RHS| of the rearrangement identity; blocks as above (indices 1, 2
/// of the identity are blocks.p[0], blocks.p[1]). Throws DimensionMismatch
/// when the blocks do not cover the tangent indices or |P| < 2.
double lemma_identity_residual(LemmaKind kind, const SecondFundamentalForm& h,
                               const IndexBlocks& blocks);

// ---------------------------------------------------------------------------
// Equality case

struct EqualityClassification {
  bool is_equality = false;
  bool mixed_tg = false;
  bool dt_minimal = false;
  bool dperp_minimal = false;
  bool lemma1_equality = false;
  bool ambient_minimum = false;  // (E1): tilde K(pi*) = tilde K_min
  double mu1 = 0.0;
  /// Every condition with its magnitude; `violations` keeps those above
  /// tolerance.
  std::vector<std::pair<std::string, double>> measures;
  std::vector<std::pair<std::string, double>> violations;

  double magnitude(const std::string& name) const;
};

/// Canonical-form test on h already adapted to pi* (first two indices of
/// P). Magnitudes are norms over the normal index, so they do not depend on
/// the normal frame; mu1 is read from normal 0.
/// Block conditions use tol.identity, (E1) uses tol.opt.
EqualityClassification equality_classify(const SecondFundamentalForm& h,
                                         int n1, Version version,
                                         double ambient_gap,
                                         const Tolerances& tol = kDefaultTolerances);

// ---------------------------------------------------------------------------
// Full pointwise evaluation

struct EvaluationOptions {
  Tolerances tol;
  PlaneSearchBudget budget;
  std::uint64_t seed = 1;
};

/// Point with the tangent frame rotated so that the first two indices of P
/// span `plane` (tangent coefficients), and the normal frame rotated so
/// that normal 0 is parallel to H when H != 0. Within the plane the first
/// vector is the projection of the old first P vector.
ExtrinsicPoint adapt_to_plane(const ExtrinsicPoint& point, Version version,
                              const PlaneSpec& plane);

struct VersionReport {
  Version version = Version::kI;
  double delta_hat = 0.0;
  double tau_factor = 0.0;  // tau^M of the factor tangent space
  PlaneMinimum pi_star;     // argmin of K^M over the factor, tangent coefficients
  double kmin = 0.0;
  std::string kmin_source;  // "closed-form" or "sampled"
  double kmin_sampled = 0.0;
  double ambient_pi_star = 0.0;  // tilde K(pi*)
  InequalityValues inequality;
  std::optional<InequalityValues> intrinsic;  // version II only
  double theta = 0.0;
  std::array<double, 7> theta_groups{};
  double upsilon = 0.0;
  double upsilon_closure = 0.0;
  Lemma1Result lemma1;
  double chain_residual = 0.0;  // slack - [Theta + lemma1/2 + (tilde K(pi*) - kmin)]
  EqualityClassification equality;
};

struct InvariantReport {
  int n1 = 0;
  int n2 = 0;
  int n = 0;
  double c = 0.0;
  bool cr = true;

  double tau_m = 0.0;
  double tau_nt = 0.0;
  double tau_nperp = 0.0;
  double mixed_sum = 0.0;  // sum of K^M(e_a ^ e_A)
  double h_norm_sq = 0.0;
  double h_mean_norm_sq = 0.0;
  std::optional<TildeTau> tilde_tau;
  std::optional<double> fundamental_identity;  // residual

  double warp_term = 0.0;
  std::string warp_term_source;  // "warp data" or "mixed curvatures"
  std::optional<WarpData> warp;
  std::optional<double> warp_identity;       // residual
  std::optional<double> fiber_bo_residual;   // Gauss vs Bishop-O'Neill, max over fiber planes
  std::optional<double> leaf_geodesy_residual;  // K^M on D_T planes vs base curvature

  std::optional<double> delta_nt_intrinsic;
  std::optional<double> delta_nperp_intrinsic;
  std::optional<double> delta_nperp_transfer_residual;

  std::optional<VersionReport> version_i;
  std::optional<VersionReport> version_ii;

  double ricci_max_eig = 0.0;
};

/// Symmetric Ricci form of M by the Gauss equation, tangent frame indices.
Mat ricci_form(const ExtrinsicPoint& point);

InvariantReport evaluate_point(const ExtrinsicPoint& point,
                               const EvaluationOptions& options = {});

struct CorollaryCheck {
  double cond_i = 0.0;
  std::optional<double> cond_ii;
  std::optional<double> cond_ii_intrinsic;
  double ricci_max_eig = 0.0;
  bool not_minimal = false;  // |H|^2 above tolerance: values are informative only
};

/// Minimality conditions: each value must be <= tol for a minimal immersion.
CorollaryCheck corollary_minimal_check(const InvariantReport& report,
                                       double tol = kDefaultTolerances.identity);

/// Classical inequality for M^n in a real space form of curvature c:
/// delta_M <= n^2(n-2)/(2(n-1)) |H|^2 + (n+1)(n-2)/2 c. `kmin` is the
/// infimum of K^M over planes of M. Throws DegenerateInput for n < 3.
InequalityValues chen_original(double tau, double h_mean_norm_sq, int n,
                               double c, double kmin);

/// Same, with tau, |H|^2 and the infimum computed from the point. The point
/// must sit in flat C^m = R^{2m} (c = 0); throws DomainError otherwise.
InequalityValues chen_original(const ExtrinsicPoint& point,
                               const EvaluationOptions& options = {});

// ---------------------------------------------------------------------------
// Synthetic data

/// Orthonormal tangent frame in R^{2m}: D_T as J-paired coordinate vectors
/// (x_1, y_1, x_2, y_2, ...) or, with `split_dt`, as (x_1..x_k, y_1..y_k);
/// D_perp as the x-axes of the following complex slots.
Mat default_tangent_embedding(int n1, int n2, int m, bool split_dt = false);

/// Throws DimensionMismatch / ParityError for inconsistent dimensions.
ExtrinsicPoint synthetic_point(int n1, int n2, double c, int m,
                               SecondFundamentalForm h,
                               std::optional<Mat> tangent = std::nullopt,
                               std::optional<WarpData> warp = std::nullopt);

}  // namespace crwarp
