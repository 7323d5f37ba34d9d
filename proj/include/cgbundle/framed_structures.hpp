#pragma once

// Almost product structure P, the framed f(3,-1)-structure (p, xi_k, eta^k)
// built from a nowhere-zero vector field E, and residual checks of the
// identities they satisfy.
//
// Vertical complement: the family X (x) E~ is complemented by {A : A E = 0},
// its G-orthogonal complement. Several identities (P(xi_3) = xi_3, vanishing of
// the cross pairings eta^2(xi_3), eta^3(xi_2), the isometry of P when b != 0)
// additionally need t E = 0; points on that stratum come from project_to_stratum.

#include <Eigen/Dense>
#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "cgbundle/tensor_bundle.hpp"

namespace cgb {

class StructureError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coefficients of P, xi_k and eta^k, all evaluated at one point.
struct StructureCoefficients {
  double c1 = 0, c2 = 0, d1 = 0, d2 = 0;
  double alpha = 0, beta = 0, kappa = 0;
  double gamma = 0, lambda = 0, rho = 0;
  std::vector<double> E;  // E^i at the point
};

enum class SignBranch { positive_beta, negative_beta };

/// Coefficients satisfying the isometry, framed and metrical conditions at once.
/// b_tau is the product b(tau) * tau. Throws StructureError when infeasible.
StructureCoefficients canonical_coeffs(double a, double normE, double tau, double b_tau,
                                       SignBranch branch = SignBranch::positive_beta);
/// Same, with a, b, tau and |E| taken from the point.
StructureCoefficients canonical_coeffs_at(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                          std::span<const double> E,
                                          SignBranch branch = SignBranch::positive_beta);
/// Given c1 and d1, solves c1 c2 = 1 and (c1 + d1|E|^2)(c2 + d2|E|^2) = 1 for c2, d2.
void complete_product_coeffs(StructureCoefficients& c, double normE);

/// Max-abs of both product conditions.
double product_condition_residual(const StructureCoefficients& c, double normE);

/// Removes the part of t that does not annihilate E: t <- t - (tE) E~^T / |E|^2.
BundlePoint project_to_stratum(const Chart& chart, const BundlePoint& p, std::span<const double> E);
/// max_i |(tE)^i|
double stratum_defect(const BundlePoint& p, std::span<const double> E);

Eigen::MatrixXd build_P(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p);

struct FrameFields {
  std::array<Eigen::VectorXd, 3> xi;
  std::array<Eigen::VectorXd, 3> eta;  // covectors: eta^k(X) = eta[k].dot(X)
};
FrameFields build_frame_fields(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p);

/// p = P - eta^1 (x) xi_2 - eta^2 (x) xi_1 - eta^3 (x) xi_3.
Eigen::MatrixXd build_p(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p);
/// p assembled column by column from its frame action on {e_i, V(e_i (x) E~), complement}.
Eigen::MatrixXd build_p_local(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p);

struct RankInfo {
  int corank = 0;
  Eigen::VectorXd singular_values;  // descending
  double gap = 0.0;                 // smallest retained / largest
};
/// Corank by singular values below rel_tol * sigma_max.
RankInfo numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

struct F31Report {
  double P2_minus_I = 0;
  double theorem2_isometry = 0;
  double theorem2_b_coupling = 0;  // isometry residual after removing the b-dependent term
  double relations_P_xi = 0;       // P(xi_1), P(xi_2), P(xi_3) scaling relations
  double relations_eta_P = 0;      // eta^k o P scaling relations
  double eta_xi_pairings = 0;      // eta^k(xi_l) against the expected diagonal, zero off-diagonal
  double lemma2_p_xi = 0;          // p(xi_k) scaling relations
  double lemma2_eta_p = 0;         // eta^k o p scaling relations
  double lemma2_p_squared = 0;     // general-coefficient expansion of p^2
  double p3_minus_p = 0;
  double p2_frame_identity = 0;    // p^2 - (I - sum eta^k (x) xi_k)
  double eta_duality = 0;          // eta^k(xi_l) - delta^k_l
  double p_of_xi = 0;
  double eta_after_p = 0;
  RankInfo rank;
  double metricity = 0;            // g(pX,pY) - g(X,Y) + sum eta^k(X) eta^k(Y)
  std::array<double, 3> lemma4_coeffs{};
  double lemma4_identity = 0;
  double local_vs_operator = 0;
  double stratum = 0;
};

F31Report f31_verify(const Chart& chart, const CGParams& params, const StructureCoefficients& c,
                     const BundlePoint& p);

}  // namespace cgb
