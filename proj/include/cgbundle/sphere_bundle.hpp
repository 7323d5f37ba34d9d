#pragma once

// Tensor sphere bundle T11_r M = {tau = r^2} with the induced metric, its
// Levi-Civita connection and curvature, the induced paracontact candidate, and
// space-form diagnostics.
//
// Tangent vectors are AdaptedVector values whose vertical part is G-orthogonal
// to t. The working frame is X_j = e_j, X_{n+A} = e_A^T, indexed like the
// bundle frame; since it is overcomplete, frame-indexed arrays below are not
// unique decompositions but every stored vector is an honest tangent vector.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgbundle/framed_structures.hpp"
#include "cgbundle/tensor_bundle.hpp"

namespace cgb {

struct SpherePoint {
  BundlePoint p;
  double r = 1.0;

  /// Rescales t onto tau = r^2. Throws DomainError for r <= 0 or t = 0.
  static SpherePoint make(const Chart& chart, std::vector<double> x, std::vector<double> t, double r);
  int dim() const { return p.dim(); }
  double c() const { return 1.0 / (r * r); }
};

/// |tau(p) - r^2| / r^2
double sphere_defect(const Chart& chart, const SpherePoint& sp);

/// ^T A = V A - (1/r^2) G(t, A) V t.
AdaptedVector tangential_lift(const Chart& chart, std::span<const double> A, const SpherePoint& sp);
/// |G(t, v)| / r for the vertical part of v.
double radial_component(const Chart& chart, const SpherePoint& sp, const AdaptedVector& v);
/// Removes the radial part of the vertical component.
AdaptedVector project_tangent(const Chart& chart, const SpherePoint& sp, const AdaptedVector& v);

/// g(h, h') + a (G(v, v') - (1/r^2) G(t, v) G(t, v')): the induced metric on
/// tangent vectors; on arbitrary vectors it pairs their tangential parts.
double induced_metric(const Chart& chart, const SpherePoint& sp, double a, const AdaptedVector& u,
                      const AdaptedVector& w);

/// Frame brackets [X_alpha, X_beta], closed form.
AdaptedVector sphere_bracket(const Chart& chart, const SpherePoint& sp, int alpha, int beta);

/// Connection of the induced metric in the tangential frame, layout as ConnectionCoefficients.
ConnectionCoefficients sphere_connection_closed(const Chart& chart, const SpherePoint& sp, double a);
ConnectionCoefficients sphere_connection_koszul(const Chart& chart, const SpherePoint& sp, double a);

struct SphereConnectionResiduals {
  double torsion = 0.0;        // nabla_X Y - nabla_Y X - [X, Y]
  double compatibility = 0.0;  // X g(Y, Z) - g(nabla_X Y, Z) - g(Y, nabla_X Z)
  double tangency = 0.0;       // radial part of nabla_X Y
};
SphereConnectionResiduals sphere_connection_residuals(const Chart& chart, const SpherePoint& sp, double a,
                                                      const ConnectionCoefficients& c);

/// R(X_alpha, X_beta) X_gamma in ambient adapted components.
struct CurvatureBlocks {
  enum class Block { HHHH, HHHT, HHTH, HHTT, HTHH, HTHT, HTTH, HTTT, TTHH, TTHT, TTTH, TTTT };

  int n = 0;
  std::vector<double> data;  // [((alpha*D + beta)*D + gamma)*D + delta]

  int frame_dim() const { return n + n * n; }
  double operator()(int alpha, int beta, int gamma, int delta) const {
    const int D = frame_dim();
    return data[((alpha * D + beta) * D + gamma) * D + delta];
  }
  AdaptedVector apply(int alpha, int beta, int gamma) const;
  /// R(U, V) W for tangent vectors given by their adapted components.
  AdaptedVector apply(const AdaptedVector& u, const AdaptedVector& v, const AdaptedVector& w) const;
  double block_max_abs(Block b) const;
  double block_max_diff(const CurvatureBlocks& other, Block b) const;
  double max_diff(const CurvatureBlocks& other) const;
};
const char* block_name(CurvatureBlocks::Block b);
inline constexpr std::array<CurvatureBlocks::Block, 12> kAllCurvatureBlocks = {
    CurvatureBlocks::Block::HHHH, CurvatureBlocks::Block::HHHT, CurvatureBlocks::Block::HHTH,
    CurvatureBlocks::Block::HHTT, CurvatureBlocks::Block::HTHH, CurvatureBlocks::Block::HTHT,
    CurvatureBlocks::Block::HTTH, CurvatureBlocks::Block::HTTT, CurvatureBlocks::Block::TTHH,
    CurvatureBlocks::Block::TTHT, CurvatureBlocks::Block::TTTH, CurvatureBlocks::Block::TTTT};

/// Curvature of the closed-form connection with closed-form brackets.
CurvatureBlocks curvature_blocks(const Chart& chart, const SpherePoint& sp, double a);
/// Curvature of the Koszul connection with coordinate brackets.
CurvatureBlocks curvature_blocks_oracle(const Chart& chart, const SpherePoint& sp, double a);

enum class TTTTReading { corrected, printed };
/// Purely tangential block from its index formula; other entries zero.
CurvatureBlocks tttt_formula(const Chart& chart, const SpherePoint& sp, TTTTReading reading);
/// The blocks linear in the covariant derivative of the base curvature
/// (HHHT, HHTH, HTHH) from their index formulas; other entries zero.
CurvatureBlocks nabla_r_formulas(const Chart& chart, const SpherePoint& sp, double a);

/// Sectional curvature of span{u, v}. Throws DomainError for a degenerate plane.
double sectional_curvature(const Chart& chart, const SpherePoint& sp, double a, const AdaptedVector& u,
                           const AdaptedVector& v, double degeneracy_tol = 1e-8);
double sectional_curvature(const CurvatureBlocks& R, const Chart& chart, const SpherePoint& sp, double a,
                           const AdaptedVector& u, const AdaptedVector& v, double degeneracy_tol = 1e-8);

/// Argument classes (U, V, W) of the space-form defect R(U,V)W - k (g(V,W) U - g(U,W) V).
enum class DefectClass { HHH, HHT, HTH, HTT, THH, THT, TTH, TTT };
inline constexpr int kDefectClasses = 8;
const char* defect_class_name(DefectClass c);

struct DefectReport {
  double k = 0.0;
  std::array<double, kDefectClasses> per_class{};  // max-abs component over frame triples
  double max = 0.0;
};

/// Linear-in-k decomposition of the defect, precomputed once per point.
class DefectOperator {
 public:
  DefectOperator(const Chart& chart, const SpherePoint& sp, double a);
  DefectOperator(const CurvatureBlocks& R, const Chart& chart, const SpherePoint& sp, double a);
  DefectReport at(double k) const;
  /// Smallest overall defect over the given k values.
  double min_over(std::span<const double> ks) const;

 private:
  struct Entry {
    double r, s;
  };
  std::array<std::vector<Entry>, kDefectClasses> entries_;
  std::array<double, kDefectClasses> fixed_{};  // entries with s = 0
};

DefectReport space_form_defect(const Chart& chart, const SpherePoint& sp, double a, double k);

/// The closing identity of the non-space-form argument, evaluated literally
/// at t = (r / sqrt n) I with a = 1/(k r^2): max over indices.
double terminal_identity_residual(const Chart& chart, const SpherePoint& sp);

struct Lemma1Report {
  int rank4 = 0;      // rank of the four index tensors
  int rank2 = 0;      // rank of the last two
  double sigma_min4 = 0.0;
  double sigma_min2 = 0.0;
};
Lemma1Report lemma1_independence(const Chart& chart, const BundlePoint& p);

/// Scan of the space-form defect over a grid of a and k at one point.
struct DefectScanRow {
  double a = 0.0;
  double k = 0.0;
  DefectReport report;
};
std::vector<DefectScanRow> defect_scan(const Chart& chart, const SpherePoint& sp, std::span<const double> a_values,
                                       std::span<const double> k_values);
/// Serial reference of defect_scan.
std::vector<DefectScanRow> defect_scan_serial(const Chart& chart, const SpherePoint& sp,
                                              std::span<const double> a_values, std::span<const double> k_values);

/// Induced candidate paracontact structure on a stratum point (t E = 0, tau = r^2).
struct ParacontactReport {
  double stratum = 0.0;
  double xi2_normality = 0.0;     // max |g(xi_2, X)| / |X| over tangent frame fields
  double xi3_normality = 0.0;     // max |g(xi_3, X)| / |X|
  double xi2_radial = 0.0;        // radial part of xi_2
  double eta_xi = 0.0;            // |eta^1(xi_1) - 1|
  double p_xi = 0.0;              // |p(xi_1)|
  double eta_p = 0.0;             // max |eta^1(p X)| over tangent frame fields
  double p_tangent = 0.0;         // radial part of p X
  double p_squared = 0.0;         // max |p^2 X - X + eta^1(X) xi_1|
  double metricity = 0.0;         // max |g(pX,pY) - g(X,Y) + eta^1(X) eta^1(Y)|
  double eta2_on_tangent = 0.0;   // max |eta^2(X)|
  double eta3_on_tangent = 0.0;   // max |eta^3(X)|
  double restricted_form = 0.0;   // max |p X - (P X - eta^1(X) xi_1)|, the stated restriction of p
};
ParacontactReport paracontact_verify(const Chart& chart, const CGParams& params, const StructureCoefficients& coeffs,
                                     const SpherePoint& sp);

}  // namespace cgb
