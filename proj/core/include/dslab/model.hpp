#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dslab/field.hpp"
#include "dslab/spectral.hpp"

namespace dslab {

enum class MetricKind { identity, conformal_bump, trapping_well, user_table };

/// Inverse metric G(x) entering P = -div G(x) grad + W.
///
/// Built-in kinds are conformal, G(x) = c(|x|^2) I:
///   conformal_bump:  c = 1 + amplitude * exp(-|x|^2 / width^2)
///   trapping_well:   c = 1 / (1 + amplitude * exp(-|x|^2 / width^2))
/// A trapping_well with amplitude above e^2 has closed circular geodesics.
/// user_table carries one row-major d x d matrix per point of `table_grid`.
struct MetricSpec {
  MetricKind kind = MetricKind::identity;
  double rho = 1.0;
  double amplitude = 0.0;
  double width = 1.0;
  std::optional<Grid> table_grid;
  std::vector<double> table;

  bool is_conformal() const noexcept { return kind != MetricKind::user_table; }
  /// c(|x|^2) for conformal kinds.
  double conformal_factor(double r2) const;
  /// dc / d(|x|^2) for conformal kinds.
  double conformal_factor_slope(double r2) const;
  /// G(x) as a row-major d x d matrix.
  void matrix_at(std::span<const double> x, std::span<double> out) const;
  /// d G / d x_axis; analytic for conformal kinds, central differences otherwise.
  void gradient_at(std::span<const double> x, int axis, std::span<double> out) const;
};

enum class DampingKind { none, gaussian, annulus, user_table };

/// Damping coefficient a(x) >= 0 and the order alpha of <D>^alpha.
///   gaussian: amplitude * exp(-|x - center|^2 / width^2)
///   annulus:  amplitude * exp(-(|x| - radius)^2 / width^2)
/// `coefficient_phase` multiplies a inside B; it is 1 for every physical
/// model and only exists to build deliberately non-dissipative operators.
struct DampingSpec {
  DampingKind kind = DampingKind::none;
  double amplitude = 0.0;
  double width = 1.0;
  std::vector<double> center;
  double radius = 0.0;
  double alpha = 0.0;
  double rho = 1.0;
  Complex coefficient_phase{1.0, 0.0};
  std::optional<Grid> table_grid;
  std::vector<double> table;

  double value_at(std::span<const double> x) const;
};

enum class WeightChoice { unit, beltrami };

/// Sampled decay constants for the long-range / short-range hypotheses
/// (derivatives of order <= 1 only).
struct HypothesisAudit {
  double metric_decay = 0.0;           // sup |G - I| <x>^rho
  double metric_gradient_decay = 0.0;  // sup |dG| <x>^{rho+1}
  double damping_decay = 0.0;          // sup a <x>^{1+rho}
  double damping_gradient_decay = 0.0; // sup |da| <x>^{2+rho}
  double beltrami_far_deviation = 0.0; // sup_{|x| > 3L/4} | |g|^{1/2} - 1 |
  std::vector<std::string> warnings;
};

class DampedOperator;

DampedOperator assemble(const Grid& grid, const MetricSpec& metric, const DampingSpec& damping,
                        WeightChoice w_choice = WeightChoice::unit,
                        std::vector<ComplexField> b_coeffs = {});

/// H = P - i B_alpha on a periodic grid, with B_alpha = a <D>^alpha a.
///
/// P is discretized as w^{-1} sum_jk D_j (w G_jk D_k) + sum_j b_j D_j with
/// spectral D_j, so it is Hermitian in the w-weighted product in exact
/// arithmetic. Immutable after assembly; all apply_* members are reentrant.
class DampedOperator {
 public:
  const Grid& grid() const noexcept { return grid_; }
  const MetricSpec& metric() const noexcept { return metric_; }
  const DampingSpec& damping() const noexcept { return damping_; }
  WeightChoice weight_choice() const noexcept { return w_choice_; }

  double alpha() const noexcept { return damping_.alpha; }
  /// min(1, alpha)
  double alpha_tilde() const noexcept;
  /// d/2 for even d, (d+1)/2 for odd d.
  int kappa() const noexcept;

  std::span<const double> weight() const noexcept { return w_; }
  std::span<const double> damping_profile() const noexcept { return a_; }
  const HypothesisAudit& audit() const noexcept { return audit_; }
  const MultiplierTable& laplacian() const noexcept { return laplacian_; }

  /// G = I, w = 1, b = 0.
  bool is_flat_metric() const noexcept { return flat_; }
  bool has_damping() const noexcept { return damped_; }

  ComplexField apply_P(const ComplexField& f) const;
  /// P - (-Laplacian); zero for a flat metric.
  ComplexField apply_metric_correction(const ComplexField& f) const;
  ComplexField apply_B(const ComplexField& f) const;
  ComplexField apply_H(const ComplexField& f) const;
  /// Adjoints in the unweighted L^2 product.
  ComplexField apply_P_adjoint(const ComplexField& f) const;
  ComplexField apply_B_adjoint(const ComplexField& f) const;
  ComplexField apply_H_adjoint(const ComplexField& f) const;

  /// The operator's natural product <f, g>_w.
  Complex inner_w(const ComplexField& f, const ComplexField& g) const;
  double norm_w(const ComplexField& f) const;

 private:
  friend DampedOperator assemble(const Grid&, const MetricSpec&, const DampingSpec&, WeightChoice,
                                 std::vector<ComplexField>);
  DampedOperator(Grid grid, MetricSpec metric, DampingSpec damping, WeightChoice w_choice);

  ComplexField divergence_form(const ComplexField& f, bool subtract_identity) const;
  ComplexField apply_first_order(const ComplexField& f, bool adjoint) const;
  ComplexField apply_B_with(const ComplexField& f, Complex phase) const;

  Grid grid_;
  MetricSpec metric_;
  DampingSpec damping_;
  WeightChoice w_choice_;
  bool flat_ = true;
  bool damped_ = false;
  bool unit_weight_ = true;
  std::vector<double> w_;
  std::vector<double> inv_w_;
  std::vector<double> a_;
  // Conformal: wc holds w*c. General: wg holds d*d components per point.
  std::vector<double> wc_;
  std::vector<double> wg_;
  std::vector<ComplexField> b_;
  MultiplierTable laplacian_;
  MultiplierTable bessel_alpha_;
  HypothesisAudit audit_;
};

ComplexField apply_P(const DampedOperator& op, const ComplexField& f);
ComplexField apply_B_alpha(const DampedOperator& op, const ComplexField& f);
ComplexField apply_H(const DampedOperator& op, const ComplexField& f);

double alpha_tilde(double alpha) noexcept;
int kappa_for_dimension(int dim) noexcept;

struct DissipativityReport {
  int n_samples = 0;
  double max_imag = 0.0;   // max Im <H f, f>_w over normalized f
  double min_real = 0.0;   // min Re <H f, f>_w
  double tolerance = 1e-10;
  bool dissipative = false;
  bool accretive = false;
  bool pass() const noexcept { return dissipative && accretive; }
};

DissipativityReport dissipativity_report(const DampedOperator& op, int n_samples,
                                         std::uint64_t seed, double tolerance = 1e-10);

/// max |<X f, g> - conj<X g, f>| / (|f| |g|) over random pairs, for X = P in
/// the w-product and X = B_alpha in the unweighted product.
struct HermiticityDefects {
  double P = 0.0;
  double B = 0.0;
};
HermiticityDefects hermiticity_defects(const DampedOperator& op, int n_pairs, std::uint64_t seed);

}  // namespace dslab
