#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhodge/geometry.hpp"

namespace fhodge {

using ScalarField = Eigen::VectorXd;

/// Covariant components omega_i sampled at every grid node.
struct OneFormField {
  std::array<ScalarField, 2> comp;

  double operator()(int i, std::size_t node) const { return comp[i][static_cast<Eigen::Index>(node)]; }
  Vec2 at(std::size_t node) const { return {comp[0][node], comp[1][node]}; }
};

/// General (unsymmetrized) 2-tensor per node; entry (i, j) is T_ij.
struct TensorField {
  std::vector<Mat2> values;
};

/// Christoffel symbols at one node: gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::array<Mat2, 2>;

// Finite-difference stencils. Periodic axes and interior nodes use centered second-order
// differences. At truncated ends the first derivative uses a one-sided third-order 4-point
// stencil and the second derivative a one-sided second-order 4-point stencil.
ScalarField first_derivative(const ChartGrid& grid, int axis, const ScalarField& u);
ScalarField second_derivative(const ChartGrid& grid, int axis, const ScalarField& u);

/// Samples a function of the chart point at every node.
ScalarField sample_scalar(const ChartGrid& grid, const std::function<double(const Vec2&)>& fn);
OneFormField sample_one_form(const ChartGrid& grid, const std::function<Vec2(const Vec2&)>& components);

std::vector<Christoffel> christoffel(const ChartGrid& grid);

/// (nabla omega)_ij = d_j omega_i - Gamma^k_ij omega_k.
TensorField covariant_derivative(const ChartGrid& grid, const OneFormField& omega);

/// Ric + Hess f from the analytic fields. Throws MissingFieldError when either is absent.
std::vector<Sym2> bakry_emery_ricci(const ChartGrid& grid);

/// grad f components df_i: analytic when available, else finite differences of the weight.
std::vector<Vec2> weight_gradient(const ChartGrid& grid);

/// Delta_f u = Delta u - <grad f, grad u> (non-positive operator).
ScalarField drift_laplacian_scalar(const ChartGrid& grid, const ScalarField& u);

/// Pointwise |omega|_g.
ScalarField pointwise_norm(const ChartGrid& grid, const OneFormField& omega);
/// Pointwise |T|_g for a 2-tensor.
ScalarField pointwise_norm(const ChartGrid& grid, const TensorField& t);

/// Unweighted codifferential of a one-form, -(1/sqrt g) d_i(sqrt g g^ij omega_j).
ScalarField codifferential(const ChartGrid& grid, const OneFormField& omega);
/// delta_f omega = delta omega + <grad f, omega>.
ScalarField weighted_codifferential(const ChartGrid& grid, const OneFormField& omega);
/// Coefficient of dx^0 ^ dx^1 in d omega.
ScalarField exterior_derivative(const ChartGrid& grid, const OneFormField& omega);
OneFormField gradient_form(const ChartGrid& grid, const ScalarField& u);

/// Hodge Laplacian on one-forms with the non-positive sign, Delta = -(d delta + delta d).
OneFormField hodge_laplacian(const ChartGrid& grid, const OneFormField& omega);
/// Delta_f = Delta - d i_X - i_X d with X = grad f.
OneFormField drift_hodge_laplacian(const ChartGrid& grid, const OneFormField& omega);

/// The four pointwise terms of the drift Bochner formula.
struct BochnerTerms {
  ScalarField half_laplacian;  // 1/2 Delta_f |omega|^2
  ScalarField grad_sq;         // |nabla omega|^2
  ScalarField laplacian;       // <Delta_f omega, omega>
  ScalarField ricci;           // Ric_f(omega, omega)

  ScalarField residual() const { return half_laplacian - grad_sq - laplacian - ricci; }
  /// Max over nodes of the sum of absolute term values, the scale for roundoff judgements.
  double scale() const;
};

BochnerTerms bochner_terms(const ChartGrid& grid, const OneFormField& omega);

/// 1/2 Delta_f |omega|^2 - |nabla omega|^2 - <Delta_f omega, omega> - Ric_f(omega, omega).
ScalarField bochner_residual(const ChartGrid& grid, const OneFormField& omega);

/// Max of |field| over nodes at least `band` nodes away from every truncated end.
double interior_max_abs(const ChartGrid& grid, const ScalarField& field, int band);

struct KatoResult {
  /// |nabla omega|^2 - (|grad|omega|| - |<grad f, omega>|)^2 - |grad|omega||^2 (n = 2); NaN at masked nodes.
  ScalarField gap;
  std::vector<bool> masked;
  double min_gap = 0.0;
  /// max |d omega| / max |omega| and max |delta_f omega| / max |omega|.
  double closed_residual = 0.0;
  double coclosed_residual = 0.0;
  /// Set when the input is not numerically harmonic at the requested tolerance.
  bool harmonicity_warning = false;
  /// Range of the eigenvalues of g^{-1} nabla omega over unmasked nodes (equality-case diagnostic).
  std::array<double, 2> lambda_min_range{0.0, 0.0};
  std::array<double, 2> lambda_max_range{0.0, 0.0};
};

KatoResult kato_gap(const ChartGrid& grid, const OneFormField& omega, double harmonic_tol = 1e-6);

/// max |nabla omega|_g / max |omega|_g. Throws Error on a zero form.
double parallelism_residual(const ChartGrid& grid, const OneFormField& omega);

/// One harmonic representative per periodic axis a: omega = dx^a + du with u solving the
/// weighted divergence equation d_i(sqrt g e^{-f} g^ij (dx^a + du)_j) = 0 (zero-flux ends).
/// Requires a diagonal metric.
std::vector<OneFormField> chart_harmonic_forms(const ChartGrid& grid);

/// Node coordinates plus one column per field.
void write_fields_csv(const std::string& path, const ChartGrid& grid, const std::vector<std::string>& names,
                      const std::vector<ScalarField>& fields);

}  // namespace fhodge
