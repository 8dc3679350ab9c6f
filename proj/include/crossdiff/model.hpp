#pragma once

#include <complex>
#include <functional>
#include <utility>

namespace crossdiff::model {

/// Drift field q(x, t). Presets cover everything the configuration format
/// can express; arbitrary callables are accepted for library use.
using DriftField = std::function<double(double x, double t)>;

DriftField zero_drift();
DriftField constant_drift(double value);
/// q(x) = scale * (x - center).
DriftField linear_drift(double scale, double center);

/// Coefficients of the two-population cross-diffusion system.
///
/// Diffusion matrix a[i][j], linear self-diffusion c[i], drift weights b[i],
/// logistic growth alpha[i] and competition beta[i][j]. All rates must be
/// nonnegative; the drift weights may have either sign.
struct ModelCoefficients {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
  double c1 = 0, c2 = 0;
  double b1 = 0, b2 = 0;
  double alpha1 = 0, alpha2 = 0;
  double beta11 = 0, beta12 = 0, beta21 = 0, beta22 = 0;
  DriftField q = zero_drift();

  /// Throws InvalidArgumentError when a sign constraint is violated.
  void validate() const;

  double a(int i, int j) const;
  double c(int i) const;
  double b(int i) const;
  double alpha(int i) const;
  double beta(int i, int j) const;
};

enum class EllipticityLabel { Elliptic, Degenerate };

/// Classification of the diffusion matrix by the sign of
/// 4*a11*a22 - (a12 + a21)^2. Eigenvalues of A are reported as extra
/// context; interpretation is left to the caller.
struct EllipticityClass {
  double discriminant = 0;
  double det_a = 0;
  std::complex<double> eig1;
  std::complex<double> eig2;
  EllipticityLabel label = EllipticityLabel::Degenerate;
};

EllipticityClass classify_matrix(const ModelCoefficients& coeffs);

/// Flux pair (J1, J2) with J_i = u_i*(a_i1*g1 + a_i2*g2 + b_i*q) + c_i*g_i,
/// the argument of the divergence in the conservation form of the system.
std::pair<double, double> flux(const ModelCoefficients& coeffs, double u1, double u2,
                               double grad_u1, double grad_u2, double q_val);

/// Lotka-Volterra reactions f_i = u_i*(alpha_i - beta_i1*u1 - beta_i2*u2).
std::pair<double, double> reaction(const ModelCoefficients& coeffs, double u1,
                                   double u2);

}  // namespace crossdiff::model
