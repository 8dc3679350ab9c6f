#include "crossdiff/model.hpp"

#include <cmath>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff::model {

DriftField zero_drift() {
  return [](double, double) { return 0.0; };
}

DriftField constant_drift(double value) {
  return [value](double, double) { return value; };
}

DriftField linear_drift(double scale, double center) {
  return [scale, center](double x, double) { return scale * (x - center); };
}

void ModelCoefficients::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw InvalidArgumentError(std::string("model: ") + name +
                                 " must be nonnegative, got " + std::to_string(v));
    }
  };
  check(a11, "a11"); check(a12, "a12"); check(a21, "a21"); check(a22, "a22");
  check(c1, "c1"); check(c2, "c2");
  check(alpha1, "alpha1"); check(alpha2, "alpha2");
  check(beta11, "beta11"); check(beta12, "beta12");
  check(beta21, "beta21"); check(beta22, "beta22");
  if (!q) throw InvalidArgumentError("model: drift field is not set");
}

double ModelCoefficients::a(int i, int j) const {
  return i == 1 ? (j == 1 ? a11 : a12) : (j == 1 ? a21 : a22);
}
double ModelCoefficients::c(int i) const { return i == 1 ? c1 : c2; }
double ModelCoefficients::b(int i) const { return i == 1 ? b1 : b2; }
double ModelCoefficients::alpha(int i) const { return i == 1 ? alpha1 : alpha2; }
double ModelCoefficients::beta(int i, int j) const {
  return i == 1 ? (j == 1 ? beta11 : beta12) : (j == 1 ? beta21 : beta22);
}

EllipticityClass classify_matrix(const ModelCoefficients& m) {
  EllipticityClass out;
  const double cross = m.a12 + m.a21;
  out.discriminant = 4.0 * m.a11 * m.a22 - cross * cross;
  out.det_a = m.a11 * m.a22 - m.a12 * m.a21;
  const double tr = m.a11 + m.a22;
  const std::complex<double> disc2(tr * tr - 4.0 * out.det_a, 0.0);
  const std::complex<double> root = std::sqrt(disc2);
  out.eig1 = 0.5 * (std::complex<double>(tr) - root);
  out.eig2 = 0.5 * (std::complex<double>(tr) + root);
  out.label = out.discriminant > 0.0 ? EllipticityLabel::Elliptic
                                     : EllipticityLabel::Degenerate;
  return out;
}

std::pair<double, double> flux(const ModelCoefficients& m, double u1, double u2,
                               double grad_u1, double grad_u2, double q_val) {
  const double j1 = u1 * (m.a11 * grad_u1 + m.a12 * grad_u2 + m.b1 * q_val) +
                    m.c1 * grad_u1;
  const double j2 = u2 * (m.a21 * grad_u1 + m.a22 * grad_u2 + m.b2 * q_val) +
                    m.c2 * grad_u2;
  return {j1, j2};
}

std::pair<double, double> reaction(const ModelCoefficients& m, double u1, double u2) {
  const double f1 = u1 * (m.alpha1 - m.beta11 * u1 - m.beta12 * u2);
  const double f2 = u2 * (m.alpha2 - m.beta21 * u1 - m.beta22 * u2);
  return {f1, f2};
}

}  // namespace crossdiff::model
