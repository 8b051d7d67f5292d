#include "constikit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "constikit/errors.hpp"

namespace constikit {

double Tensor4::minor_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double c = (*this)(i, j, k, l);
          worst = std::max(worst, std::abs(c - (*this)(j, i, k, l)));
          worst = std::max(worst, std::abs(c - (*this)(i, j, l, k)));
        }
  return worst;
}

double det3(const Tensor2& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Tensor2 inv3(const Tensor2& a) {
  const double det = det3(a);
  if (!(std::abs(det) > 1e-14)) {
    std::ostringstream msg;
    msg << "inv3: singular matrix (det = " << det << ")";
    throw SingularMatrix(msg.str());
  }
  Tensor2 adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  // Exact for diagonal and identity inputs.
  if (a(0, 1) == 0.0 && a(0, 2) == 0.0 && a(1, 0) == 0.0 && a(1, 2) == 0.0 && a(2, 0) == 0.0 &&
      a(2, 1) == 0.0) {
    return Tensor2(Eigen::Vector3d(1.0 / a(0, 0), 1.0 / a(1, 1), 1.0 / a(2, 2)).asDiagonal());
  }
  return adj / det;
}

PolarDecomposition polar_decompose(const Tensor2& f) {
  const double det = det3(f);
  if (!(det > 0.0)) {
    std::ostringstream msg;
    msg << "polar_decompose: det F = " << det << " is not positive";
    throw InvalidConfiguration(msg.str());
  }

  Tensor2 x = f;
  constexpr int kMaxIterations = 100;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = std::cbrt(1.0 / std::abs(det3(x)));
    const Tensor2 next = 0.5 * (g * x + inv3(x).transpose() / g);
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (change <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
  }
  // One unscaled step polishes orthogonality once the iteration has settled.
  x = 0.5 * (x + inv3(x).transpose());

  PolarDecomposition out;
  out.rotation = x;
  out.stretch = sym(x.transpose() * f);
  return out;
}

Tensor2 rotation_about(const Vector3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Tensor2 rotation_from_euler(double phi1, double Phi, double phi2) {
  const Tensor2 z1 = rotation_about(Vector3::UnitZ(), phi1);
  const Tensor2 x = rotation_about(Vector3::UnitX(), Phi);
  const Tensor2 z2 = rotation_about(Vector3::UnitZ(), phi2);
  return z1 * x * z2;
}

}  // namespace constikit
