#pragma once

#include <Eigen/Dense>

namespace constikit {

using Tensor2 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix9 = Eigen::Matrix<double, 9, 9>;

// Index pair (i, j) -> position in the row-major 9-vector 11,12,13,21,...,33.
constexpr int pair_index(int i, int j) { return 3 * i + j; }

// Dense 3x3x3x3 tensor stored as a 9x9 matrix over row-major index pairs, so
// that T(i,j,k,l) == matrix()(3i+j, 3k+l). The same layout is used for the
// flattened dS/dF tangent handed to the host.
class Tensor4 {
 public:
  Tensor4() : m_(Matrix9::Zero()) {}
  explicit Tensor4(const Matrix9& m) : m_(m) {}

  static Tensor4 zero() { return Tensor4(); }

  double& operator()(int i, int j, int k, int l) { return m_(pair_index(i, j), pair_index(k, l)); }
  double operator()(int i, int j, int k, int l) const {
    return m_(pair_index(i, j), pair_index(k, l));
  }

  const Matrix9& matrix() const { return m_; }
  Matrix9& matrix() { return m_; }

  // Largest violation of C_ijkl = C_jikl and C_ijkl = C_ijlk.
  double minor_asymmetry() const;

 private:
  Matrix9 m_;
};

double det3(const Tensor2& a);

// Throws SingularMatrix when |det| <= 1e-14.
Tensor2 inv3(const Tensor2& a);

struct PolarDecomposition {
  Tensor2 rotation;  // R, proper orthogonal
  Tensor2 stretch;   // U, symmetric positive definite
};

// F = R U by the scaled Newton iteration X <- (g X + X^-T / g) / 2 with
// determinant scaling g = |det X|^(-1/3). Throws InvalidConfiguration for
// det F <= 0.
PolarDecomposition polar_decompose(const Tensor2& f);

inline Tensor2 sym(const Tensor2& a) { return 0.5 * (a + a.transpose()); }
inline Tensor2 skew(const Tensor2& a) { return 0.5 * (a - a.transpose()); }

// Rotation about a unit axis by the right-hand rule.
Tensor2 rotation_about(const Vector3& axis, double angle);

// Bunge (z-x-z) Euler angles in radians, maps crystal to sample frame.
Tensor2 rotation_from_euler(double phi1, double Phi, double phi2);

}  // namespace constikit
