#pragma once

// Plane-strain symmetric tensor algebra. A plane-strain tensor has a zero
// out-of-plane normal component and zero out-of-plane shears, but the
// deviator and the spectral decomposition are taken in 3D so the zz
// direction is carried explicitly where it matters.

#include <array>

namespace pff {

enum class Bracket { Plus, Minus };

/// Macaulay bracket: Plus -> max(x, 0), Minus -> min(x, 0).
/// With this convention d/dx <x>_-^2 = 2 <x>_-.
constexpr double macaulay(double x, Bracket sign) {
  if (sign == Bracket::Plus) return x > 0.0 ? x : 0.0;
  return x < 0.0 ? x : 0.0;
}

/// In-plane symmetric strain (tensor components, not engineering shear).
struct SymStrain {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  friend constexpr SymStrain operator+(SymStrain a, SymStrain b) { return {a.xx + b.xx, a.yy + b.yy, a.xy + b.xy}; }
  friend constexpr SymStrain operator-(SymStrain a, SymStrain b) { return {a.xx - b.xx, a.yy - b.yy, a.xy - b.xy}; }
  friend constexpr SymStrain operator*(double s, SymStrain a) { return {s * a.xx, s * a.yy, s * a.xy}; }
  friend constexpr bool operator==(const SymStrain&, const SymStrain&) = default;
};

/// 3D symmetric tensor with xz = yz = 0.
struct SymTensor3 {
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
  double xy = 0.0;

  friend constexpr SymTensor3 operator+(SymTensor3 a, SymTensor3 b) {
    return {a.xx + b.xx, a.yy + b.yy, a.zz + b.zz, a.xy + b.xy};
  }
  friend constexpr SymTensor3 operator*(double s, SymTensor3 a) { return {s * a.xx, s * a.yy, s * a.zz, s * a.xy}; }
};

constexpr SymTensor3 embed(const SymStrain& e) { return {e.xx, e.yy, 0.0, e.xy}; }

constexpr double trace(const SymStrain& e) { return e.xx + e.yy; }
constexpr double trace(const SymTensor3& t) { return t.xx + t.yy + t.zz; }

/// 3D deviator of a plane-strain tensor: the zz entry is -tr/3.
constexpr SymTensor3 deviator(const SymStrain& e) {
  const double m = trace(e) / 3.0;
  return {e.xx - m, e.yy - m, -m, e.xy};
}

/// Double contraction a : b.
constexpr double contract(const SymTensor3& a, const SymTensor3& b) {
  return a.xx * b.xx + a.yy * b.yy + a.zz * b.zz + 2.0 * a.xy * b.xy;
}
constexpr double contract(const SymStrain& a, const SymStrain& b) {
  return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

constexpr double norm_sq(const SymStrain& e) { return contract(e, e); }
constexpr double norm_sq(const SymTensor3& t) { return contract(t, t); }

/// Eigen-decomposition of a plane-strain tensor. Index 0 and 1 are the
/// in-plane pairs sorted descending; index 2 is the out-of-plane pair
/// (eigenvalue exactly 0, projector z (x) z).
struct SpectralDecomposition {
  std::array<double, 3> eigenvalues{};
  /// Unit in-plane eigenvectors (x, y) for the two in-plane eigenvalues;
  /// the first nonzero component is positive.
  std::array<std::array<double, 2>, 2> eigenvectors{};
  std::array<SymTensor3, 3> projectors{};

  /// Sum_i eigenvalue_i * projector_i.
  SymTensor3 reconstruct() const;
};

/// Relative tolerance below which the two in-plane eigenvalues are treated
/// as repeated and the coordinate axes are used as eigenvectors.
inline constexpr double kRepeatedEigenvalueTol = 1e-12;

SpectralDecomposition spectral_decompose(const SymStrain& e);

/// eps_+ = sum_i <eps_i>_+ e_i (x) e_i. The out-of-plane eigenvalue is 0,
/// so both parts are themselves plane-strain tensors.
SymStrain positive_part(const SymStrain& e);
SymStrain negative_part(const SymStrain& e);

}  // namespace pff
