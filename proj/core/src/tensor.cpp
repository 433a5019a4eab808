#include "pff/tensor.hpp"

#include <cmath>

namespace pff {

SymTensor3 SpectralDecomposition::reconstruct() const {
  SymTensor3 out;
  for (int i = 0; i < 3; ++i) out = out + eigenvalues[i] * projectors[i];
  return out;
}

namespace {

std::array<double, 2> unit_vector_from_projector(const SymTensor3& p) {
  // Columns of a rank-one projector are multiples of the eigenvector; use the
  // longer one for accuracy.
  double vx = p.xx, vy = p.xy;
  if (p.yy > p.xx) {
    vx = p.xy;
    vy = p.yy;
  }
  const double n = std::hypot(vx, vy);
  vx /= n;
  vy /= n;
  if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
    vx = -vx;
    vy = -vy;
  }
  return {vx, vy};
}

}  // namespace

SpectralDecomposition spectral_decompose(const SymStrain& e) {
  SpectralDecomposition d;
  const double mean = 0.5 * (e.xx + e.yy);
  const double half_diff = 0.5 * (e.xx - e.yy);
  const double radius = std::hypot(half_diff, e.xy);
  const double l1 = mean + radius;
  const double l2 = mean - radius;

  d.projectors[2] = SymTensor3{0.0, 0.0, 1.0, 0.0};
  d.eigenvalues[2] = 0.0;

  if (l1 - l2 < kRepeatedEigenvalueTol * (1.0 + std::abs(l1) + std::abs(l2))) {
    d.eigenvalues[0] = mean;
    d.eigenvalues[1] = mean;
    d.projectors[0] = SymTensor3{1.0, 0.0, 0.0, 0.0};
    d.projectors[1] = SymTensor3{0.0, 1.0, 0.0, 0.0};
    d.eigenvectors[0] = {1.0, 0.0};
    d.eigenvectors[1] = {0.0, 1.0};
    return d;
  }

  d.eigenvalues[0] = l1;
  d.eigenvalues[1] = l2;
  // P1 = (I + D / r) / 2 with D the in-plane deviatoric part; P2 = I - P1.
  const double c = half_diff / radius;
  const double s = e.xy / radius;
  d.projectors[0] = SymTensor3{0.5 * (1.0 + c), 0.5 * (1.0 - c), 0.0, 0.5 * s};
  d.projectors[1] = SymTensor3{0.5 * (1.0 - c), 0.5 * (1.0 + c), 0.0, -0.5 * s};
  d.eigenvectors[0] = unit_vector_from_projector(d.projectors[0]);
  d.eigenvectors[1] = unit_vector_from_projector(d.projectors[1]);
  return d;
}

namespace {

SymStrain bracket_part(const SymStrain& e, Bracket sign) {
  const SpectralDecomposition d = spectral_decompose(e);
  SymStrain out;
  for (int i = 0; i < 2; ++i) {
    const double v = macaulay(d.eigenvalues[i], sign);
    out.xx += v * d.projectors[i].xx;
    out.yy += v * d.projectors[i].yy;
    out.xy += v * d.projectors[i].xy;
  }
  return out;
}

}  // namespace

SymStrain positive_part(const SymStrain& e) { return bracket_part(e, Bracket::Plus); }
SymStrain negative_part(const SymStrain& e) { return bracket_part(e, Bracket::Minus); }

}  // namespace pff
