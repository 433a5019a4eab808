#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pff/tensor.hpp"

using namespace pff;

namespace {

SymStrain random_unit_strain(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return {d(rng), d(rng), d(rng)};
}

double frob3(const SymTensor3& t) { return std::sqrt(t.xx * t.xx + t.yy * t.yy + t.zz * t.zz + 2 * t.xy * t.xy); }

}  // namespace

TEST(Macaulay, Brackets) {
  EXPECT_EQ(macaulay(3.0, Bracket::Plus), 3.0);
  EXPECT_EQ(macaulay(-2.0, Bracket::Plus), 0.0);
  EXPECT_EQ(macaulay(-2.0, Bracket::Minus), -2.0);
  EXPECT_EQ(macaulay(3.0, Bracket::Minus), 0.0);
}

TEST(Macaulay, MinusSquaredDerivative) {
  for (double x : {-1.5, -0.2, 0.3, 2.0}) {
    const double h = 1e-6;
    const double fd = (std::pow(macaulay(x + h, Bracket::Minus), 2) - std::pow(macaulay(x - h, Bracket::Minus), 2)) / (2 * h);
    EXPECT_NEAR(fd, 2 * macaulay(x, Bracket::Minus), 1e-8);
  }
}

TEST(Deviator, CarriesOutOfPlaneEntry) {
  const SymTensor3 d = deviator(SymStrain{1.0, 2.0, 0.5});
  EXPECT_DOUBLE_EQ(d.zz, -1.0);
  EXPECT_NEAR(trace(d), 0.0, 1e-15);
}

TEST(Deviator, NormSplitsIntoVolumetricAndDeviatoric) {
  std::mt19937 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const SymStrain e = random_unit_strain(rng);
    const double tr = trace(e);
    EXPECT_NEAR(norm_sq(deviator(e)) + tr * tr / 3.0, norm_sq(e), 1e-13);
  }
}

TEST(Spectral, IsotropicInput) {
  const auto s = spectral_decompose({1.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 1.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1], 1.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2], 0.0);
  // coordinate axes for the repeated pair
  EXPECT_DOUBLE_EQ(s.projectors[0].xx + s.projectors[1].xx, 1.0);
  EXPECT_DOUBLE_EQ(s.projectors[0].xy, 0.0);
}

TEST(Spectral, DiagonalInput) {
  const auto s = spectral_decompose({2.0, -1.0, 0.0});
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 2.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1], -1.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2], 0.0);
  EXPECT_DOUBLE_EQ(s.projectors[0].xx, 1.0);
  EXPECT_DOUBLE_EQ(s.projectors[0].yy, 0.0);
  EXPECT_DOUBLE_EQ(s.projectors[1].yy, 1.0);
  EXPECT_DOUBLE_EQ(s.projectors[2].zz, 1.0);
}

TEST(Spectral, ReconstructionAndProjectorProperties) {
  std::mt19937 rng(2);
  for (int k = 0; k < 1000; ++k) {
    const SymStrain e = random_unit_strain(rng);
    const auto s = spectral_decompose(e);
    const SymTensor3 r = s.reconstruct();
    const SymTensor3 diff = r + (-1.0) * embed(e);
    EXPECT_LT(frob3(diff), 1e-13);
    EXPECT_GE(s.eigenvalues[0], s.eigenvalues[1]);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(trace(s.projectors[i]), 1.0, 1e-14);
      for (int j = i + 1; j < 3; ++j) EXPECT_NEAR(contract(s.projectors[i], s.projectors[j]), 0.0, 1e-14);
    }
  }
}

TEST(Spectral, ScalingInvariance) {
  std::mt19937 rng(3);
  for (int k = 0; k < 200; ++k) {
    const SymStrain e = random_unit_strain(rng);
    const auto a = spectral_decompose(e);
    for (double s : {0.5, 2.0, 10.0}) {
      const auto b = spectral_decompose(s * e);
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(b.eigenvalues[i], s * a.eigenvalues[i], 1e-13 * s);
        EXPECT_NEAR(b.projectors[i].xx, a.projectors[i].xx, 1e-12);
        EXPECT_NEAR(b.projectors[i].xy, a.projectors[i].xy, 1e-12);
      }
    }
  }
}

TEST(Spectral, EigenvectorSignConvention) {
  const auto s = spectral_decompose({0.0, 0.0, 1.0});
  for (const auto& v : s.eigenvectors) {
    const double first = v[0] != 0.0 ? v[0] : v[1];
    EXPECT_GT(first, 0.0);
  }
}

TEST(SpectralParts, DiagonalExample) {
  const SymStrain p = positive_part({2.0, -1.0, 0.0});
  const SymStrain n = negative_part({2.0, -1.0, 0.0});
  EXPECT_DOUBLE_EQ(p.xx, 2.0);
  EXPECT_DOUBLE_EQ(p.yy, 0.0);
  EXPECT_DOUBLE_EQ(n.xx, 0.0);
  EXPECT_DOUBLE_EQ(n.yy, -1.0);
}

TEST(SpectralParts, PositiveDefinitePassesThrough) {
  const SymStrain e{2.0, 1.0, 0.3};
  const SymStrain p = positive_part(e);
  EXPECT_NEAR(p.xx, e.xx, 1e-15);
  EXPECT_NEAR(p.yy, e.yy, 1e-15);
  EXPECT_NEAR(p.xy, e.xy, 1e-15);
}

TEST(SpectralParts, SumOrthogonalityIdempotence) {
  std::mt19937 rng(4);
  for (int k = 0; k < 1000; ++k) {
    const SymStrain e = random_unit_strain(rng);
    const SymStrain p = positive_part(e), n = negative_part(e);
    EXPECT_NEAR(p.xx + n.xx, e.xx, 1e-12);
    EXPECT_NEAR(p.yy + n.yy, e.yy, 1e-12);
    EXPECT_NEAR(p.xy + n.xy, e.xy, 1e-12);
    EXPECT_NEAR(contract(p, n), 0.0, 1e-12);
    const SymStrain pp = positive_part(p);
    EXPECT_NEAR(pp.xx, p.xx, 1e-12);
    EXPECT_NEAR(pp.yy, p.yy, 1e-12);
    EXPECT_NEAR(pp.xy, p.xy, 1e-12);
  }
}
