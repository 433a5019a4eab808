#include "pff/sparse.hpp"

#include <algorithm>

namespace pff {

SparseSymMatrix SparseSymMatrix::from_elements(int n, const std::vector<std::vector<int>>& element_dofs,
                                               std::vector<std::vector<int>>* scatter) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (const auto& dofs : element_dofs) {
    for (int a : dofs) {
      if (a < 0) continue;
      for (int b : dofs) {
        if (b < 0 || b > a) continue;
        triplets.emplace_back(a, b, 0.0);
      }
    }
  }
  SparseSymMatrix m;
  m.lower_.resize(n, n);
  m.lower_.setFromTriplets(triplets.begin(), triplets.end());
  m.lower_.makeCompressed();

  if (scatter) {
    const int* outer = m.lower_.outerIndexPtr();
    const int* inner = m.lower_.innerIndexPtr();
    scatter->assign(element_dofs.size(), {});
    for (std::size_t e = 0; e < element_dofs.size(); ++e) {
      const auto& dofs = element_dofs[e];
      const std::size_t ne = dofs.size();
      auto& map = (*scatter)[e];
      map.assign(ne * ne, -1);
      for (std::size_t i = 0; i < ne; ++i) {
        for (std::size_t j = 0; j < ne; ++j) {
          int r = dofs[i], c = dofs[j];
          if (r < 0 || c < 0) continue;
          if (r < c) std::swap(r, c);
          const int* first = inner + outer[c];
          const int* last = inner + outer[c + 1];
          const int* hit = std::lower_bound(first, last, r);
          map[i * ne + j] = static_cast<int>(hit - inner);
        }
      }
    }
  }
  return m;
}

SparseSymMatrix SparseSymMatrix::from_lower(const Storage& lower) {
  SparseSymMatrix m;
  m.lower_ = lower.triangularView<Eigen::Lower>();
  m.lower_.makeCompressed();
  return m;
}

void SparseSymMatrix::set_zero() {
  std::fill(lower_.valuePtr(), lower_.valuePtr() + lower_.nonZeros(), 0.0);
}

double SparseSymMatrix::coeff(int i, int j) const { return i >= j ? lower_.coeff(i, j) : lower_.coeff(j, i); }

Eigen::VectorXd SparseSymMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = lower_.selfadjointView<Eigen::Lower>() * x;
  return y;
}

Eigen::MatrixXd SparseSymMatrix::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd(lower_);
  d.triangularView<Eigen::StrictlyUpper>() = d.transpose().triangularView<Eigen::StrictlyUpper>();
  return d;
}

SparseSymMatrix SparseSymMatrix::submatrix(const std::vector<int>& keep) const {
  std::vector<int> map(rows(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) map[keep[k]] = static_cast<int>(k);
  const int m = static_cast<int>(keep.size());
  Storage sub(m, m);
  std::vector<int> counts(m, 0);
  for (int c : keep) {
    for (Storage::InnerIterator it(lower_, c); it; ++it) {
      if (map[it.row()] >= 0) ++counts[map[c]];
    }
  }
  sub.reserve(counts);
  for (int c : keep) {
    for (Storage::InnerIterator it(lower_, c); it; ++it) {
      const int r = map[it.row()];
      if (r >= 0) sub.insert(r, map[c]) = it.value();
    }
  }
  sub.makeCompressed();
  SparseSymMatrix out;
  out.lower_ = std::move(sub);
  return out;
}

}  // namespace pff
