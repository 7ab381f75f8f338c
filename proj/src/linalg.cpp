#include "crwarp/linalg.hpp"

#include "crwarp/error.hpp"

#include <cmath>

namespace crwarp {

double Frame::orthonormality_defect() const {
  const Mat gram = vectors.transpose() * vectors;
  return (gram - Mat::Identity(gram.rows(), gram.cols()))
      .cwiseAbs()
      .maxCoeff();
}

PlaneSpec PlaneSpec::from_pair(const Vec& u, const Vec& v) {
  std::vector<Vec> pair{u, v};
  const Frame f = gram_schmidt(pair);
  return {f[0], f[1]};
}

Frame gram_schmidt(const Mat& columns, const Mat& inner) {
  std::vector<Vec> vectors;
  vectors.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index j = 0; j < columns.cols(); ++j)
    vectors.emplace_back(columns.col(j));
  return gram_schmidt(vectors, inner);
}

Frame gram_schmidt(std::span<const Vec> vectors, const Mat& inner) {
  Frame out;
  if (vectors.empty()) return out;
  const auto dim = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != dim) throw DimensionMismatch("vectors of unequal length");
  const Mat metric = inner.size() == 0 ? Mat::Identity(dim, dim) : inner;
  if (metric.rows() != dim || metric.cols() != dim)
    throw DimensionMismatch("inner product has wrong shape");

  const auto k = static_cast<Eigen::Index>(vectors.size());
  Mat cols(dim, k);
  for (Eigen::Index j = 0; j < k; ++j)
    cols.col(j) = vectors[static_cast<std::size_t>(j)];
  const Mat gram = cols.transpose() * metric * cols;
  if (!(gram.determinant() > 1e-14))
    throw DegenerateInput("Gram determinant <= 1e-14: vectors are dependent");

  // Modified Gram-Schmidt with one reorthogonalization pass.
  for (Eigen::Index j = 0; j < k; ++j) {
    Vec w = cols.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) {
        const Vec qi = cols.col(i);
        w -= (qi.dot(metric * w)) * qi;
      }
    const double norm = std::sqrt(w.dot(metric * w));
    if (!(norm > 0.0)) throw DegenerateInput("vector collapsed to zero");
    cols.col(j) = w / norm;
  }
  out.vectors = std::move(cols);
  out.orthonormal = true;
  return out;
}

Mat orthogonal_complement(const Mat& basis) {
  const auto n = basis.rows();
  const auto k = basis.cols();
  Mat complement(n, n - k);
  Eigen::Index filled = 0;
  // Greedily project standard basis vectors, most-surviving candidate first.
  Mat current = basis;
  while (filled < n - k) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    Vec best_vec;
    for (Eigen::Index c = 0; c < n; ++c) {
      Vec w = Vec::Unit(n, c);
      for (int pass = 0; pass < 2; ++pass)
        w -= current * (current.transpose() * w);
      const double norm = w.norm();
      if (norm > best_norm + 1e-12) {
        best = c;
        best_norm = norm;
        best_vec = w;
      }
    }
    if (best < 0 || best_norm < 1e-8)
      throw DegenerateInput("complement construction failed");
    complement.col(filled) = best_vec / best_norm;
    current.conservativeResize(n, current.cols() + 1);
    current.col(current.cols() - 1) = complement.col(filled);
    ++filled;
  }
  return complement;
}

Mat rotation_with_first_column(const Vec& direction) {
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw DegenerateInput("zero direction");
  Mat first(direction.size(), 1);
  first.col(0) = direction / norm;
  Mat q(direction.size(), direction.size());
  q.col(0) = first.col(0);
  if (direction.size() > 1)
    q.rightCols(direction.size() - 1) = orthogonal_complement(first);
  return q;
}

}  // namespace crwarp
