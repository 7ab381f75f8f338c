#include "crwarp/grassmann.hpp"

#include "crwarp/error.hpp"
#include "crwarp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace crwarp {

namespace {

std::vector<int> first_primes(std::size_t count) {
  std::vector<int> primes;
  for (int c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<unsigned>(base));
    index /= static_cast<unsigned>(base);
    f /= base;
  }
  return result;
}

struct Candidate {
  double value;
  Vec a;  // subspace coefficients of u
  Vec b;  // subspace coefficients of v
};

class Search {
 public:
  Search(const PlaneFunctional& curv, const Mat& basis)
      : curv_(curv), basis_(basis) {}

  double eval(const Vec& a, const Vec& b) const {
    return curv_(PlaneSpec{basis_ * a, basis_ * b});
  }

  // Orthonormalize coefficient pair; false when degenerate.
  static bool orthonormalize(Vec& a, Vec& b) {
    const double na = a.norm();
    if (!(na > 1e-12)) return false;
    a /= na;
    b -= a.dot(b) * a;
    b -= a.dot(b) * a;
    const double nb = b.norm();
    if (!(nb > 1e-12)) return false;
    b /= nb;
    return true;
  }

  Candidate refine(Candidate start, int sweeps) const {
    const auto k = start.a.size();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      const double before = start.value;
      Mat pair(k, 2);
      pair.col(0) = start.a;
      pair.col(1) = start.b;
      const Mat complement = orthogonal_complement(pair);
      for (Eigen::Index j = 0; j < complement.cols(); ++j) {
        for (int which = 0; which < 2; ++which) {
          relax(start, complement.col(j), which == 0);
        }
      }
      const double gain = before - start.value;
      if (!(gain > 1e-15 * std::max(1.0, std::abs(start.value)))) break;
    }
    return start;
  }

 private:
  // Rotate a (or b) towards w and minimize along the circle.
  void relax(Candidate& c, const Vec& w, bool rotate_a) const {
    const Vec& x = rotate_a ? c.a : c.b;
    auto at = [&](double t) {
      Vec moved = std::cos(t) * x + std::sin(t) * w;
      return rotate_a ? eval(moved, c.b) : eval(c.a, moved);
    };
    const double third = std::numbers::pi / 3.0;
    const double f0 = c.value;
    const double f1 = at(third);
    const double f2 = at(2.0 * third);
    // f(t) = m + p cos 2t + q sin 2t through t = 0, pi/3, 2pi/3.
    const double p = (2.0 / 3.0) * (f0 - 0.5 * f1 - 0.5 * f2);
    const double q = (2.0 / 3.0) * (std::sqrt(3.0) / 2.0) * (f1 - f2);
    const double t_star = 0.5 * std::atan2(-q, -p);
    const double f_star = at(t_star);
    double best_t = 0.0;
    double best = f0;
    for (auto [t, f] : {std::pair{t_star, f_star}, std::pair{third, f1},
                        std::pair{2.0 * third, f2}}) {
      if (f < best) {
        best = f;
        best_t = t;
      }
    }
    if (best_t == 0.0) return;
    Vec moved = std::cos(best_t) * x + std::sin(best_t) * w;
    Vec a = rotate_a ? moved : c.a;
    Vec b = rotate_a ? c.b : moved;
    if (!orthonormalize(a, b)) return;
    c.a = std::move(a);
    c.b = std::move(b);
    c.value = eval(c.a, c.b);
  }

  const PlaneFunctional& curv_;
  const Mat& basis_;
};

Candidate pool_coordinate_min(const std::vector<Candidate>& pool,
                              std::size_t count) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i)
    if (pool[i].value < pool[best].value) best = i;
  return pool[best];
}

}  // namespace

PlaneMinimum min_over_planes(const PlaneFunctional& curv, const Frame& subspace,
                             const PlaneSearchBudget& budget,
                             std::uint64_t seed) {
  const auto k = static_cast<Eigen::Index>(subspace.size());
  if (k < 2) throw DegenerateInput("plane search needs a subspace of dim >= 2");
  const Mat& basis = subspace.vectors;
  if (k == 2) {
    PlaneSpec plane{basis.col(0), basis.col(1)};
    return {curv(plane), std::move(plane)};
  }

  Search search(curv, basis);
  std::vector<Candidate> pool;

  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      Vec a = Vec::Unit(k, i);
      Vec b = Vec::Unit(k, j);
      pool.push_back({search.eval(a, b), std::move(a), std::move(b)});
    }

  // Cranley-Patterson rotated Halton points in [0,1)^{2k}, mapped to
  // Gaussian pairs by Box-Muller.
  const auto dims = static_cast<std::size_t>(2 * k);
  const std::vector<int> primes = first_primes(dims);
  Rng rng(seed);
  std::vector<double> shift(dims);
  for (auto& s : shift) s = rng.uniform();
  std::vector<double> gauss(dims);
  for (int s = 0; s < budget.samples; ++s) {
    const auto index = static_cast<std::uint64_t>(s) + 1;
    for (std::size_t d = 0; d + 1 < dims; d += 2) {
      double u1 = radical_inverse(index, primes[d]) + shift[d];
      double u2 = radical_inverse(index, primes[d + 1]) + shift[d + 1];
      u1 -= std::floor(u1);
      u2 -= std::floor(u2);
      if (u1 <= 0.0) u1 = 0x1.0p-53;
      const double r = std::sqrt(-2.0 * std::log(u1));
      gauss[d] = r * std::cos(2.0 * std::numbers::pi * u2);
      gauss[d + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    Vec a(k), b(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      a[i] = gauss[static_cast<std::size_t>(i)];
      b[i] = gauss[static_cast<std::size_t>(k + i)];
    }
    if (!Search::orthonormalize(a, b)) continue;
    pool.push_back({search.eval(a, b), std::move(a), std::move(b)});
  }

  // Coordinate planes come first in the pool, so this picks the lowest one.
  const auto coordinate_count = static_cast<std::size_t>(k * (k - 1) / 2);
  Candidate best_coordinate = pool_coordinate_min(pool, coordinate_count);
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& l, const Candidate& r) {
                     return l.value < r.value;
                   });
  const auto starts = std::min<std::size_t>(
      pool.size(), static_cast<std::size_t>(std::max(1, budget.polish_starts)));
  Candidate best = pool.front();
  for (std::size_t s = 0; s < starts; ++s) {
    Candidate refined = search.refine(pool[s], budget.refine_sweeps);
    if (refined.value < best.value) best = std::move(refined);
  }
  // An exact coordinate plane that ties the refined minimum is returned as
  // is, so its spanning vectors are not perturbed by refinement noise.
  const double slack = 1e-12 * std::max(1.0, std::abs(best.value));
  if (best_coordinate.value <= best.value + slack) best = std::move(best_coordinate);
  return {best.value, PlaneSpec{basis * best.a, basis * best.b}};
}

}  // namespace crwarp
