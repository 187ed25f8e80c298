#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gyrospec
{

// Distance between two multisets of complex numbers: the smallest, over all
// one-to-one pairings, of the largest paired distance. Exhaustive for up to
// eight elements, greedy nearest-neighbour beyond that.
inline double pairing_distance(const std::vector<std::complex<double>> &a,
                               const std::vector<std::complex<double>> &b)
{
  if (a.size() != b.size())
    throw std::invalid_argument("pairing_distance: multisets differ in size");
  const std::size_t m = a.size();
  if (m == 0)
    return 0.0;
  if (m <= 8)
  {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do
    {
      double worst = 0.0;
      for (std::size_t i = 0; i < m && worst < best; ++i)
        worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<bool> used(m, false);
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
  {
    std::size_t pick = m;
    for (std::size_t j = 0; j < m; ++j)
      if (!used[j] && (pick == m || std::abs(a[i] - b[j]) < std::abs(a[i] - b[pick])))
        pick = j;
    used[pick] = true;
    worst = std::max(worst, std::abs(a[i] - b[pick]));
  }
  return worst;
}

}  // namespace gyrospec
