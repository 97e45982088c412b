#include "oracle.hpp"

#include <cmath>
#include <cstdlib>

namespace fouriernet::fixtures {

OracleCoefficients oracle_coefficients(const std::vector<Pixel>& points, double cr, double cc, int n,
                                       int panels) {
  using ld = long double;
  if (panels <= 0) panels = 256 * n;
  const std::size_t t_count = points.size();
  std::vector<ld> knots(t_count + 1, 0.0L);
  for (std::size_t t = 1; t <= t_count; ++t) {
    const Pixel& p = points[t - 1];
    const Pixel& q = points[t % t_count];
    const ld dr = q.row - p.row, dc = q.col - p.col;
    knots[t] = knots[t - 1] + std::sqrt(dr * dr + dc * dc);
  }
  const ld length = knots[t_count];
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld omega = 2.0L * pi * n / length;
  ld acc_cos = 0.0L, acc_sin = 0.0L;
  for (std::size_t t = 0; t < t_count; ++t) {
    const ld xi = std::hypot(static_cast<ld>(points[t].row) - cr, static_cast<ld>(points[t].col) - cc);
    const ld lo = knots[t], hi = knots[t + 1];
    const ld step = (hi - lo) / (2 * panels);
    ld sc = 0.0L, ss = 0.0L;
    for (int k = 0; k <= 2 * panels; ++k) {
      const ld weight = (k == 0 || k == 2 * panels) ? 1.0L : (k % 2 ? 4.0L : 2.0L);
      const ld x = lo + k * step;
      sc += weight * std::cos(omega * x);
      ss += weight * std::sin(omega * x);
    }
    acc_cos += xi * sc * step / 3.0L;
    acc_sin += xi * ss * step / 3.0L;
  }
  return {static_cast<double>(2.0L / length * acc_cos), static_cast<double>(2.0L / length * acc_sin)};
}

}  // namespace fouriernet::fixtures
