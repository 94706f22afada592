#include "stadium/oracle/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace stadium::oracle {

double bessel_zero(unsigned m, std::size_t s) {
  if (s == 0) throw std::invalid_argument("bessel_zero: s starts at 1");
  const double step = 0.01;
  double x0 = (m == 0) ? step : static_cast<double>(m);
  double f0 = std::cyl_bessel_j(static_cast<double>(m), x0);
  std::size_t found = 0;
  for (int guard = 0; guard < 1000000; ++guard) {
    const double x1 = x0 + step;
    const double f1 = std::cyl_bessel_j(static_cast<double>(m), x1);
    if ((f0 < 0.0) != (f1 < 0.0) && ++found == s) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = std::cyl_bessel_j(static_cast<double>(m), mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    x0 = x1;
    f0 = f1;
  }
  throw std::runtime_error("bessel_zero: no zero found");
}

double disk_eigenvalue(unsigned m, std::size_t s, double r) {
  const double j = bessel_zero(m, s);
  return j * j / (r * r);
}

}  // namespace stadium::oracle
