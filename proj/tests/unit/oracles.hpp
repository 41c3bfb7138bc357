#pragma once

// Reference values computed independently of the library code paths.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// Bisection on a bracketing interval.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// First positive zero of z'(t) for z = t^(1 - n/2) J_{n/2}(t): the
// derivative is t^(-n/2) (t J_{n/2-1}(t) - (n-1) J_{n/2}(t)).
inline double bessel_critical_point(int n) {
  const double nu = 0.5 * n;
  auto g = [&](double t) { return t * std::cyl_bessel_j(nu - 1.0, t) - (n - 1) * std::cyl_bessel_j(nu, t); };
  double a = 0.5;
  while (g(a + 0.01) > 0)
    a += 0.01;
  return bisect(g, a, a + 0.01);
}

// Same constant by classical RK4 on the radial ODE with a fine step, with
// the sign change located by linear interpolation of z'.
inline double bessel_critical_point_rk4(int n, double step = 1e-7) {
  const double m = n - 1.0;
  auto acc = [&](double t, double z, double dz) { return -m / t * dz - (1.0 - m / (t * t)) * z; };
  double t = 1e-6, z = t, dz = 1.0;
  for (;;) {
    const double k1 = dz, l1 = acc(t, z, dz);
    const double k2 = dz + 0.5 * step * l1, l2 = acc(t + 0.5 * step, z + 0.5 * step * k1, k2);
    const double k3 = dz + 0.5 * step * l2, l3 = acc(t + 0.5 * step, z + 0.5 * step * k2, k3);
    const double k4 = dz + step * l3, l4 = acc(t + step, z + step * k3, k4);
    const double zn = z + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    const double dzn = dz + step / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
    if (dzn <= 0.0)
      return t + step * dz / (dz - dzn);
    t += step;
    z = zn;
    dz = dzn;
  }
}

inline double ball_volume(int n) { return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }
inline double sphere_volume(int n) { return (n + 1) * ball_volume(n + 1); }

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i)
    s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

} // namespace oracle
