#pragma once

// Complementary error function and its inverse.
//
// erfc / erfcx use W. J. Cody's rational Chebyshev approximations (the
// SPECFUN CALERF packet): a rational function of x^2 for |x| <= 0.46875,
// exp(-x^2) P(x)/Q(x) on (0.46875, 4] and an asymptotic-form rational in
// 1/x^2 beyond.  exp(-x^2) is evaluated in two pieces to keep relative
// accuracy in the tail.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chainbreak {

namespace detail {

enum class ErfKind { erf, erfc, erfcx };

inline double calerf(double x, ErfKind kind) {
  static constexpr double a[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                                  3209.37758913846947, .185777706184603153};
  static constexpr double b[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                                  2844.23683343917062};
  static constexpr double c[9] = {.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                                  298.635138197400131, 881.95222124176909,  1712.04761263407058,
                                  2051.07837782607147, 1230.33935479799725, 2.15311535474403846e-8};
  static constexpr double d[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                                  1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                                  3439.36767414372164, 1230.33935480374942};
  static constexpr double p[6] = {.305326634961232344, .360344899949804439, .125781726111229246,
                                  .0160837851487422766, 6.58749161529837803e-4, .0163153871373020978};
  static constexpr double q[5] = {2.56852019228982242, 1.87295284992346047, .527905102951428412,
                                  .0605183413124413191, .00233520497626869185};
  static constexpr double sqrpi = 0.56418958354775628695;  // 1/sqrt(pi)
  static constexpr double thresh = 0.46875;
  static constexpr double xsmall = 1.11e-16;
  static constexpr double xbig = 26.543;
  static constexpr double xhuge = 6.71e7;
  static constexpr double xmax = 2.53e307;
  static constexpr double xneg = -26.628;

  // exp(-v^2) split as exp(-r^2) exp(-(v-r)(v+r)) with r = trunc(16 v)/16.
  auto exp_neg_sq = [](double v) {
    const double r = std::trunc(v * 16.0) / 16.0;
    const double del = (v - r) * (v + r);
    return std::exp(-r * r) * std::exp(-del);
  };

  const double y = std::fabs(x);
  double result = 0.0;

  if (y <= thresh) {
    const double ysq = y > xsmall ? y * y : 0.0;
    double xnum = a[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + a[i]) * ysq;
      xden = (xden + b[i]) * ysq;
    }
    result = x * (xnum + a[3]) / (xden + b[3]);
    if (kind != ErfKind::erf) result = 1.0 - result;
    if (kind == ErfKind::erfcx) result *= std::exp(ysq);
    return result;
  }

  if (y <= 4.0) {
    double xnum = c[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + c[i]) * y;
      xden = (xden + d[i]) * y;
    }
    result = (xnum + c[7]) / (xden + d[7]);
    if (kind != ErfKind::erfcx) result *= exp_neg_sq(y);
  } else {
    bool done = false;
    if (y >= xbig) {
      if (kind != ErfKind::erfcx || y >= xmax) {
        result = 0.0;
        done = true;
      } else if (y >= xhuge) {
        result = sqrpi / y;
        done = true;
      }
    }
    if (!done) {
      const double ysq = 1.0 / (y * y);
      double xnum = p[5] * ysq;
      double xden = ysq;
      for (int i = 0; i < 4; ++i) {
        xnum = (xnum + p[i]) * ysq;
        xden = (xden + q[i]) * ysq;
      }
      result = ysq * (xnum + p[4]) / (xden + q[4]);
      result = (sqrpi - result) / y;
      if (kind != ErfKind::erfcx) result *= exp_neg_sq(y);
    }
  }

  switch (kind) {
    case ErfKind::erf:
      result = (0.5 - result) + 0.5;
      return x < 0.0 ? -result : result;
    case ErfKind::erfc:
      return x < 0.0 ? 2.0 - result : result;
    case ErfKind::erfcx:
      if (x < 0.0) {
        if (x < xneg) return std::numeric_limits<double>::infinity();
        const double r = std::trunc(x * 16.0) / 16.0;
        const double del = (x - r) * (x + r);
        const double e = std::exp(r * r) * std::exp(del);
        return e + e - result;
      }
      return result;
  }
  return result;
}

inline void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(fn) + ": argument is not finite");
}

}  // namespace detail

inline double erfc(double x) {
  detail::require_finite(x, "erfc");
  return detail::calerf(x, detail::ErfKind::erfc);
}

/// Scaled complementary error function exp(x^2) erfc(x).
inline double erfcx(double x) {
  detail::require_finite(x, "erfcx");
  return detail::calerf(x, detail::ErfKind::erfcx);
}

/// Solves erfc(x) = p for p in (0, 2).
///
/// For p < 1 the root is positive and Newton's method runs on
/// g(x) = ln erfc(x) - ln p = -x^2 + ln erfcx(x) - ln p, which is smooth and
/// free of underflow even for p near the smallest normal double.  Every step
/// is clamped to a shrinking bracket; a step that leaves it becomes a
/// bisection.  p > 1 uses the reflection erfc(-x) = 2 - erfc(x).
inline double erfc_inv(double p) {
  if (!(p > 0.0 && p < 2.0)) throw std::domain_error("erfc_inv: argument must lie in (0, 2)");
  if (p == 1.0) return 0.0;
  if (p > 1.0) return -erfc_inv(2.0 - p);

  constexpr double two_over_sqrt_pi = 1.1283791670955126;
  const double log_p = std::log(p);

  double lo = 0.0;
  double hi = std::sqrt(-log_p) + 1.0;  // erfc(x) < exp(-x^2) for x > 0
  double x = p > 0.5 ? (1.0 - p) / two_over_sqrt_pi : std::sqrt(-log_p) * 0.9;

  for (int iter = 0; iter < 200; ++iter) {
    const double ex = erfcx(x);
    const double g = -x * x + std::log(ex) - log_p;
    if (g > 0.0) {
      lo = x;
    } else if (g < 0.0) {
      hi = x;
    } else {
      return x;
    }
    // d/dx ln erfc(x) = -(2/sqrt(pi)) / erfcx(x)
    const double slope = -two_over_sqrt_pi / ex;
    double next = x - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(next) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      return next;
    x = next;
  }
  return x;
}

}  // namespace chainbreak
