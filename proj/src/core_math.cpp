#include "vlcq/core_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vlcq {

SystemParams SystemParams::make(int t, double rho, double power) {
  if (t < 1) throw std::domain_error("t must be >= 1, got " + std::to_string(t));
  SystemParams p;
  p.t = t;
  p.rho = rho;
  p.power = power;
  p.alpha = alpha_of(rho, power);
  return p;
}

double alpha_of(double rho, double power) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::domain_error("rho must be a positive finite number");
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::domain_error("power must be a positive finite number");
  // exp2 is exact at integer rho; expm1 keeps precision for small rho.
  const double gap = rho < 0.5 ? std::expm1(rho * std::log(2.0)) : std::exp2(rho) - 1.0;
  return gap / power;
}

double out_open_closed(double alpha) {
  if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
  return -std::expm1(-alpha);
}

double out_full_closed(int t, double alpha) {
  if (t < 1) throw std::domain_error("t must be >= 1");
  if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
  if (t == 1) return out_open_closed(alpha);
  if (alpha == 0.0) return 0.0;
  if (std::isinf(alpha)) return 1.0;

  if (alpha < static_cast<double>(t)) {
    // e^-a * sum_{k>=t} a^k/k!; terms decrease monotonically once k > a.
    double term = std::exp(-alpha);
    for (int k = 1; k <= t; ++k) term *= alpha / k;
    double sum = 0.0;
    for (int k = t; k < t + 2000; ++k) {
      sum += term;
      term *= alpha / (k + 1);
      if (term < sum * 1e-17) break;
    }
    return sum < 1.0 ? sum : 1.0;
  }

  // 1 - e^-a * sum_{k<t} a^k/k!
  double term = std::exp(-alpha);
  double head = 0.0;
  for (int k = 0; k < t; ++k) {
    head += term;
    term *= alpha / (k + 1);
  }
  const double v = 1.0 - head;
  return v < 0.0 ? 0.0 : v;
}

}  // namespace vlcq
