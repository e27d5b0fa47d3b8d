#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sqz::quad {

/// Composite Simpson rule on n (even) panels over [a, b].
template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("simpson: panel count must be even and >= 2");
  const double h = (b - a) / static_cast<double>(panels);
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < panels; ++i) {
    const double v = f(a + static_cast<double>(i) * h);
    (i % 2 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

/// Running trapezoid integral of uniformly spaced samples; out[0] = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> y, double h) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (y[i - 1] + y[i]);
  return out;
}

}  // namespace sqz::quad
