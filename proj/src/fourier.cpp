#include "fouriernet/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet {

namespace {

void check_harmonic(int n) {
  if (n < 1) throw InvalidHarmonic("harmonic index must be >= 1, got " + std::to_string(n));
}

}  // namespace

FourierCoefficients fourier_coefficients(const Contour& contour, int n) {
  check_harmonic(n);
  const auto& xi = contour.radial();
  const auto& l = contour.arc_lengths();
  const std::size_t t_count = contour.size();
  const double length = contour.total_length();
  const double omega = 2.0 * std::numbers::pi * n / length;

  double sum_sin = 0.0;
  double sum_cos = 0.0;
  for (std::size_t t = 1; t <= t_count; ++t) {
    const double xi_t = t == t_count ? xi[0] : xi[t];
    const double l_t = t == t_count ? length : l[t];
    const double delta = xi[t - 1] - xi_t;
    if (delta == 0.0) continue;
    sum_sin += delta * std::sin(omega * l_t);
    sum_cos += delta * std::cos(omega * l_t);
  }
  const double scale = 1.0 / (std::numbers::pi * n);
  return {scale * sum_sin, -scale * sum_cos};
}

FourierCoefficients fourier_coefficients_quadrature(const Contour& contour, int n,
                                                    std::size_t samples) {
  check_harmonic(n);
  if (samples < 1000) {
    throw TooFewSamples("quadrature needs at least 1000 samples, got " + std::to_string(samples));
  }
  const auto& xi = contour.radial();
  const auto& l = contour.arc_lengths();
  const std::size_t t_count = contour.size();
  const double length = contour.total_length();
  const double omega = 2.0 * std::numbers::pi * n / length;
  const double h = length / static_cast<double>(samples);

  double acc_cos = 0.0;
  double acc_sin = 0.0;
  auto piece = [&](double lo, double hi, double value) {
    const double width = hi - lo;
    if (width <= 0.0) return;
    const double mid = 0.5 * (lo + hi);
    acc_cos += value * std::cos(omega * mid) * width;
    acc_sin += value * std::sin(omega * mid) * width;
  };

  std::size_t seg = 0;  // xi(l) = xi[seg] on [l[seg], l[seg + 1])
  for (std::size_t k = 0; k < samples; ++k) {
    double lo = static_cast<double>(k) * h;
    const double hi = k + 1 == samples ? length : static_cast<double>(k + 1) * h;
    while (seg + 1 < t_count && l[seg + 1] < hi) {
      piece(lo, l[seg + 1], xi[seg]);
      lo = std::max(lo, l[seg + 1]);
      ++seg;
    }
    piece(lo, hi, xi[seg]);
  }
  return {2.0 / length * acc_cos, 2.0 / length * acc_sin};
}

FourierDescriptorSet descriptor_set(const Contour& contour, int order) {
  if (order < 1) throw InvalidHarmonic("descriptor order must be >= 1");
  FourierDescriptorSet set;
  set.coefficients.reserve(order);
  set.amplitudes.reserve(order);
  set.phases.reserve(order);
  for (int n = 1; n <= order; ++n) {
    const auto c = fourier_coefficients(contour, n);
    set.coefficients.push_back(c);
    set.amplitudes.push_back(std::sqrt(c.a * c.a + c.b * c.b));
    set.phases.push_back(std::atan2(c.b, c.a));
  }
  return set;
}

namespace detail {

double exact_sum(const std::vector<double>& values) {
  std::vector<double> partials;
  for (double x : values) {
    std::size_t kept = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[kept++] = lo;
      x = hi;
    }
    partials.resize(kept);
    partials.push_back(x);
  }
  double total = 0.0;
  for (auto it = partials.rbegin(); it != partials.rend(); ++it) total += *it;
  return total;
}

}  // namespace detail

double telescoping_sum(const Contour& contour) {
  const auto& xi = contour.radial();
  const std::size_t t_count = contour.size();
  std::vector<double> terms;
  terms.reserve(2 * t_count);
  for (std::size_t t = 1; t <= t_count; ++t) {
    const double a = xi[t - 1];
    const double b = -(t == t_count ? xi[0] : xi[t]);
    // TwoSum: a + b == hi + lo exactly.
    const double hi = a + b;
    const double bv = hi - a;
    const double lo = (a - (hi - bv)) + (b - bv);
    terms.push_back(hi);
    terms.push_back(lo);
  }
  return detail::exact_sum(terms);
}

void write_descriptor_csv_header(std::ostream& out) {
  out << "component_id,n,a_n,b_n,A_n,alpha_n\n";
}

void write_descriptor_csv_rows(std::ostream& out, int component_id,
                               const FourierDescriptorSet& set) {
  char buf[256];
  for (std::size_t i = 0; i < set.order(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g\n", component_id, i + 1,
                  set.coefficients[i].a, set.coefficients[i].b, set.amplitudes[i], set.phases[i]);
    out << buf;
  }
}

}  // namespace fouriernet
