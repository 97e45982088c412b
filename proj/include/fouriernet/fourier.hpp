#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fouriernet/contour.hpp"

namespace fouriernet {

struct FourierCoefficients {
  double a = 0.0;
  double b = 0.0;
};

// First N harmonics of the distance-to-center function of one contour.
// The amplitudes form the shape descriptor; phases are kept for inspection.
struct FourierDescriptorSet {
  std::vector<FourierCoefficients> coefficients;  // n = 1..N
  std::vector<double> amplitudes;                 // A_n = sqrt(a_n^2 + b_n^2)
  std::vector<double> phases;                     // atan2(b_n, a_n)

  std::size_t order() const { return amplitudes.size(); }
};

// Closed-form coefficients of the piecewise-constant radial function:
//   a_n =  1/(pi n) * sum_t dxi_t sin(2 pi n l_t / L)
//   b_n = -1/(pi n) * sum_t dxi_t cos(2 pi n l_t / L)
// with dxi_t = xi_{t-1} - xi_t for t = 1..T, wrapping xi_T = xi_0 and l_T = L.
FourierCoefficients fourier_coefficients(const Contour& contour, int n);

// Direct numerical integration of
//   a_n = 2/L * int_0^L xi(l) cos(2 pi n l / L) dl   (b_n with sin)
// where xi(l) = xi_{t-1} on [l_{t-1}, l_t). Midpoint rule on `samples` uniform
// cells; a cell containing a knot of xi is split there so each piece sees a
// single constant value.
FourierCoefficients fourier_coefficients_quadrature(const Contour& contour, int n,
                                                    std::size_t samples);

FourierDescriptorSet descriptor_set(const Contour& contour, int order);

// Sum of dxi_t over t = 1..T in index order, evaluated exactly (each difference
// is split into an error-free pair and accumulated without rounding). Zero for
// every closed contour.
double telescoping_sum(const Contour& contour);

// CSV with columns component_id,n,a_n,b_n,A_n,alpha_n (header included).
void write_descriptor_csv_header(std::ostream& out);
void write_descriptor_csv_rows(std::ostream& out, int component_id,
                               const FourierDescriptorSet& set);

namespace detail {

// Correctly rounded sum of the given values (Shewchuk's exact partials).
double exact_sum(const std::vector<double>& values);

}  // namespace detail

}  // namespace fouriernet
