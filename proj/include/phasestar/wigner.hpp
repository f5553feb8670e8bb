#pragma once

#include "phasestar/grid.hpp"

#include <complex>
#include <string>
#include <vector>

namespace phasestar {

// C(a) sampled on a grid over the history labels. Construction checks the
// normalization sum |C|^2 da = 1 to within 1e-9.
class Amplitude {
 public:
  Amplitude(GridSpec grid, std::vector<std::complex<double>> values);
  template <class F>
  static Amplitude normalized(const GridSpec& grid, F&& fn) {
    std::vector<std::complex<double>> v(grid.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = fn(grid.point(n));
    return Amplitude(grid, rescale(grid, std::move(v)));
  }

  const GridSpec& grid() const { return grid_; }
  const std::vector<std::complex<double>>& values() const { return values_; }
  double norm() const;

 private:
  static std::vector<std::complex<double>> rescale(const GridSpec& grid, std::vector<std::complex<double>> v);
  GridSpec grid_;
  std::vector<std::complex<double>> values_;
};

// f(A, B) = (2 pi hbar)^{-N} int dDelta C(A - Delta/2) C*(A + Delta/2) exp(i Delta.B / hbar),
// with Delta stepping by twice the label spacing. The B axes use n points of spacing
// pi hbar/(h n) centred on 0, which makes sum_B f dB equal |C(A)|^2 exactly.
// Axes come out as A_names then B_names.
GridState wigner_of_amplitude(const Amplitude& C, const std::vector<std::string>& A_names,
                              const std::vector<std::string>& B_names, double hbar);

}  // namespace phasestar
