#include "phasestar/wigner.hpp"

#include "phasestar/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace phasestar {

namespace {

double norm_of(const GridSpec& grid, const std::vector<std::complex<double>>& v) {
  double s = 0;
  for (const auto& c : v) s += std::norm(c);
  return s * grid.cell_volume();
}

}  // namespace

Amplitude::Amplitude(GridSpec grid, std::vector<std::complex<double>> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw InputError("amplitude values do not match the grid size");
  for (const auto& c : values_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("amplitude has non-finite values");
  if (std::abs(norm() - 1.0) > 1e-9) throw InputError("amplitude is not normalized (sum |C|^2 da = " + std::to_string(norm()) + ")");
}

double Amplitude::norm() const { return norm_of(grid_, values_); }

std::vector<std::complex<double>> Amplitude::rescale(const GridSpec& grid, std::vector<std::complex<double>> v) {
  double n = norm_of(grid, v);
  if (!(n > 0)) throw InputError("amplitude vanishes on the grid");
  for (auto& c : v) c /= std::sqrt(n);
  return v;
}

GridState wigner_of_amplitude(const Amplitude& C, const std::vector<std::string>& A_names,
                              const std::vector<std::string>& B_names, double hbar) {
  const auto& g = C.grid();
  const std::size_t N = g.axes.size();
  if (A_names.size() != N || B_names.size() != N) throw InputError("wigner_of_amplitude: one A and one B name per label axis");
  if (!(hbar > 0)) throw InputError("hbar must be positive");

  GridSpec out;
  out.boundary = g.boundary;
  out.scheme = g.scheme;
  out.threads = g.threads;
  for (std::size_t d = 0; d < N; ++d) {
    Axis a = g.axes[d];
    a.name = A_names[d];
    out.axes.push_back(a);
  }
  for (std::size_t d = 0; d < N; ++d) {
    const auto& a = g.axes[d];
    double dB = std::numbers::pi * hbar / (a.spacing() * static_cast<double>(a.points));
    double half = static_cast<double>(a.points / 2);
    out.axes.push_back(Axis{B_names[d], -half * dB, (static_cast<double>(a.points) - half) * dB, a.points});
  }
  out.validate();

  std::vector<int> dims;
  std::size_t block = 1;
  for (const auto& a : g.axes) {
    dims.push_back(static_cast<int>(a.points));
    block *= a.points;
  }
  fftw_complex* buf = fftw_alloc_complex(block);
  fftw_plan plan = fftw_plan_dft(static_cast<int>(N), dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  auto* z = reinterpret_cast<std::complex<double>*>(buf);

  double pref = 1;
  for (const auto& a : g.axes) pref *= 2.0 * a.spacing() / (2.0 * std::numbers::pi * hbar);

  GridState f(out);
  const auto strides = g.strides();
  std::vector<long> ai(N), j(N);
  double worst_imag = 0, worst_real = 0;
  const auto& vals = C.values();
  for (std::size_t A = 0; A < block; ++A) {
    std::size_t rem = A;
    for (std::size_t d = N; d-- > 0;) {
      ai[d] = static_cast<long>(rem % g.axes[d].points);
      rem /= g.axes[d].points;
    }
    // g_j = C(A - j h) C*(A + j h) exp(-2 pi i j.half/n), j in (-n/2, n/2) per axis, stored at
    // j mod n; the phase moves the B origin to sample half = floor(n/2).
    for (std::size_t J = 0; J < block; ++J) {
      std::size_t r = J;
      bool inside = true;
      double turn = 0;
      std::size_t lo = 0, hi = 0;
      for (std::size_t d = N; d-- > 0;) {
        long n = static_cast<long>(g.axes[d].points);
        long jj = static_cast<long>(r % g.axes[d].points);
        r /= g.axes[d].points;
        if (jj >= (n + 1) / 2) jj -= n;
        if (n % 2 == 0 && jj == -n / 2) inside = false;
        long m = ai[d] - jj, p = ai[d] + jj;
        if (m < 0 || m >= n || p < 0 || p >= n) inside = false;
        turn += static_cast<double>(jj) * static_cast<double>(n / 2) / static_cast<double>(n);
        lo += static_cast<std::size_t>(std::max(0L, m)) * strides[d];
        hi += static_cast<std::size_t>(std::max(0L, p)) * strides[d];
      }
      z[J] = inside ? vals[lo] * std::conj(vals[hi]) * std::polar(1.0, -2.0 * std::numbers::pi * turn) : std::complex<double>(0.0);
    }
    fftw_execute(plan);
    for (std::size_t M = 0; M < block; ++M) {
      std::complex<double> v = pref * z[M];
      worst_imag = std::max(worst_imag, std::abs(v.imag()));
      worst_real = std::max(worst_real, std::abs(v.real()));
      f.values[A * block + M] = v.real();
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  if (worst_imag > 1e-10 * std::max(1.0, worst_real))
    throw NumericalAbort("Wigner transform left an imaginary residue of " + std::to_string(worst_imag));
  return f;
}

}  // namespace phasestar
