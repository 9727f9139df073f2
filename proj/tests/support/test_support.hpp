#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

// Shared helpers for the test binaries only.
namespace test_support {

// In-place iterative radix-2 FFT; n must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Welch power spectral density with Hann windows and 50% overlap; returns
// one-sided bin powers (arbitrary common scale), bin k at k*fs/segment.
inline std::vector<double> welch_psd(const std::vector<double>& x,
                                     std::size_t segment) {
  std::vector<double> psd(segment / 2 + 1, 0.0);
  if (x.size() < segment) return psd;
  std::vector<double> window(segment);
  for (std::size_t i = 0; i < segment; ++i)
    window[i] =
        0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                             static_cast<double>(segment));
  std::size_t n_seg = 0;
  std::vector<std::complex<double>> buf(segment);
  for (std::size_t start = 0; start + segment <= x.size();
       start += segment / 2) {
    for (std::size_t i = 0; i < segment; ++i)
      buf[i] = x[start + i] * window[i];
    fft(buf);
    for (std::size_t k = 0; k < psd.size(); ++k)
      psd[k] += std::norm(buf[k]);
    ++n_seg;
  }
  for (auto& v : psd) v /= static_cast<double>(n_seg);
  return psd;
}

// Classical fourth-order Runge-Kutta on a fixed-size ODE, used as an
// independent cross-check of the circuit propagation.
template <typename Deriv>
inline void rk4(double state[2], double t0, double t1, int steps, Deriv f) {
  const double h = (t1 - t0) / steps;
  double k1[2], k2[2], k3[2], k4[2], tmp[2];
  double t = t0;
  for (int s = 0; s < steps; ++s) {
    f(t, state, k1);
    for (int i = 0; i < 2; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (int i = 0; i < 2; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (int i = 0; i < 2; ++i) tmp[i] = state[i] + h * k3[i];
    f(t + h, tmp, k4);
    for (int i = 0; i < 2; ++i)
      state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += h;
  }
}

}  // namespace test_support
