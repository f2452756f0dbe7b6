#include "cogspeech/dsp.hpp"

#include <cmath>
#include <numbers>

#include "cogspeech/error.hpp"

namespace cogspeech {

void fft_radix2(std::vector<std::complex<double>> &a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw ValidationError("fft: size must be a power of two");

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * std::numbers::pi / static_cast<double>(len);
    if (!inverse) ang = -ang;
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto &v : a) v /= static_cast<double>(n);
  }
}

std::vector<double> hann_periodic(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

static double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

std::vector<double> resample_sinc(const std::vector<double> &x, int from_rate,
                                  int to_rate) {
  if (from_rate <= 0 || to_rate <= 0)
    throw ValidationError("resample: rates must be positive");
  if (from_rate == to_rate) return x;

  const long n = static_cast<long>(x.size());
  const long out_n = std::lround(static_cast<double>(n) * to_rate / from_rate);
  std::vector<double> y(static_cast<size_t>(out_n), 0.0);

  // Cutoff at 0.45 of the lower Nyquist, in cycles per input sample.
  const double cutoff =
      0.45 * std::min(1.0, static_cast<double>(to_rate) / from_rate);
  const int half_width = 32;
  const double step = static_cast<double>(from_rate) / to_rate;

  for (long i = 0; i < out_n; ++i) {
    const double t = static_cast<double>(i) * step;
    const long k0 = static_cast<long>(std::ceil(t)) - half_width;
    const long k1 = static_cast<long>(std::floor(t)) + half_width;
    double acc = 0.0, norm = 0.0;
    for (long k = k0; k <= k1; ++k) {
      const double u = t - static_cast<double>(k);
      const double win =
          0.5 + 0.5 * std::cos(std::numbers::pi * u / (half_width + 1));
      const double h = 2.0 * cutoff * sinc(2.0 * cutoff * u) * win;
      norm += h;
      if (k >= 0 && k < n) acc += x[static_cast<size_t>(k)] * h;
    }
    y[static_cast<size_t>(i)] = norm != 0.0 ? acc / norm : 0.0;
  }
  return y;
}

std::vector<double> moving_average(const std::vector<double> &x, int win) {
  if (win <= 0 || win % 2 == 0)
    throw ValidationError("moving_average: window must be odd and positive");
  const long n = static_cast<long>(x.size());
  const long half = win / 2;
  std::vector<double> cum(static_cast<size_t>(n) + 1, 0.0);
  for (long i = 0; i < n; ++i) cum[static_cast<size_t>(i + 1)] = cum[static_cast<size_t>(i)] + x[static_cast<size_t>(i)];
  std::vector<double> y(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    const long a = std::max<long>(0, i - half);
    const long b = std::min<long>(n, i + half + 1);
    // Normalized by the actual coverage so edges carry no ramp artifact.
    y[static_cast<size_t>(i)] =
        (cum[static_cast<size_t>(b)] - cum[static_cast<size_t>(a)]) /
        static_cast<double>(b - a);
  }
  return y;
}

}  // namespace cogspeech
