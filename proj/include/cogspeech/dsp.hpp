#pragma once

#include <complex>
#include <vector>

namespace cogspeech {

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>> &a, bool inverse);

// Periodic Hann window (sums to a constant at 50% overlap).
std::vector<double> hann_periodic(int n);

// Windowed-sinc resampler. Output length = round(n * to_rate / from_rate).
std::vector<double> resample_sinc(const std::vector<double> &x, int from_rate,
                                  int to_rate);

// Centered moving average, normalized by the window's in-range coverage at
// the edges; win must be odd.
std::vector<double> moving_average(const std::vector<double> &x, int win);

}  // namespace cogspeech
