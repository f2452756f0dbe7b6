#include "cogspeech/mrcg.hpp"

#include <algorithm>
#include <cmath>

#include "cogspeech/error.hpp"
#include "cogspeech/gammatone.hpp"

namespace cogspeech {

Eigen::MatrixXd mean_smooth(const Eigen::MatrixXd &m, int k) {
  if (k <= 0 || k % 2 == 0)
    throw ValidationError("mean_smooth: kernel size must be odd and positive");
  const long rows = m.rows(), cols = m.cols();
  const long half = k / 2;

  // Summed-area table over the zero-padded plane.
  Eigen::MatrixXd sat = Eigen::MatrixXd::Zero(rows + 1, cols + 1);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j)
      sat(i + 1, j + 1) = m(i, j) + sat(i, j + 1) + sat(i + 1, j) - sat(i, j);

  Eigen::MatrixXd out(rows, cols);
  const double denom = static_cast<double>(k) * k;
  for (long i = 0; i < rows; ++i) {
    const long r0 = std::max<long>(0, i - half), r1 = std::min(rows, i + half + 1);
    for (long j = 0; j < cols; ++j) {
      const long c0 = std::max<long>(0, j - half), c1 = std::min(cols, j + half + 1);
      out(i, j) = (sat(r1, c1) - sat(r0, c1) - sat(r1, c0) + sat(r0, c0)) / denom;
    }
  }
  return out;
}

Eigen::MatrixXd regression_delta(const Eigen::MatrixXd &m) {
  const long rows = m.rows(), cols = m.cols();
  Eigen::MatrixXd d(rows, cols);
  auto clamp_col = [cols](long t) { return std::clamp<long>(t, 0, cols - 1); };
  for (long t = 0; t < cols; ++t) {
    const long tm1 = clamp_col(t - 1), tp1 = clamp_col(t + 1);
    const long tm2 = clamp_col(t - 2), tp2 = clamp_col(t + 2);
    d.col(t) =
        (m.col(tp1) - m.col(tm1) + 2.0 * (m.col(tp2) - m.col(tm2))) / 10.0;
  }
  return d;
}

FrameFeatureMatrix mrcg_frames(const AudioSignal &signal,
                               const MrcgOptions &options) {
  if (signal.sample_rate <= 0)
    throw ValidationError("mrcg_frames: sample rate must be positive");
  const long n = static_cast<long>(signal.samples.size());
  const long L1 = std::lround(options.frame1_s * signal.sample_rate);
  const long L2 = std::lround(options.frame2_s * signal.sample_rate);
  const long H = std::lround(options.hop_s * signal.sample_rate);
  if (n < L2)
    throw ValidationError(
        "mrcg_frames: signal shorter than the longest analysis window (" +
        std::to_string(options.frame2_s) + " s)");

  const long T = (n - L1) / H + 1;
  const int C = options.n_channels;
  const std::vector<double> freqs = erb_center_freqs(C, 50.0, 8000.0);

  Eigen::MatrixXd cg1(C, T), cg2(C, T);
  std::vector<double> cum(static_cast<size_t>(n) + 1);
  for (int c = 0; c < C; ++c) {
    const std::vector<double> y = gammatone_filter_channel(
        signal.samples, signal.sample_rate, freqs[static_cast<size_t>(c)]);
    cum[0] = 0.0;
    for (long i = 0; i < n; ++i)
      cum[static_cast<size_t>(i + 1)] =
          cum[static_cast<size_t>(i)] +
          y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    for (long t = 0; t < T; ++t) {
      const long a1 = t * H, b1 = a1 + L1;
      cg1(c, t) = std::log1p((cum[static_cast<size_t>(b1)] -
                              cum[static_cast<size_t>(a1)]) /
                             static_cast<double>(L1));
      // Long window centered on the short frame's center, clipped to the
      // signal; its energy is the mean square over the samples it covers.
      const long center = a1 + L1 / 2;
      const long a2 = std::max<long>(0, center - L2 / 2);
      const long b2 = std::min(n, center + L2 / 2);
      cg2(c, t) = std::log1p((cum[static_cast<size_t>(b2)] -
                              cum[static_cast<size_t>(a2)]) /
                             static_cast<double>(b2 - a2));
    }
  }

  const Eigen::MatrixXd cg3 = mean_smooth(cg1, options.smooth1);
  const Eigen::MatrixXd cg4 = mean_smooth(cg1, options.smooth2);

  FrameFeatureMatrix out;
  const int base_rows = 4 * C;
  out.values.resize(3 * base_rows, T);
  out.values.topRows(C) = cg1;
  out.values.middleRows(C, C) = cg2;
  out.values.middleRows(2 * C, C) = cg3;
  out.values.middleRows(3 * C, C) = cg4;
  out.values.middleRows(base_rows, base_rows) =
      regression_delta(out.values.topRows(base_rows));
  out.values.bottomRows(base_rows) =
      regression_delta(out.values.middleRows(base_rows, base_rows));

  out.row_names.reserve(static_cast<size_t>(3 * base_rows));
  char buf[32];
  for (const char *suffix : {"", "_de", "_dede"}) {
    for (int res = 1; res <= 4; ++res) {
      for (int c = 0; c < C; ++c) {
        std::snprintf(buf, sizeof(buf), "cg%d_c%02d%s", res, c, suffix);
        out.row_names.emplace_back(buf);
      }
    }
  }
  return out;
}

const std::vector<std::string> &functional_names() {
  static const std::vector<std::string> names = {
      "mean", "std", "min", "max", "range", "mode", "median", "skew", "kurt"};
  return names;
}

namespace {

// The nine statistics of one frame track. Skewness is the bias-adjusted
// Fisher form, kurtosis the bias-adjusted excess form; both fall back to 0
// for degenerate rows (zero variance or too few frames) so no NaN reaches
// the learners. Mode of continuous data is the center of the fullest of 32
// equal-width bins.
void row_functionals(const Eigen::VectorXd &row, double *out) {
  const long n = row.size();
  const double nd = static_cast<double>(n);
  const double mean = row.mean();

  double m2 = 0, m3 = 0, m4 = 0;
  double mn = row[0], mx = row[0];
  for (long i = 0; i < n; ++i) {
    const double d = row[i] - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    mn = std::min(mn, row[i]);
    mx = std::max(mx, row[i]);
  }
  m2 /= nd;
  m3 /= nd;
  m4 /= nd;

  const double sd = n >= 2 ? std::sqrt(m2 * nd / (nd - 1.0)) : 0.0;
  const double range = mx - mn;

  double mode = mn;
  if (range > 0.0) {
    constexpr int kBins = 32;
    int counts[kBins] = {0};
    for (long i = 0; i < n; ++i) {
      int b = static_cast<int>((row[i] - mn) / range * kBins);
      counts[std::min(b, kBins - 1)] += 1;
    }
    int best = 0;
    for (int b = 1; b < kBins; ++b)
      if (counts[b] > counts[best]) best = b;
    mode = mn + (best + 0.5) * range / kBins;
  }

  std::vector<double> sorted(row.data(), row.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const double median =
      n % 2 ? sorted[static_cast<size_t>(n / 2)]
            : 0.5 * (sorted[static_cast<size_t>(n / 2 - 1)] +
                     sorted[static_cast<size_t>(n / 2)]);

  double skew = 0.0;
  if (n >= 3 && m2 > 0.0)
    skew = std::sqrt(nd * (nd - 1.0)) / (nd - 2.0) * m3 / std::pow(m2, 1.5);
  double kurt = 0.0;
  if (n >= 4 && m2 > 0.0) {
    const double g2 = m4 / (m2 * m2) - 3.0;
    kurt = ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
  }

  out[0] = mean;
  out[1] = sd;
  out[2] = mn;
  out[3] = mx;
  out[4] = range;
  out[5] = mode;
  out[6] = median;
  out[7] = skew;
  out[8] = kurt;
}

}  // namespace

NamedVector functionals(const FrameFeatureMatrix &frames) {
  if (frames.values.cols() == 0)
    throw ValidationError("functionals: zero frames");
  if (static_cast<long>(frames.row_names.size()) != frames.values.rows())
    throw ValidationError("functionals: row name count mismatch");

  const auto &fnames = functional_names();
  const long rows = frames.values.rows();
  const long nf = static_cast<long>(fnames.size());

  NamedVector out;
  out.values.resize(rows * nf);
  out.names.reserve(static_cast<size_t>(rows * nf));
  double stats[9];
  for (long r = 0; r < rows; ++r) {
    row_functionals(frames.values.row(r).transpose(), stats);
    for (long f = 0; f < nf; ++f) {
      out.values[r * nf + f] = stats[f];
      out.names.push_back(frames.row_names[static_cast<size_t>(r)] + "_" +
                          fnames[static_cast<size_t>(f)]);
    }
  }
  return out;
}

NamedVector mrcg_segment_features(const AudioSignal &signal,
                                  const MrcgOptions &options) {
  return functionals(mrcg_frames(signal, options));
}

}  // namespace cogspeech
