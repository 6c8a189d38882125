#include "salfuse/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "salfuse/error.hpp"

namespace salfuse::spectral {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Dft2d {
 public:
  Dft2d(int h, int w, int sign) : n_(static_cast<std::size_t>(h) * w) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(h, w, buf_, buf_, sign, FFTW_ESTIMATE);
  }
  ~Dft2d() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buf_);
  }
  Dft2d(const Dft2d&) = delete;
  Dft2d& operator=(const Dft2d&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
  void run() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

void SpeParams::validate() const {
  if (work_height < 1 || work_width < 1) throw ConfigError("spe.work_size must be >= 1");
  if (mean_filter_size < 3 || mean_filter_size % 2 == 0)
    throw ConfigError("spe.mean_filter_size must be odd and >= 3");
  if (!(gauss_sigma > 0.0)) throw ConfigError("spe.gauss_sigma must be > 0");
  if (!(eps_log > 0.0)) throw ConfigError("spe.eps_log must be > 0");
}

SpectrumDecomposition spectrum(const GrayMap& map, double eps_log) {
  const int h = map.height();
  const int w = map.width();
  if (map.empty()) throw InvalidInput("spectrum of an empty map");
  Dft2d dft(h, w, FFTW_FORWARD);
  auto* buf = dft.data();
  for (std::size_t i = 0; i < map.size(); ++i) buf[i] = {map[i], 0.0};
  dft.run();

  SpectrumDecomposition out{GrayMap(h, w), GrayMap(h, w), GrayMap(h, w), GrayMap(h, w)};
  for (std::size_t i = 0; i < map.size(); ++i) {
    out.amplitude[i] = std::abs(buf[i]);
    out.phase[i] = std::arg(buf[i]);
    if (out.phase[i] == -M_PI) out.phase[i] = M_PI;
    out.log_spectrum[i] = std::log(out.amplitude[i] + eps_log);
  }
  return out;
}

GrayMap inverse_spectrum(const GrayMap& amplitude, const GrayMap& phase) {
  const int h = amplitude.height();
  const int w = amplitude.width();
  if (phase.height() != h || phase.width() != w)
    throw InvalidInput("amplitude and phase dimensions differ");
  Dft2d idft(h, w, FFTW_BACKWARD);
  auto* buf = idft.data();
  for (std::size_t i = 0; i < amplitude.size(); ++i) buf[i] = std::polar(amplitude[i], phase[i]);
  idft.run();
  const double scale = 1.0 / static_cast<double>(amplitude.size());
  GrayMap out(h, w);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real() * scale;
  return out;
}

GrayMap box_filter(const GrayMap& map, int size) {
  if (size < 1 || size % 2 == 0)
    throw InvalidInput("box filter size must be odd, got " + std::to_string(size));
  const int half = size / 2;
  const int h = map.height();
  const int w = map.width();
  GrayMap out(h, w);
  const double norm = 1.0 / (static_cast<double>(size) * size);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dr = -half; dr <= half; ++dr) {
        const int rr = std::clamp(r + dr, 0, h - 1);
        for (int dc = -half; dc <= half; ++dc) acc += map.at(rr, std::clamp(c + dc, 0, w - 1));
      }
      out.at(r, c) = acc * norm;
    }
  }
  return out;
}

GrayMap spectral_residual(const GrayMap& log_spectrum, int mean_filter_size) {
  if (mean_filter_size < 3 || mean_filter_size % 2 == 0) {
    throw InvalidInput("mean filter size must be odd and >= 3, got " +
                       std::to_string(mean_filter_size));
  }
  const GrayMap avg = box_filter(log_spectrum, mean_filter_size);
  GrayMap out(log_spectrum.height(), log_spectrum.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_spectrum[i] - avg[i];
  return out;
}

GrayMap gaussian_blur(const GrayMap& map, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("gaussian sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    total += kernel[k + radius];
  }
  for (double& v : kernel) v /= total;

  const int h = map.height();
  const int w = map.width();
  GrayMap tmp(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * map.at(r, std::clamp(c + k, 0, w - 1));
      tmp.at(r, c) = acc;
    }
  GrayMap out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * tmp.at(std::clamp(r + k, 0, h - 1), c);
      out.at(r, c) = acc;
    }
  return out;
}

GrayMap residual_reconstruction(const GrayMap& work_map, const SpeParams& params) {
  SpectrumDecomposition spec = spectrum(work_map, params.eps_log);
  spec.residual = spectral_residual(spec.log_spectrum, params.mean_filter_size);

  const int h = work_map.height();
  const int w = work_map.width();
  Dft2d idft(h, w, FFTW_BACKWARD);
  auto* buf = idft.data();
  for (std::size_t i = 0; i < work_map.size(); ++i)
    buf[i] = std::polar(std::exp(spec.residual[i]), spec.phase[i]);
  idft.run();
  const double scale = 1.0 / static_cast<double>(work_map.size());
  GrayMap out(h, w);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(buf[i] * scale);
  return out;
}

GrayMap spe_saliency(const RasterImage& img, const SpeParams& params) {
  params.validate();
  const GrayMap lum = rgb_to_luminance(img);
  const GrayMap work = resize_bilinear(lum, params.work_height, params.work_width);
  const GrayMap blurred = gaussian_blur(residual_reconstruction(work, params), params.gauss_sigma);
  return resize_bilinear(normalize_map(blurred), img.height(), img.width());
}

}  // namespace salfuse::spectral
