#pragma once

#include "salfuse/imaging.hpp"

namespace salfuse::spectral {

struct SpeParams {
  int work_height = 64;
  int work_width = 64;
  int mean_filter_size = 3;
  double gauss_sigma = 2.5;
  // one 8-bit quantization step
  double eps_log = 1.0 / 255.0;

  void validate() const;
};

// Polar form of the 2-D DFT of a map. The log amplitude spectrum is
// expected to follow a 1/f falloff for natural images; the residual holds
// whatever deviates from its local average.
struct SpectrumDecomposition {
  GrayMap amplitude;
  GrayMap phase;         // in (-pi, pi]
  GrayMap log_spectrum;  // log(amplitude + eps_log)
  GrayMap residual;      // zeros until spectral_residual fills it
};

SpectrumDecomposition spectrum(const GrayMap& map, double eps_log = 1.0 / 255.0);

// Inverse DFT of amplitude * exp(i * phase), real part.
GrayMap inverse_spectrum(const GrayMap& amplitude, const GrayMap& phase);

/// L minus its n x n clamp-to-edge box average. Throws InvalidInput for
/// even or sub-3 window sizes.
GrayMap spectral_residual(const GrayMap& log_spectrum, int mean_filter_size);

GrayMap box_filter(const GrayMap& map, int size);
GrayMap gaussian_blur(const GrayMap& map, double sigma);

// |IDFT(exp(R) * exp(iP))|^2 at the map's own resolution, before blurring.
GrayMap residual_reconstruction(const GrayMap& work_map, const SpeParams& params);

GrayMap spe_saliency(const RasterImage& img, const SpeParams& params);

}  // namespace salfuse::spectral
