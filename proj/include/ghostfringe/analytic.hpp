#pragma once

#include "ghostfringe/aperture.hpp"
#include "ghostfringe/layout.hpp"
#include "ghostfringe/source.hpp"

#include <complex>
#include <optional>

namespace ghostfringe {

/// Unnormalized sinc, sin(u)/u, with a series branch near zero.
double sinc(double u) noexcept;

/// First-order field cross-correlation <E1*(x1) E2(x2)> between the arms.
struct CoherenceValue {
  std::complex<double> value;
  double x1;
  double x2;
};

/// Fourier transform of the double-slit function,
/// (2b/sqrt(2pi)) sinc(qb/2) cos(qd/2), in metres.
double double_slit_transform(double q, const DoubleSlitSpec &slit) noexcept;

// Broadband closed forms. All of them refuse (RegimeError) a source with a
// finite correlation length; the coherence and g2 forms also refuse
// asymmetric arms.

double mean_intensity(const ExperimentLayout &layout, Arm arm,
                      const ApertureProfile &aperture, const SourceSpec &source);

CoherenceValue mutual_coherence(double x1, double x2, const ExperimentLayout &layout,
                                const DoubleSlitSpec &slit, const SourceSpec &source);

/// 1 + |<E1* E2>|^2 / (<I1><I2>).
double g2_model(double x1, double x2, const ExperimentLayout &layout,
                const AperturePair &apertures, const DoubleSlitSpec &slit,
                const SourceSpec &source);

struct FringeMetrics {
  double period;              ///< lambda L / d
  double envelope_first_zero; ///< lambda L / b
  double visibility_factor;   ///< (2b)^2 / (int A1^2 * int A2^2)
};

FringeMetrics fringe_metrics(const ExperimentLayout &layout, const DoubleSlitSpec &slit,
                             const AperturePair &apertures);

/// Sampling of the source plane used by the quadrature oracle.
struct SourceSampling {
  double half_window;
  double spacing;
};

/// Source sampling resolving the envelope to +-3 radii and the cross-arm
/// oscillation exp(-i k x0 (x'-x'')/L0) four times per period.
SourceSampling default_source_sampling(const ExperimentLayout &layout,
                                       const AperturePair &apertures,
                                       const SourceSpec &source);

/// Largest aperture-plane spacing for which the two-segment Fresnel chirp is
/// sampled below Nyquist, given the aperture support, the source window and
/// the detector coordinate.
double quadrature_sampling_bound(const ExperimentLayout &layout, Arm arm,
                                 const ApertureProfile &aperture,
                                 const SourceSampling &sampling, double x);

/// <E1*(x1) E2(x2)> by direct quadrature of the general correlation
/// integral, with each transfer function h_j evaluated as a Riemann sum over
/// the aperture samples. Valid for any coherence length and per-arm
/// distances.
CoherenceValue mutual_coherence_quadrature(double x1, double x2,
                                           const ExperimentLayout &layout,
                                           const AperturePair &apertures,
                                           const SourceSpec &source,
                                           std::optional<SourceSampling> sampling = {});

double mean_intensity_quadrature(double x, const ExperimentLayout &layout, Arm arm,
                                 const ApertureProfile &aperture,
                                 const SourceSpec &source,
                                 std::optional<SourceSampling> sampling = {});

} // namespace ghostfringe
