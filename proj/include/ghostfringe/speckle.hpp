#pragma once

#include "ghostfringe/aperture.hpp"
#include "ghostfringe/correlation.hpp"
#include "ghostfringe/layout.hpp"
#include "ghostfringe/propagation.hpp"
#include "ghostfringe/source.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace ghostfringe {

/// Position of the fixed detector pixel and the arm it sits in.
struct ProbeConfig {
  Arm arm = Arm::one;
  double position = 0.0;
};

/// Contiguous block of simulation-grid samples read out as CCD pixels.
struct DetectorRegion {
  SpatialGrid grid;
  std::size_t first;
  std::size_t count;

  /// All samples with |x| <= half_width.
  static DetectorRegion centred(const SpatialGrid &grid, double half_width);

  double coordinate(std::size_t pixel) const noexcept { return grid.coordinate(first + pixel); }
  std::vector<double> coordinates() const;
  std::size_t pixel_of(double x) const;
};

/// Everything needed to simulate one ensemble.
struct Scenario {
  ExperimentLayout layout;
  AperturePair apertures;
  SourceSpec source;
  SpatialGrid grid;
  std::size_t frames = 5000;
  std::uint64_t master_seed = 42;
  ProbeConfig probe{};
  double detector_half_width = 10e-3;
  bool field_diagnostics = false;
  std::size_t matrix_stride = 0;

  /// Layout and slits from the reference setup, canonical apertures with a
  /// 920 um outer support, 5 um source coherence length, 10 mm envelope,
  /// 122.88 mm / 49152-sample grid, 5000 frames.
  static Scenario paper_default();

  /// Throws SamplingBoundError or InvalidArgument.
  void validate() const;

  DetectorRegion detector() const;
  AccumulatorConfig accumulator_config() const;
};

/// Intensities (and optionally fields) of one frame on the detector pixels.
struct FrameRecord {
  std::vector<double> intensity1;
  std::vector<double> intensity2;
  std::vector<Complex> field1;
  std::vector<Complex> field2;

  const std::vector<double> &intensity(Arm a) const noexcept {
    return a == Arm::one ? intensity1 : intensity2;
  }
  const std::vector<Complex> &field(Arm a) const noexcept {
    return a == Arm::one ? field1 : field2;
  }
  bool has_fields() const noexcept { return !field1.empty(); }
};

/// Seed of the random stream of one frame: a SplitMix64-style keyed hash of
/// (master_seed, frame_index). Independent of scheduling.
std::uint64_t frame_stream_seed(std::uint64_t master_seed, std::uint64_t frame_index) noexcept;

using RandomStream = std::mt19937_64;

/// One realization of the pseudothermal source field.
///
/// Samples are circular complex Gaussian with variance W0/spacing (a
/// discrete Dirac delta of weight W0); for a finite correlation length the
/// white noise is smoothed by a unit-area Gaussian of standard deviation
/// lc/sqrt(2), giving a field correlation W0 * N(0, lc^2). The envelope is
/// applied last.
ComplexField sample_source_field(const SourceSpec &source, const SpatialGrid &grid,
                                 RandomStream &stream);

/// Reusable per-thread simulation state for one scenario.
class FrameSimulator {
public:
  explicit FrameSimulator(const Scenario &scenario);

  FrameRecord simulate(std::uint64_t frame_index);

private:
  const Scenario &scenario_;
  DetectorRegion detector_;
  std::vector<FresnelPropagator> to_aperture_;
  std::vector<FresnelPropagator> to_detector_;
  bool shared_first_segment_;
};

/// Source -> split into identical copies -> propagate L0_j -> mask A_j ->
/// propagate L_j -> |E|^2 on the detector pixels.
FrameRecord simulate_frame(const Scenario &scenario, std::uint64_t frame_index);

/// Frames per block of the ensemble reduction. Blocks are summed
/// sequentially inside and merged in index order, which makes the result
/// independent of the worker count.
inline constexpr std::size_t ensemble_block_frames = 32;

CorrelationAccumulator run_ensemble(const Scenario &scenario, unsigned workers = 1);

} // namespace ghostfringe
