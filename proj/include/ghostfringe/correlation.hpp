#pragma once

#include "ghostfringe/grid.hpp"
#include "ghostfringe/layout.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ghostfringe {

struct FrameRecord;

/// Shape of an accumulator; two accumulators merge only if these match.
struct AccumulatorConfig {
  std::vector<double> positions; ///< detector pixel coordinates, metres
  std::size_t probe_pixel = 0;
  /// Arm of the fixed pixel for the field-coherence diagnostics; the other
  /// arm is scanned.
  Arm probe_arm = Arm::one;
  bool field_diagnostics = false;
  /// Pixel stride of the optional g2(x1, x2) matrix; 0 disables it.
  std::size_t matrix_stride = 0;

  bool operator==(const AccumulatorConfig &) const = default;
};

/// Running sums over frames for singles, probe cross-correlations in both
/// scan directions and (optionally) field cross-correlations.
///
/// All sums are plain additions, so merge() is associative and commutative
/// up to floating-point rounding.
class CorrelationAccumulator {
public:
  explicit CorrelationAccumulator(AccumulatorConfig config);

  const AccumulatorConfig &config() const noexcept { return config_; }
  std::size_t pixels() const noexcept { return config_.positions.size(); }
  std::uint64_t frame_count() const noexcept { return frames_; }

  void update(const FrameRecord &frame);
  void merge(const CorrelationAccumulator &other);

  /// Per-arm sums of I and I^2.
  const std::vector<double> &sum_intensity(Arm a) const { return sum_i_[arm_index(a)]; }
  const std::vector<double> &sum_intensity_sq(Arm a) const { return sum_ii_[arm_index(a)]; }

  /// Sums for the slice scanning `scan` with the probe pixel in the other arm:
  /// sum I_s(x) I_p, sum I_s^2 I_p^2, sum I_s^2 I_p, sum I_s I_p^2.
  struct CrossSums {
    std::vector<double> product;
    std::vector<double> product_sq;
    std::vector<double> product_scan;
    std::vector<double> product_probe;
  };
  const CrossSums &cross(Arm scan) const { return cross_[arm_index(scan)]; }

  /// Sums of Z = E_probe*(p) E_scan(x) and their second moments with
  /// the intensities, for the configured probe arm.
  struct FieldSums {
    std::vector<double> re, im, re_re, im_im, re_im;
    std::vector<double> re_scan, im_scan, re_probe, im_probe;
  };
  const FieldSums &field_sums() const { return field_; }

  /// Sum of I1(x_a) I2(x_b) over the decimated pixel set, row-major.
  const std::vector<double> &matrix_sums() const { return matrix_; }
  std::vector<std::size_t> matrix_pixels() const;

private:
  AccumulatorConfig config_;
  std::uint64_t frames_ = 0;
  std::array<std::vector<double>, 2> sum_i_;
  std::array<std::vector<double>, 2> sum_ii_;
  std::array<CrossSums, 2> cross_;
  FieldSums field_;
  std::vector<double> matrix_;
};

CorrelationAccumulator merge(const CorrelationAccumulator &a, const CorrelationAccumulator &b);

/// Fraction of the arm's mean intensity below which a pixel is undefined.
inline constexpr double dark_pixel_floor = 1e-9;

/// g2 scanned across one arm with the probe pixel fixed in the other.
struct G2Slice {
  Arm scan_arm = Arm::two;
  double probe_position = 0.0;
  std::uint64_t frame_count = 0;
  std::vector<double> positions;
  std::vector<double> g2;
  std::vector<double> standard_error;
  std::vector<std::uint8_t> defined;

  std::size_t size() const noexcept { return positions.size(); }
};

/// Ratio-of-means estimate <I_s(x) I_p> / (<I_s(x)> <I_p>) with a
/// delta-method standard error. Pixels (or the whole slice) are flagged
/// undefined, with NaN values, for fewer than two frames or a dark pixel.
G2Slice g2_slice(const CorrelationAccumulator &acc, Arm scan_arm);

struct SinglesProfile {
  Arm arm = Arm::one;
  std::vector<double> positions;
  std::vector<double> mean;
  std::vector<double> standard_error;
};

SinglesProfile singles_profile(const CorrelationAccumulator &acc, Arm arm);

/// Per-pixel comparison of g2 - 1 with the normalized field coherence
/// |<E_p* E_s>|^2 / (<I_p><I_s>).
struct SiegertReport {
  Arm scan_arm = Arm::two;
  std::vector<double> positions;
  std::vector<double> g2_minus_one;
  std::vector<double> g2_stderr;
  std::vector<double> coherence_sq;
  std::vector<double> coherence_stderr;
  std::vector<std::uint8_t> defined;

  double combined_stderr(std::size_t i) const;
  /// Fraction of defined pixels with |x - centre| <= half_width whose two
  /// estimates agree within `sigmas` combined standard errors.
  double agreement_fraction(double sigmas, double centre, double half_width) const;
};

/// Requires field diagnostics; throws InvalidArgument otherwise.
SiegertReport siegert_check(const CorrelationAccumulator &acc);

/// Decimated g2(x1, x2) matrix; empty when disabled.
struct G2Matrix {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> g2; ///< row-major, rows indexed by x1
};
G2Matrix g2_matrix(const CorrelationAccumulator &acc);

} // namespace ghostfringe
