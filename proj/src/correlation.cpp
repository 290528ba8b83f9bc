#include "ghostfringe/correlation.hpp"
#include "ghostfringe/errors.hpp"
#include "ghostfringe/speckle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghostfringe {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void resize_all(std::initializer_list<std::vector<double> *> vs, std::size_t n) {
  for (auto *v : vs)
    v->assign(n, 0.0);
}

void add_into(std::vector<double> &dst, const std::vector<double> &src) {
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] += src[i];
}

// Unbiased covariance from sums over n samples.
double covariance(double sum_xy, double sum_x, double sum_y, double n) {
  return (sum_xy - sum_x * sum_y / n) / (n - 1.0);
}

double arm_mean_level(const std::vector<double> &sums) {
  double s = 0.0;
  for (double v : sums)
    s += v;
  return sums.empty() ? 0.0 : s / static_cast<double>(sums.size());
}

} // namespace

CorrelationAccumulator::CorrelationAccumulator(AccumulatorConfig config) : config_(std::move(config)) {
  const std::size_t n = config_.positions.size();
  if (n == 0)
    throw InvalidArgument("accumulator needs at least one pixel");
  if (config_.probe_pixel >= n)
    throw InvalidArgument("probe pixel lies outside the detector");
  for (std::size_t a = 0; a < 2; ++a) {
    resize_all({&sum_i_[a], &sum_ii_[a], &cross_[a].product, &cross_[a].product_sq,
                &cross_[a].product_scan, &cross_[a].product_probe},
               n);
  }
  if (config_.field_diagnostics) {
    resize_all({&field_.re, &field_.im, &field_.re_re, &field_.im_im, &field_.re_im,
                &field_.re_scan, &field_.im_scan, &field_.re_probe, &field_.im_probe},
               n);
  }
  if (config_.matrix_stride > 0) {
    const std::size_t m = (n + config_.matrix_stride - 1) / config_.matrix_stride;
    matrix_.assign(m * m, 0.0);
  }
}

std::vector<std::size_t> CorrelationAccumulator::matrix_pixels() const {
  std::vector<std::size_t> idx;
  if (config_.matrix_stride == 0)
    return idx;
  for (std::size_t i = 0; i < pixels(); i += config_.matrix_stride)
    idx.push_back(i);
  return idx;
}

void CorrelationAccumulator::update(const FrameRecord &frame) {
  const std::size_t n = pixels();
  if (frame.intensity1.size() != n || frame.intensity2.size() != n)
    throw GridMismatch("frame has " + std::to_string(frame.intensity1.size()) +
                       " pixels, accumulator expects " + std::to_string(n));
  const std::size_t p = config_.probe_pixel;

  for (Arm scan : {Arm::one, Arm::two}) {
    const std::size_t s = arm_index(scan);
    const auto &is = frame.intensity(scan);
    const double ip = frame.intensity(other_arm(scan))[p];
    auto &c = cross_[s];
    for (std::size_t i = 0; i < n; ++i) {
      const double v = is[i];
      sum_i_[s][i] += v;
      sum_ii_[s][i] += v * v;
      const double prod = v * ip;
      c.product[i] += prod;
      c.product_sq[i] += prod * prod;
      c.product_scan[i] += prod * v;
      c.product_probe[i] += prod * ip;
    }
  }

  if (config_.field_diagnostics) {
    if (!frame.has_fields() || frame.field1.size() != n || frame.field2.size() != n)
      throw InvalidArgument("field diagnostics enabled but the frame carries no fields");
    const Arm probe_arm = config_.probe_arm;
    const Arm scan = other_arm(probe_arm);
    const Complex ep = std::conj(frame.field(probe_arm)[p]);
    const double ip = frame.intensity(probe_arm)[p];
    const auto &es = frame.field(scan);
    const auto &is = frame.intensity(scan);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex z = ep * es[i];
      const double re = z.real(), im = z.imag();
      field_.re[i] += re;
      field_.im[i] += im;
      field_.re_re[i] += re * re;
      field_.im_im[i] += im * im;
      field_.re_im[i] += re * im;
      field_.re_scan[i] += re * is[i];
      field_.im_scan[i] += im * is[i];
      field_.re_probe[i] += re * ip;
      field_.im_probe[i] += im * ip;
    }
  }

  if (config_.matrix_stride > 0) {
    const auto idx = matrix_pixels();
    const std::size_t m = idx.size();
    for (std::size_t a = 0; a < m; ++a) {
      const double i1 = frame.intensity1[idx[a]];
      for (std::size_t b = 0; b < m; ++b)
        matrix_[a * m + b] += i1 * frame.intensity2[idx[b]];
    }
  }
  ++frames_;
}

void CorrelationAccumulator::merge(const CorrelationAccumulator &other) {
  if (!(config_ == other.config_))
    throw GridMismatch("cannot merge accumulators with different configurations");
  for (std::size_t a = 0; a < 2; ++a) {
    add_into(sum_i_[a], other.sum_i_[a]);
    add_into(sum_ii_[a], other.sum_ii_[a]);
    add_into(cross_[a].product, other.cross_[a].product);
    add_into(cross_[a].product_sq, other.cross_[a].product_sq);
    add_into(cross_[a].product_scan, other.cross_[a].product_scan);
    add_into(cross_[a].product_probe, other.cross_[a].product_probe);
  }
  if (config_.field_diagnostics) {
    add_into(field_.re, other.field_.re);
    add_into(field_.im, other.field_.im);
    add_into(field_.re_re, other.field_.re_re);
    add_into(field_.im_im, other.field_.im_im);
    add_into(field_.re_im, other.field_.re_im);
    add_into(field_.re_scan, other.field_.re_scan);
    add_into(field_.im_scan, other.field_.im_scan);
    add_into(field_.re_probe, other.field_.re_probe);
    add_into(field_.im_probe, other.field_.im_probe);
  }
  add_into(matrix_, other.matrix_);
  frames_ += other.frames_;
}

CorrelationAccumulator merge(const CorrelationAccumulator &a, const CorrelationAccumulator &b) {
  CorrelationAccumulator out = a;
  out.merge(b);
  return out;
}

G2Slice g2_slice(const CorrelationAccumulator &acc, Arm scan_arm) {
  const auto &cfg = acc.config();
  const std::size_t n_pix = acc.pixels();
  const Arm probe_arm = other_arm(scan_arm);
  G2Slice out;
  out.scan_arm = scan_arm;
  out.probe_position = cfg.positions[cfg.probe_pixel];
  out.frame_count = acc.frame_count();
  out.positions = cfg.positions;
  out.g2.assign(n_pix, nan);
  out.standard_error.assign(n_pix, nan);
  out.defined.assign(n_pix, 0);
  if (acc.frame_count() < 2)
    return out;

  const double n = static_cast<double>(acc.frame_count());
  const auto &sb = acc.sum_intensity(scan_arm);
  const auto &sbb = acc.sum_intensity_sq(scan_arm);
  const double sc = acc.sum_intensity(probe_arm)[cfg.probe_pixel];
  const double scc = acc.sum_intensity_sq(probe_arm)[cfg.probe_pixel];
  const auto &cs = acc.cross(scan_arm);

  const double scan_floor = dark_pixel_floor * arm_mean_level(sb) / n;
  const double probe_floor = dark_pixel_floor * arm_mean_level(acc.sum_intensity(probe_arm)) / n;
  const double c = sc / n;
  if (!(c > probe_floor) || !(c > 0.0))
    return out;

  const double var_c = covariance(scc, sc, sc, n);
  for (std::size_t i = 0; i < n_pix; ++i) {
    const double b = sb[i] / n;
    if (!(b > scan_floor) || !(b > 0.0))
      continue;
    const double a = cs.product[i] / n;
    const double g = a / (b * c);
    // Gradient of a/(b c) and covariance of (A, B, C) per frame.
    const double ga = 1.0 / (b * c);
    const double gb = -g / b;
    const double gc = -g / c;
    const double var_a = covariance(cs.product_sq[i], cs.product[i], cs.product[i], n);
    const double var_b = covariance(sbb[i], sb[i], sb[i], n);
    const double cov_ab = covariance(cs.product_scan[i], cs.product[i], sb[i], n);
    const double cov_ac = covariance(cs.product_probe[i], cs.product[i], sc, n);
    const double cov_bc = covariance(cs.product[i], sb[i], sc, n);
    const double var = ga * ga * var_a + gb * gb * var_b + gc * gc * var_c +
                       2.0 * (ga * gb * cov_ab + ga * gc * cov_ac + gb * gc * cov_bc);
    out.g2[i] = g;
    out.standard_error[i] = std::sqrt(std::max(var, 0.0) / n);
    out.defined[i] = 1;
  }
  return out;
}

SinglesProfile singles_profile(const CorrelationAccumulator &acc, Arm arm) {
  const std::size_t n_pix = acc.pixels();
  SinglesProfile out;
  out.arm = arm;
  out.positions = acc.config().positions;
  out.mean.assign(n_pix, nan);
  out.standard_error.assign(n_pix, nan);
  if (acc.frame_count() == 0)
    return out;
  const double n = static_cast<double>(acc.frame_count());
  const auto &s = acc.sum_intensity(arm);
  const auto &ss = acc.sum_intensity_sq(arm);
  for (std::size_t i = 0; i < n_pix; ++i) {
    out.mean[i] = s[i] / n;
    if (acc.frame_count() >= 2)
      out.standard_error[i] = std::sqrt(std::max(covariance(ss[i], s[i], s[i], n), 0.0) / n);
  }
  return out;
}

double SiegertReport::combined_stderr(std::size_t i) const {
  return std::hypot(g2_stderr[i], coherence_stderr[i]);
}

double SiegertReport::agreement_fraction(double sigmas, double centre, double half_width) const {
  std::size_t total = 0, agree = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!defined[i] || std::abs(positions[i] - centre) > half_width)
      continue;
    ++total;
    if (std::abs(g2_minus_one[i] - coherence_sq[i]) <= sigmas * combined_stderr(i))
      ++agree;
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

SiegertReport siegert_check(const CorrelationAccumulator &acc) {
  const auto &cfg = acc.config();
  if (!cfg.field_diagnostics)
    throw InvalidArgument("Siegert check needs an accumulator with field diagnostics");
  const Arm probe_arm = cfg.probe_arm;
  const Arm scan_arm = other_arm(probe_arm);
  const G2Slice slice = g2_slice(acc, scan_arm);
  const std::size_t n_pix = acc.pixels();

  SiegertReport out;
  out.scan_arm = scan_arm;
  out.positions = cfg.positions;
  out.g2_minus_one.assign(n_pix, nan);
  out.g2_stderr = slice.standard_error;
  out.coherence_sq.assign(n_pix, nan);
  out.coherence_stderr.assign(n_pix, nan);
  out.defined = slice.defined;
  if (acc.frame_count() < 2)
    return out;

  const double n = static_cast<double>(acc.frame_count());
  const auto &f = acc.field_sums();
  const auto &sb = acc.sum_intensity(scan_arm);
  const auto &sbb = acc.sum_intensity_sq(scan_arm);
  const double sc = acc.sum_intensity(probe_arm)[cfg.probe_pixel];
  const double scc = acc.sum_intensity_sq(probe_arm)[cfg.probe_pixel];
  const auto &cross = acc.cross(scan_arm);
  const double c = sc / n;

  for (std::size_t i = 0; i < n_pix; ++i) {
    if (!slice.defined[i])
      continue;
    out.g2_minus_one[i] = slice.g2[i] - 1.0;
    const double r = f.re[i] / n, m = f.im[i] / n, b = sb[i] / n;
    const double q = (r * r + m * m) / (b * c);
    // Delta method over (Re Z, Im Z, I_scan, I_probe).
    const double grad[4] = {2.0 * r / (b * c), 2.0 * m / (b * c), -q / b, -q / c};
    double cov[4][4];
    cov[0][0] = covariance(f.re_re[i], f.re[i], f.re[i], n);
    cov[1][1] = covariance(f.im_im[i], f.im[i], f.im[i], n);
    cov[2][2] = covariance(sbb[i], sb[i], sb[i], n);
    cov[3][3] = covariance(scc, sc, sc, n);
    cov[0][1] = cov[1][0] = covariance(f.re_im[i], f.re[i], f.im[i], n);
    cov[0][2] = cov[2][0] = covariance(f.re_scan[i], f.re[i], sb[i], n);
    cov[1][2] = cov[2][1] = covariance(f.im_scan[i], f.im[i], sb[i], n);
    cov[0][3] = cov[3][0] = covariance(f.re_probe[i], f.re[i], sc, n);
    cov[1][3] = cov[3][1] = covariance(f.im_probe[i], f.im[i], sc, n);
    cov[2][3] = cov[3][2] = covariance(cross.product[i], sb[i], sc, n);
    double var = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int bb = 0; bb < 4; ++bb)
        var += grad[a] * cov[a][bb] * grad[bb];
    out.coherence_sq[i] = q;
    out.coherence_stderr[i] = std::sqrt(std::max(var, 0.0) / n);
  }
  return out;
}

G2Matrix g2_matrix(const CorrelationAccumulator &acc) {
  G2Matrix out;
  const auto idx = acc.matrix_pixels();
  if (idx.empty() || acc.frame_count() == 0)
    return out;
  const double n = static_cast<double>(acc.frame_count());
  const auto &pos = acc.config().positions;
  const auto &s1 = acc.sum_intensity(Arm::one);
  const auto &s2 = acc.sum_intensity(Arm::two);
  const std::size_t m = idx.size();
  for (std::size_t a = 0; a < m; ++a) {
    out.x1.push_back(pos[idx[a]]);
    out.x2.push_back(pos[idx[a]]);
  }
  out.g2.resize(m * m, nan);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double denom = (s1[idx[a]] / n) * (s2[idx[b]] / n);
      if (denom > 0.0)
        out.g2[a * m + b] = acc.matrix_sums()[a * m + b] / n / denom;
    }
  }
  return out;
}

} // namespace ghostfringe
