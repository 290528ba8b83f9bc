#include "ghostfringe/fringe_fit.hpp"
#include "ghostfringe/analytic.hpp"
#include "ghostfringe/errors.hpp"
#include "ghostfringe/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ghostfringe {

namespace {

constexpr double pi = std::numbers::pi;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

double sinc_derivative(double u) noexcept {
  if (std::abs(u) < 1e-3) {
    const double u2 = u * u;
    return -u / 3.0 + u * u2 / 30.0;
  }
  return (std::cos(u) - std::sin(u) / u) / u;
}

double median(std::vector<double> v) {
  if (v.empty())
    return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1)
    return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

struct Sample {
  double x;
  double y;
  double sigma;
};

std::vector<Sample> valid_samples(const G2Slice &slice) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (!slice.defined.empty() && !slice.defined[i])
      continue;
    if (!std::isfinite(slice.g2[i]) || !std::isfinite(slice.positions[i]))
      continue;
    const double s = i < slice.standard_error.size() ? slice.standard_error[i] : 0.0;
    out.push_back({slice.positions[i], slice.g2[i], s});
  }
  std::sort(out.begin(), out.end(), [](const Sample &a, const Sample &b) { return a.x < b.x; });
  return out;
}

// Fit points with their weights: inverse variance where standard errors are
// available, unit weights when none is.
struct WeightedData {
  std::vector<double> x, y, w;
};

WeightedData weighted_data(const G2Slice &slice) {
  const auto samples = valid_samples(slice);
  const bool any_sigma = std::any_of(samples.begin(), samples.end(), [](const Sample &s) {
    return std::isfinite(s.sigma) && s.sigma > 0.0;
  });
  WeightedData d;
  for (const auto &s : samples) {
    if (any_sigma) {
      if (!(std::isfinite(s.sigma) && s.sigma > 0.0))
        continue;
      d.w.push_back(1.0 / (s.sigma * s.sigma));
    } else {
      d.w.push_back(1.0);
    }
    d.x.push_back(s.x);
    d.y.push_back(s.y);
  }
  return d;
}

// Linear interpolation of the samples onto a uniform grid.
std::vector<double> resample_uniform(const std::vector<Sample> &s, double x0, double dx,
                                     std::size_t n) {
  std::vector<double> out(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + static_cast<double>(i) * dx;
    while (j + 1 < s.size() && s[j + 1].x < x)
      ++j;
    if (j + 1 >= s.size()) {
      out[i] = s.back().y;
    } else {
      const double t = (x - s[j].x) / (s[j + 1].x - s[j].x);
      out[i] = s[j].y + std::clamp(t, 0.0, 1.0) * (s[j + 1].y - s[j].y);
    }
  }
  return out;
}

std::vector<double> moving_average(const std::vector<double> &y, std::size_t half) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(y.size() - 1, i + half);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j)
      s += y[j];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// Inverse of sinc on (0, pi) by bisection.
double inverse_sinc(double value) {
  double lo = 0.0, hi = pi;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sinc(mid) > value)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Vec5 to_internal(const FringeModelParams &p) {
  Vec5 t;
  t << p.baseline, std::log(p.visibility), std::log(p.period), std::log(p.envelope_zero), p.center;
  return t;
}

FringeModelParams from_internal(const Vec5 &t) {
  return {t(0), std::exp(t(1)), std::exp(t(2)), std::exp(t(3)), t(4)};
}

struct Evaluation {
  double cost = 0.0;
  Mat5 normal = Mat5::Zero();
  Vec5 gradient = Vec5::Zero();
};

Evaluation evaluate(const WeightedData &d, const FringeModelParams &p, bool with_jacobian) {
  Evaluation e;
  Vec5 grad;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double m = fringe_model(p, d.x[i], with_jacobian ? &grad : nullptr);
    const double r = d.y[i] - m;
    e.cost += d.w[i] * r * r;
    if (with_jacobian) {
      // Chain rule into log-space for visibility, period, envelope.
      grad(1) *= p.visibility;
      grad(2) *= p.period;
      grad(3) *= p.envelope_zero;
      e.normal.noalias() += d.w[i] * grad * grad.transpose();
      e.gradient.noalias() += d.w[i] * r * grad;
    }
  }
  return e;
}

// Throws RankDeficiency if the scaled normal matrix is numerically singular.
void check_rank(const Mat5 &normal) {
  Vec5 diag = normal.diagonal();
  for (int j = 0; j < 5; ++j) {
    if (!(diag(j) > 0.0) || !std::isfinite(diag(j)))
      throw RankDeficiency(std::string("normal equations singular: data do not constrain ") +
                               fringe_parameter_names[static_cast<std::size_t>(j)],
                           fringe_parameter_names[static_cast<std::size_t>(j)]);
  }
  const Vec5 scale = diag.cwiseSqrt().cwiseInverse();
  const Mat5 scaled = scale.asDiagonal() * normal * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat5> eig(scaled);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(4);
  if (!(lo > 1e-13 * hi)) {
    Eigen::Index j = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&j);
    const char *name = fringe_parameter_names[static_cast<std::size_t>(j)];
    throw RankDeficiency(std::string("normal equations singular: degenerate parameter ") + name,
                         name);
  }
}

// Initial-positive-sequence estimate of the integrated autocorrelation
// time of an ordered residual series.
double integrated_correlation_time(const std::vector<double> &z) {
  const std::size_t n = z.size();
  if (n < 4)
    return 1.0;
  double mean = 0.0;
  for (double v : z)
    mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(z.size());
  for (std::size_t i = 0; i < n; ++i)
    c[i] = z[i] - mean;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      s += c[i] * c[i + lag];
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0))
    return 1.0;
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n / 2; lag += 2) {
    const double pair = (autocov(lag) + autocov(lag + 1)) / c0;
    if (!(pair > 0.0))
      break;
    tau += 2.0 * pair;
  }
  return std::max(tau, 1.0);
}

} // namespace

double fringe_model(const FringeModelParams &p, double x, Vec5 *gradient) {
  const double t = x - p.center;
  const double u = pi * t / p.envelope_zero;
  const double v = pi * t / p.period;
  const double sc = sinc(u);
  const double s = sc * sc;
  const double cv = std::cos(v);
  const double c = cv * cv;
  if (gradient) {
    const double ds_du = 2.0 * sc * sinc_derivative(u);
    const double dc_dv = -std::sin(2.0 * v);
    (*gradient)(0) = 1.0;
    (*gradient)(1) = s * c;
    (*gradient)(2) = p.visibility * s * dc_dv * (-v / p.period);
    (*gradient)(3) = p.visibility * c * ds_du * (-u / p.envelope_zero);
    (*gradient)(4) = p.visibility * (ds_du * (-pi / p.envelope_zero) * c +
                                     s * dc_dv * (-pi / p.period));
  }
  return p.baseline + p.visibility * s * c;
}

double FringeModelParams::operator()(double x) const noexcept { return fringe_model(*this, x, nullptr); }

double FringeFitResult::stderr_of(std::size_t parameter) const {
  const auto j = static_cast<Eigen::Index>(parameter);
  return std::sqrt(std::max(covariance(j, j), 0.0));
}

FringeSeed seed_fit(const G2Slice &slice) {
  const auto samples = valid_samples(slice);
  FringeSeed seed;
  if (samples.size() < 8) {
    seed.low_confidence = true;
    return seed;
  }

  std::vector<double> ys(samples.size()), diffs;
  for (std::size_t i = 0; i < samples.size(); ++i)
    ys[i] = samples[i].y;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].x > samples[i - 1].x)
      diffs.push_back(samples[i].x - samples[i - 1].x);
  const double baseline = median(ys);
  const double dx = median(diffs);
  const double x0 = samples.front().x;
  const double span = samples.back().x - x0;
  const auto n = static_cast<std::size_t>(std::floor(span / dx)) + 1;

  auto y = resample_uniform(samples, x0, dx, n);
  for (double &v : y)
    v -= baseline;

  std::size_t m = 1;
  while (m < 8 * n)
    m <<= 1;
  detail::Fft fft(m);
  std::fill(fft.data(), fft.data() + m, Complex{});
  // Hann taper: removes edge leakage of any residual offset, which would
  // otherwise ripple through the envelope lobe.
  for (std::size_t i = 0; i < n; ++i) {
    const double w = n > 1 ? std::sin(pi * static_cast<double>(i) / static_cast<double>(n - 1)) : 1.0;
    fft.data()[i] = y[i] * w * w;
  }
  fft.forward();
  std::vector<double> power(m / 2 + 1);
  for (std::size_t j = 0; j < power.size(); ++j)
    power[j] = std::norm(fft.data()[j]);

  // Skip the envelope lobe around DC: up to its crest (a baseline offset can
  // notch the zero bin), then down to its first trough.
  std::size_t start = 1;
  while (start + 1 < power.size() && power[start] >= power[start - 1])
    ++start;
  while (start + 1 < power.size() && power[start] <= power[start - 1])
    ++start;
  std::size_t peak = start;
  for (std::size_t j = start; j < power.size(); ++j)
    if (power[j] > power[peak])
      peak = j;
  double offset = 0.0;
  if (peak > 0 && peak + 1 < power.size()) {
    const double a = power[peak - 1], b = power[peak], c = power[peak + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0)
      offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  const double freq = (static_cast<double>(peak) + offset) / (static_cast<double>(m) * dx);
  const double floor = median(std::vector<double>(power.begin() + static_cast<std::ptrdiff_t>(start),
                                                  power.end()));
  seed.peak_to_floor = floor > 0.0 ? power[peak] / floor : (power[peak] > 0.0 ? HUGE_VAL : 0.0);

  const double period = freq > 0.0 ? 1.0 / freq : span;
  seed.params.baseline = baseline;
  seed.params.period = period;

  const auto smooth_half = static_cast<std::size_t>(std::max(0.0, std::floor(period / (16.0 * dx))));
  const auto ys_smooth = moving_average(y, smooth_half);
  const std::size_t imax = static_cast<std::size_t>(
      std::max_element(ys_smooth.begin(), ys_smooth.end()) - ys_smooth.begin());
  const double centre = x0 + static_cast<double>(imax) * dx;
  const double height = ys_smooth[imax];
  seed.params.center = centre;
  seed.params.visibility = std::max(height, 1e-6);

  // First side fringe at centre +- period.
  auto side_peak = [&](double at) {
    double best = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = x0 + static_cast<double>(i) * dx;
      if (std::abs(x - at) <= 0.25 * period)
        best = std::max(best, ys_smooth[i]);
    }
    return best;
  };
  const double left = side_peak(centre - period), right = side_peak(centre + period);
  double ratio = -1.0;
  if (std::isfinite(left) && std::isfinite(right))
    ratio = 0.5 * (left + right) / height;
  else if (std::isfinite(left) || std::isfinite(right))
    ratio = std::max(left, right) / height;
  if (height > 0.0 && ratio > 1e-3 && ratio < 0.97)
    seed.params.envelope_zero = pi * period / inverse_sinc(std::sqrt(ratio));
  else
    seed.params.envelope_zero = 2.5 * period;

  // For white noise the largest of K exponential bins is about ln K / ln 2
  // medians; demand a clear margin over that.
  const double bins = static_cast<double>(std::max<std::size_t>(power.size() - start, 2));
  const double noise_max = std::max(10.0, 4.0 * std::log(bins) / std::log(2.0));
  const double lobe = *std::max_element(power.begin(), power.begin() + static_cast<std::ptrdiff_t>(start));
  seed.low_confidence = !(seed.peak_to_floor >= noise_max) || !(power[peak] >= 1e-2 * lobe) ||
                        !(height > 0.0) || span < 4.0 * period;
  return seed;
}

double residual_rms(const G2Slice &slice, const FringeModelParams &params) {
  const auto d = weighted_data(slice);
  double s = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double r = d.y[i] - params(d.x[i]);
    s += r * r;
  }
  return d.x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(d.x.size()));
}

FringeFitResult fit(const G2Slice &slice, const FringeModelParams &seed, const FitOptions &options) {
  const auto data = weighted_data(slice);
  if (data.x.size() < 20)
    throw InvalidArgument("fringe fit needs at least 20 usable points, got " +
                          std::to_string(data.x.size()));
  if (!(seed.period > 0.0) || !(seed.envelope_zero > 0.0))
    throw InvalidArgument("fringe fit seed needs positive period and envelope");

  FringeModelParams start = seed;
  start.visibility = std::max(seed.visibility, 1e-6);
  Vec5 theta = to_internal(start);
  FringeModelParams current = from_internal(theta);
  Evaluation eval = evaluate(data, current, true);
  check_rank(eval.normal);

  FringeFitResult result;
  double lambda = 1e-3;
  bool converged = false;
  std::size_t it = 0;
  for (; it < options.max_iterations && !converged; ++it) {
    bool accepted = false;
    while (!accepted) {
      Mat5 damped = eval.normal;
      damped.diagonal() *= 1.0 + lambda;
      const Vec5 step = damped.ldlt().solve(eval.gradient);
      const Vec5 trial_theta = theta + step;
      const FringeModelParams trial = from_internal(trial_theta);
      const double trial_cost = evaluate(data, trial, false).cost;
      if (std::isfinite(trial_cost) && trial_cost <= eval.cost) {
        theta = trial_theta;
        current = trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (step.norm() < options.step_tolerance * (theta.norm() + 1e-12))
          converged = true;
        eval = evaluate(data, current, true);
        check_rank(eval.normal);
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) {
          // No descent direction left at working precision.
          converged = true;
          break;
        }
      }
    }
  }

  result.params = current;
  result.iterations = it;
  result.converged = converged;
  result.points = data.x.size();
  result.chi2 = eval.cost;
  result.residual_rms = residual_rms(slice, current);

  std::vector<double> z(data.x.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = (data.y[i] - current(data.x[i])) * std::sqrt(data.w[i]);
  result.correlation_time = integrated_correlation_time(z);

  const double dof = static_cast<double>(data.x.size()) - 5.0;
  const double scale = (dof > 0.0 ? eval.cost / dof : 1.0) * result.correlation_time;
  const Mat5 inv = eval.normal.inverse();
  Vec5 jac;
  jac << 1.0, current.visibility, current.period, current.envelope_zero, 1.0;
  result.covariance = scale * (jac.asDiagonal() * inv * jac.asDiagonal());
  result.covariance = 0.5 * (result.covariance + result.covariance.transpose()).eval();
  return result;
}

std::size_t count_resolvable_minima(const G2Slice &slice, double smoothing, double sigmas,
                                    double centre, double half_width) {
  std::vector<Sample> pts;
  for (const auto &s : valid_samples(slice))
    if (std::abs(s.x - centre) <= half_width)
      pts.push_back(s);
  if (pts.size() < 3)
    return 0;

  // Moving average in x; the standard error is averaged, not reduced, since
  // neighbouring pixels are correlated.
  std::vector<double> y(pts.size()), sig(pts.size());
  std::size_t lo = 0, hi = 0;
  double sum_y = 0.0, sum_s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (hi < pts.size() && pts[hi].x <= pts[i].x + 0.5 * smoothing) {
      sum_y += pts[hi].y;
      sum_s += pts[hi].sigma;
      ++hi;
    }
    while (pts[lo].x < pts[i].x - 0.5 * smoothing) {
      sum_y -= pts[lo].y;
      sum_s -= pts[lo].sigma;
      ++lo;
    }
    const double k = static_cast<double>(hi - lo);
    y[i] = sum_y / k;
    sig[i] = sum_s / k;
  }
  std::vector<double> finite_sig;
  for (double s : sig)
    if (std::isfinite(s))
      finite_sig.push_back(s);
  const double sigma = finite_sig.empty() ? 0.0 : median(finite_sig);
  const double hysteresis = std::max(sigma, 1e-12);

  // Alternating extrema with hysteresis.
  struct Extremum {
    double value;
    bool is_max;
  };
  std::vector<Extremum> ext;
  double cur_max = y[0], cur_min = y[0];
  int looking = 0; // 0 unknown, +1 for a max, -1 for a min
  for (std::size_t i = 1; i < y.size(); ++i) {
    cur_max = std::max(cur_max, y[i]);
    cur_min = std::min(cur_min, y[i]);
    if (looking >= 0 && y[i] < cur_max - hysteresis) {
      if (looking == 1 || ext.empty())
        ext.push_back({cur_max, true});
      looking = -1;
      cur_min = y[i];
    } else if (looking <= 0 && y[i] > cur_min + hysteresis) {
      if (looking == -1 || ext.empty())
        ext.push_back({cur_min, false});
      looking = 1;
      cur_max = y[i];
    }
  }

  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < ext.size(); ++i) {
    if (ext[i].is_max || !ext[i - 1].is_max || !ext[i + 1].is_max)
      continue;
    const double depth = 0.5 * (ext[i - 1].value + ext[i + 1].value) - ext[i].value;
    if (depth >= sigmas * sigma)
      ++count;
  }
  return count;
}

} // namespace ghostfringe
