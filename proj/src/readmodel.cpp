#include "cogstream/readmodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "cogstream/error.hpp"

namespace cogstream::readmodel {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt2Pi = 2.50662827463100050242;

void check_samples(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(Errc::EmptyOrSingleton, "at least two samples are required");
  }
  for (double s : samples) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(Errc::NonPositiveSample,
                  "samples must be positive finite speeds");
    }
  }
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(Errc::AlphaOutOfRange, "probability must lie in (0, 1)");
  }
  // Acklam's rational approximation.
  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step. In the upper tail work with the complement to keep digits.
  double e;
  if (x > 0.0) {
    e = (1.0 - p) - 0.5 * std::erfc(x / kSqrt2);
  } else {
    e = normal_cdf(x) - p;
  }
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

LogNormalModel::LogNormalModel(double mu, double sigma)
    : mu_(mu), sigma_(sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidModel,
                "log-normal model needs finite mu and sigma > 0");
  }
}

double LogNormalModel::median() const noexcept { return std::exp(mu_); }

double LogNormalModel::log_pdf(double speed) const noexcept {
  if (!(speed > 0.0)) return -INFINITY;
  const double t = std::log(speed);
  const double z = (t - mu_) / sigma_;
  return -t - std::log(sigma_ * kSqrt2Pi) - 0.5 * z * z;
}

double LogNormalModel::pdf(double speed) const noexcept {
  return speed > 0.0 ? std::exp(log_pdf(speed)) : 0.0;
}

LogNormalModel fit(std::span<const double> samples) {
  check_samples(samples);
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += std::log(s);
  mean /= n;
  double ss = 0.0;
  for (double s : samples) {
    const double d = std::log(s) - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / n);
  const bool all_equal = std::all_of(samples.begin(), samples.end(),
                                     [&](double s) { return s == samples[0]; });
  if (all_equal || !(sigma > 0.0)) {
    throw Error(Errc::DegenerateSample, "samples have zero log-variance");
  }
  return LogNormalModel(mean, sigma);
}

FitReport fit_report(std::span<const double> samples) {
  LogNormalModel model = fit(samples);
  const KsResult ks = ks_test(samples, model);
  return FitReport{model, samples.size(), ks.statistic, ks.p_value};
}

double cdf(const LogNormalModel& model, double speed) {
  if (speed < 0.0 || std::isnan(speed)) {
    throw Error(Errc::NegativeSpeed, "speed must be non-negative");
  }
  if (speed == 0.0) return 0.0;
  return normal_cdf((std::log(speed) - model.mu()) / model.sigma());
}

double quantile(const LogNormalModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(Errc::AlphaOutOfRange, "alpha must lie in (0, 1)");
  }
  return std::exp(model.mu() + normal_quantile(alpha) * model.sigma());
}

double srar(const LogNormalModel& model, double stream_speed) {
  return cdf(model, stream_speed);
}

double kolmogorov_survival(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // P(K <= l) = sqrt(2 pi) / l * sum exp(-(2j-1)^2 pi^2 / (8 l^2))
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j <= 6; ++j) {
      const double k = 2.0 * j - 1.0;
      sum += std::exp(-k * k * w);
    }
    return std::clamp(1.0 - kSqrt2Pi / lambda * sum, 0.0, 1.0);
  }
  // P(K > l) = 2 sum (-1)^(j-1) exp(-2 j^2 l^2)
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const LogNormalModel& model) {
  check_samples(samples);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(model, sorted[i]);
    const double hi = static_cast<double>(i + 1) / n;
    const double lo = static_cast<double>(i) / n;
    d = std::max({d, std::abs(hi - f), std::abs(lo - f)});
  }
  const double root_n = std::sqrt(n);
  const double lambda = d * (root_n + 0.12 + 0.11 / root_n);
  return KsResult{d, kolmogorov_survival(lambda)};
}

TTestResult paired_t_test(std::span<const double> xs,
                          std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(Errc::LengthMismatch, "paired samples differ in length");
  }
  if (xs.size() < 2) {
    throw Error(Errc::EmptyOrSingleton, "at least two pairs are required");
  }
  const std::size_t n = xs.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = xs[i] - ys[i];
  const double mean =
      std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : diff) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw Error(Errc::DegenerateDifferences,
                "paired differences have zero variance");
  }
  TTestResult out;
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  out.df = static_cast<int>(n - 1);
  const boost::math::students_t dist(static_cast<double>(out.df));
  out.p_value = 2.0 * boost::math::cdf(
                          boost::math::complement(dist, std::abs(out.t)));
  out.p_value = std::min(out.p_value, 1.0);
  return out;
}

std::vector<double> density_intersection(const LogNormalModel& a,
                                         const LogNormalModel& b) {
  if (a == b) {
    throw Error(Errc::IdenticalModels, "identical models have equal densities");
  }
  const double va = a.sigma() * a.sigma();
  const double vb = b.sigma() * b.sigma();
  // Equal log-densities reduce to qa t^2 + qb t + qc = 0 in t = ln x; the
  // -ln x Jacobian term cancels.
  if (a.sigma() == b.sigma()) {
    return {std::exp(0.5 * (a.mu() + b.mu()))};
  }
  const double qa = 0.5 / vb - 0.5 / va;
  const double qb = a.mu() / va - b.mu() / vb;
  const double qc = 0.5 * b.mu() * b.mu() / vb - 0.5 * a.mu() * a.mu() / va +
                    std::log(b.sigma() / a.sigma());
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return {};

  std::vector<double> ts;
  const double root = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(root, qb));
  if (q != 0.0) {
    ts.push_back(q / qa);
    ts.push_back(qc / q);
  } else {
    ts.push_back(-qb / (2.0 * qa));
  }
  // One Newton step on the log-density difference.
  for (double& t : ts) {
    const double f = qa * t * t + qb * t + qc;
    const double df = 2.0 * qa * t + qb;
    if (df != 0.0) t -= f / df;
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<double> xs;
  for (double t : ts) {
    const double x = std::exp(t);
    if (x > 0.0 && std::isfinite(x)) xs.push_back(x);
  }
  return xs;
}

std::vector<SpeedSample> parse_samples_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<SpeedSample> out;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!header_seen) {
      if (cells.size() != 3 || cells[0] != "passage_id" ||
          cells[1] != "user_id" || cells[2] != "speed_wps") {
        throw Error(Errc::BadInput,
                    "expected header passage_id,user_id,speed_wps");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) {
      throw Error(Errc::BadInput,
                  "line " + std::to_string(line_no) + ": expected 3 fields");
    }
    double speed = 0.0;
    std::size_t used = 0;
    try {
      speed = std::stod(cells[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cells[2].size()) {
      throw Error(Errc::BadInput,
                  "line " + std::to_string(line_no) + ": bad speed value");
    }
    if (!(speed > 0.0)) {
      throw Error(Errc::NonPositiveSample,
                  "line " + std::to_string(line_no) + ": speed must be > 0");
    }
    out.push_back(SpeedSample{cells[0], cells[1], speed});
  }
  if (!header_seen) throw Error(Errc::BadInput, "empty CSV input");
  return out;
}

}  // namespace cogstream::readmodel
