#pragma once

// Log-normal reading-speed distributions and the statistics built on them.
//
// Speeds are in words per second (WPS). A LogNormalModel describes ln(speed)
// as Normal(mu, sigma).

#include <span>
#include <string>
#include <vector>

namespace cogstream::readmodel {

// Standard normal CDF, via std::erfc (absolute error well under 1e-12).
double normal_cdf(double z) noexcept;

// Inverse standard normal CDF. Rational approximation followed by one Halley
// refinement step; absolute error below 1e-9 on (0, 1).
double normal_quantile(double p);

class LogNormalModel {
 public:
  // Throws Error{InvalidModel} unless mu is finite and sigma > 0.
  LogNormalModel(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }
  double median() const noexcept;

  double pdf(double speed) const noexcept;
  // ln pdf; -inf for speed <= 0.
  double log_pdf(double speed) const noexcept;

  friend bool operator==(const LogNormalModel&, const LogNormalModel&) = default;

 private:
  double mu_;
  double sigma_;
};

struct SpeedSample {
  std::string passage_id;
  std::string user_id;
  double speed_wps = 0.0;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

struct FitReport {
  LogNormalModel model;
  std::size_t n = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
};

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// MLE fit: mu = mean of ln x, sigma = population std of ln x.
LogNormalModel fit(std::span<const double> samples);

// fit() plus a K-S test of the samples against the fitted model.
FitReport fit_report(std::span<const double> samples);

double cdf(const LogNormalModel& model, double speed);
double quantile(const LogNormalModel& model, double alpha);

// Streaming-Reading Alignment Rate: share of readers whose natural speed is
// at most the streaming speed. Same value as cdf().
double srar(const LogNormalModel& model, double stream_speed);

// One-sample Kolmogorov-Smirnov test. The p-value uses the asymptotic
// Kolmogorov distribution at D * (sqrt(n) + 0.12 + 0.11 / sqrt(n)).
KsResult ks_test(std::span<const double> samples, const LogNormalModel& model);

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda) noexcept;

// Two-sided paired t-test on xs - ys.
TTestResult paired_t_test(std::span<const double> xs,
                          std::span<const double> ys);

// All speeds x > 0 where the two densities are equal, ascending.
std::vector<double> density_intersection(const LogNormalModel& a,
                                         const LogNormalModel& b);

// Parses the `passage_id,user_id,speed_wps` CSV format (header required).
std::vector<SpeedSample> parse_samples_csv(const std::string& text);

}  // namespace cogstream::readmodel
