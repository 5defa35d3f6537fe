#pragma once

#include <utility>
#include <vector>

namespace hop {

double normal_cdf(double x, double mean = 0.0, double sigma = 1.0);

// 95% Wilson score interval for k successes out of n.
std::pair<double, double> wilson_interval(int k, int n, double z = 1.959963984540054);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

// Least squares of log(delta) against log(N); deltas must be positive.
LineFit rate_fit(const std::vector<double>& n, const std::vector<double>& delta);

// One-sample Kolmogorov-Smirnov distance against N(mean, sigma^2).
double ks_distance_gaussian(std::vector<double> samples, double mean, double sigma);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

double median(std::vector<double> v);
double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

}  // namespace hop
