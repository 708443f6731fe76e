#include "thinhom/profile.hpp"

#include "thinhom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace thinhom {

namespace {

constexpr int kBoundSamples = 1 << 14;

// Golden-section refinement of an extremum bracketed by [a, b].
template <typename F>
double refine_extremum(F&& f, double a, double b, bool maximize) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  auto better = [&](double x, double y) { return maximize ? f(x) > f(y) : f(x) < f(y); };
  for (int it = 0; it < 60; ++it) {
    if (better(c, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - invphi * (b - a);
    d = a + invphi * (b - a);
  }
  return f(0.5 * (a + b));
}

} // namespace

ProfileSpec::ProfileSpec(double period, double mean, std::vector<double> cos_coeffs,
                         std::vector<double> sin_coeffs)
    : period_(period), mean_(mean), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw MeshError("profile period must be positive and finite");
  }
  auto all_finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!std::isfinite(mean_) || !all_finite(cos_) || !all_finite(sin_)) {
    throw MeshError("profile coefficients must be finite");
  }

  const double h = period_ / kBoundSamples;
  int imin = 0;
  int imax = 0;
  double vmin = eval_reduced(0.0);
  double vmax = vmin;
  for (int i = 1; i < kBoundSamples; ++i) {
    const double v = eval_reduced(i * h);
    if (v < vmin) {
      vmin = v;
      imin = i;
    }
    if (v > vmax) {
      vmax = v;
      imax = i;
    }
  }
  auto f = [this](double y) { return (*this)(y); };
  g0_ = std::min(vmin, refine_extremum(f, (imin - 1) * h, (imin + 1) * h, false));
  g1_ = std::max(vmax, refine_extremum(f, (imax - 1) * h, (imax + 1) * h, true));
  if (!(g0_ > 0.0)) {
    std::ostringstream msg;
    msg << "profile must be positive: sampled minimum g0 = " << g0_ << " <= 0";
    throw MeshError(msg.str());
  }
}

ProfileSpec ProfileSpec::flat(double height, double period) { return ProfileSpec(period, height); }

bool ProfileSpec::is_flat() const noexcept {
  auto zero = [](double x) { return x == 0.0; };
  return std::all_of(cos_.begin(), cos_.end(), zero) && std::all_of(sin_.begin(), sin_.end(), zero);
}

double ProfileSpec::operator()(double y) const {
  double r = std::fmod(y, period_);
  if (r < 0.0) r += period_;
  if (r >= period_) r = 0.0;
  return eval_reduced(r);
}

double ProfileSpec::eval_reduced(double y) const {
  const double w = 2.0 * std::numbers::pi * y / period_;
  double g = mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k) g += cos_[k] * std::cos(double(k + 1) * w);
  for (std::size_t k = 0; k < sin_.size(); ++k) g += sin_[k] * std::sin(double(k + 1) * w);
  return g;
}

} // namespace thinhom
