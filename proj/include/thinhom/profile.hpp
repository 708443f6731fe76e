#ifndef THINHOM_PROFILE_HPP
#define THINHOM_PROFILE_HPP

#include <vector>

namespace thinhom {

/// Periodic height function of the oscillating boundary, stored as a
/// truncated Fourier series
///
///   g(y) = mean + sum_k cos_k cos(2 pi k y / L) + sin_k sin(2 pi k y / L)
///
/// with k = 1, 2, ... . Construction validates the series and caches the
/// sampled bounds g0 = min g and g1 = max g; a profile with g0 <= 0 is
/// rejected.
class ProfileSpec {
public:
  ProfileSpec(double period, double mean, std::vector<double> cos_coeffs = {},
              std::vector<double> sin_coeffs = {});

  /// Flat profile g == height.
  static ProfileSpec flat(double height, double period = 1.0);

  double period() const noexcept { return period_; }
  double mean() const noexcept { return mean_; }
  const std::vector<double>& cos_coeffs() const noexcept { return cos_; }
  const std::vector<double>& sin_coeffs() const noexcept { return sin_; }
  double g0() const noexcept { return g0_; }
  double g1() const noexcept { return g1_; }
  bool is_flat() const noexcept;

  /// g(y). The argument is reduced modulo the period first, so g(y) and
  /// g(y + L) are bitwise equal.
  double operator()(double y) const;

  /// |Y*| = L * mean(g), exact for a trigonometric polynomial.
  double cell_measure() const noexcept { return period_ * mean_; }

private:
  double eval_reduced(double y) const;

  double period_;
  double mean_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double g0_ = 0.0;
  double g1_ = 0.0;
};

inline double eval_profile(const ProfileSpec& spec, double y1) { return spec(y1); }

} // namespace thinhom

#endif // THINHOM_PROFILE_HPP
