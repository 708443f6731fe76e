#include "thinhom/samples.hpp"

#include "thinhom/errors.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace thinhom {

Samples1D::Samples1D(Eigen::VectorXd x_, Eigen::VectorXd v_) : x(std::move(x_)), v(std::move(v_)) {
  if (x.size() != v.size() || x.size() == 0) throw Error("samples: abscissae and values must be non-empty and match");
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    if (!(x[k] > x[k - 1])) throw Error("samples: abscissae must be strictly increasing");
  }
}

Eigen::VectorXd Samples1D::uniform_grid(Eigen::Index n) {
  Eigen::VectorXd g(n);
  for (Eigen::Index k = 0; k < n; ++k) g[k] = n > 1 ? double(k) / double(n - 1) : 0.0;
  return g;
}

Samples1D Samples1D::uniform(const Eigen::VectorXd& values) {
  return Samples1D(uniform_grid(values.size()), values);
}

double Samples1D::operator()(double t) const {
  const Eigen::Index n = x.size();
  if (t <= x[0]) return v[0];
  if (t >= x[n - 1]) return v[n - 1];
  const auto it = std::upper_bound(x.data(), x.data() + n, t);
  const Eigen::Index k = Eigen::Index(it - x.data()) - 1;
  const double s = (t - x[k]) / (x[k + 1] - x[k]);
  return (1.0 - s) * v[k] + s * v[k + 1];
}

double Samples1D::integrate(double a, double b) const {
  if (b < a) return -integrate(b, a);
  const Eigen::Index n = x.size();
  // breakpoints of the interpolant inside (a, b), then exact trapezoids
  double total = 0.0;
  double lo = a;
  double flo = (*this)(a);
  const auto first = std::upper_bound(x.data(), x.data() + n, a);
  for (const double* p = first; p != x.data() + n && *p < b; ++p) {
    const double fp = v[Eigen::Index(p - x.data())];
    total += 0.5 * (flo + fp) * (*p - lo);
    lo = *p;
    flo = fp;
  }
  total += 0.5 * (flo + (*this)(b)) * (b - lo);
  return total;
}

void write_samples_csv(std::ostream& os, const Samples1D& s, const std::string& value_name) {
  os << "x," << value_name << "\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < s.size(); ++k) os << s.x[k] << "," << s.v[k] << "\n";
}

Samples1D read_samples_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("samples csv: missing header");
  std::vector<double> xs;
  std::vector<double> vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double a = 0.0;
    double b = 0.0;
    char comma = 0;
    if (!(ls >> a >> comma >> b) || comma != ',') throw IoError("samples csv: bad row '" + line + "'");
    xs.push_back(a);
    vs.push_back(b);
  }
  return Samples1D(Eigen::Map<Eigen::VectorXd>(xs.data(), Eigen::Index(xs.size())),
                   Eigen::Map<Eigen::VectorXd>(vs.data(), Eigen::Index(vs.size())));
}

} // namespace thinhom
