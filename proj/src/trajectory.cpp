#include "kdplan/trajectory.hpp"

#include <algorithm>
#include <string>

namespace kdplan {

namespace {

// Span index k with knots[k] <= u < knots[k+1], restricted to the valid
// range [degree, n_ctrl - 1]; u at the right end maps to the last span.
std::size_t find_span(const std::vector<double>& knots, std::size_t n_ctrl, int degree, double u) {
  const auto p = static_cast<std::size_t>(degree);
  if (u >= knots[n_ctrl]) return n_ctrl - 1;
  const auto it = std::upper_bound(knots.begin() + static_cast<std::ptrdiff_t>(p),
                                   knots.begin() + static_cast<std::ptrdiff_t>(n_ctrl) + 1, u);
  return static_cast<std::size_t>(it - knots.begin()) - 1;
}

Vec3 de_boor(const std::vector<Vec3>& ctrl, const std::vector<double>& knots, int degree,
             double u) {
  if (degree == 0 || ctrl.size() == 1) {
    const std::size_t k = ctrl.size() == 1 ? 0 : find_span(knots, ctrl.size(), degree, u);
    return ctrl[k];
  }
  const auto p = static_cast<std::size_t>(degree);
  const std::size_t k = find_span(knots, ctrl.size(), degree, u);
  std::vector<Vec3> d(p + 1);
  for (std::size_t j = 0; j <= p; ++j) d[j] = ctrl[k - p + j];
  for (std::size_t r = 1; r <= p; ++r) {
    for (std::size_t j = p; j >= r; --j) {
      const double left = knots[j + k - p];
      const double right = knots[j + 1 + k - r];
      const double denom = right - left;
      const double alpha = denom > 0.0 ? (u - left) / denom : 0.0;
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[p];
}

std::vector<Vec3> derivative_points(const std::vector<Vec3>& ctrl, const std::vector<double>& knots,
                                    int degree) {
  std::vector<Vec3> out;
  if (ctrl.size() < 2) return out;
  const auto p = static_cast<std::size_t>(degree);
  for (std::size_t i = 0; i + 1 < ctrl.size(); ++i) {
    const double span = knots[i + p + 1] - knots[i + 1];
    out.push_back(span > 0.0 ? Vec3(degree * (ctrl[i + 1] - ctrl[i]) / span) : Vec3::Zero());
  }
  return out;
}

std::vector<double> trim(const std::vector<double>& knots, std::size_t each_side) {
  return {knots.begin() + static_cast<std::ptrdiff_t>(each_side),
          knots.end() - static_cast<std::ptrdiff_t>(each_side)};
}

}  // namespace

BSpline::BSpline(std::vector<Vec3> control_points, std::vector<double> knots, double duration)
    : ctrl_(std::move(control_points)), knots_(std::move(knots)), duration_(duration) {
  if (ctrl_.size() < static_cast<std::size_t>(kDegree + 1))
    throw std::invalid_argument("cubic B-spline needs at least 4 control points");
  if (knots_.size() != ctrl_.size() + kDegree + 1)
    throw std::invalid_argument("knot count must equal control count + degree + 1");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw std::invalid_argument("knots must be non-decreasing");
  if (!(duration_ >= 0.0)) throw std::invalid_argument("duration must be >= 0");
  k1_ = trim(knots_, 1);
  k2_ = trim(knots_, 2);
  d1_ = derivative_points(ctrl_, knots_, kDegree);
  d2_ = derivative_points(d1_, k1_, kDegree - 1);
}

TrajectorySample BSpline::sample(double t) const {
  if (!(t >= 0.0 && t <= duration_))
    throw OutOfDomain("spline time " + std::to_string(t) + " outside [0, " +
                      std::to_string(duration_) + "]");
  TrajectorySample s;
  if (duration_ == 0.0) {
    s.position = ctrl_.front();
    return s;
  }
  const double u = std::clamp(t / duration_, 0.0, 1.0);
  s.position = de_boor(ctrl_, knots_, kDegree, u);
  s.velocity = de_boor(d1_, k1_, kDegree - 1, u) / duration_;
  s.acceleration = de_boor(d2_, k2_, kDegree - 2, u) / (duration_ * duration_);
  return s;
}

std::vector<double> BSpline::interior_knot_times() const {
  std::vector<double> out;
  for (std::size_t i = kDegree + 1; i + kDegree + 1 < knots_.size(); ++i) {
    const double t = knots_[i] * duration_;
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

BSpline fit_bspline(std::span<const Vec3> waypoints, double speed) {
  if (waypoints.size() < 2) throw std::invalid_argument("fit_bspline needs at least 2 waypoints");
  if (!(speed > 0.0)) throw std::invalid_argument("fit_bspline speed must be > 0");

  std::vector<Vec3> ctrl(waypoints.begin(), waypoints.end());
  bool back = true;
  while (ctrl.size() < static_cast<std::size_t>(BSpline::kDegree + 1)) {
    if (back) ctrl.push_back(ctrl.back());
    else ctrl.insert(ctrl.begin(), ctrl.front());
    back = !back;
  }

  const std::size_t n = ctrl.size();
  const int p = BSpline::kDegree;
  std::vector<double> knots(n + p + 1, 0.0);
  const std::size_t interior = n - p - 1;
  for (std::size_t i = 0; i < interior; ++i)
    knots[p + 1 + i] = static_cast<double>(i + 1) / static_cast<double>(interior + 1);
  std::fill(knots.end() - (p + 1), knots.end(), 1.0);

  double length = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
    length += (waypoints[i + 1] - waypoints[i]).norm();
  return BSpline(std::move(ctrl), std::move(knots), length / speed);
}

}  // namespace kdplan
