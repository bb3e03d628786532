#include "nfloc/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nfloc/geometry.hpp"

namespace nfloc {

std::vector<double> linear_axis(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("axis needs lo < hi and step > 0");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
  return axis;
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) throw std::invalid_argument(std::string(name) + " axis needs at least 2 points");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw std::invalid_argument(std::string(name) + " axis must be strictly increasing");
}

}  // namespace

SearchGrid::SearchGrid(std::vector<double> r_axis, std::vector<double> theta_axis, int refine_iters)
    : r_axis_(std::move(r_axis)), theta_axis_(std::move(theta_axis)), refine_iters_(refine_iters) {
  check_axis(r_axis_, "range");
  check_axis(theta_axis_, "angle");
  if (!(r_axis_.front() > 0.0)) throw std::invalid_argument("range axis must start above 0");
  if (!(theta_axis_.front() > 0.0) || !(theta_axis_.back() < kPi))
    throw std::invalid_argument("angle axis must lie strictly inside (0, pi)");
  if (refine_iters_ < 0) throw std::invalid_argument("refine_iters must be non-negative");
}

SearchGrid SearchGrid::uniform(double r_min, double r_max, double r_step, double theta_min,
                               double theta_max, double theta_step, int refine_iters) {
  return SearchGrid(linear_axis(r_min, r_max, r_step), linear_axis(theta_min, theta_max, theta_step),
                    refine_iters);
}

SearchGrid SearchGrid::default_grid() {
  const double deg = kPi / 180.0;
  return uniform(3.0, 80.0, 0.25, 30.0 * deg, 150.0 * deg, 0.25 * deg, 20);
}

std::vector<std::pair<int, int>> local_maxima_2d(const Eigen::MatrixXd& values) {
  const auto rows = static_cast<int>(values.rows());
  const auto cols = static_cast<int>(values.cols());
  std::vector<std::pair<int, int>> peaks;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = values(i, j);
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di;
          const int b = j + dj;
          if (a < 0 || a >= rows || b < 0 || b >= cols) continue;
          const double w = values(a, b);
          const bool earlier = a < i || (a == i && b < j);
          if (w > v || (w == v && earlier)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.emplace_back(i, j);
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](const auto& x, const auto& y) {
    return values(x.first, x.second) > values(y.first, y.second);
  });
  return peaks;
}

std::vector<int> local_maxima_1d(const std::vector<double>& values) {
  const auto n = static_cast<int>(values.size());
  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    const bool left_ok = i == 0 || v > values[static_cast<std::size_t>(i - 1)];
    const bool right_ok = i == n - 1 || v >= values[static_cast<std::size_t>(i + 1)];
    if (left_ok && right_ok) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
  });
  return peaks;
}

std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo,
                                             double hi, double start, int iters) {
  const double start_value = f(start);
  if (iters <= 0 || !(hi > lo)) return {start, start_value};
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double best_x = f1 >= f2 ? x1 : x2;
  const double best_f = std::max(f1, f2);
  if (best_f >= start_value) return {best_x, best_f};
  return {start, start_value};
}

std::pair<double, double> cell_bracket(const std::vector<double>& axis, int i) {
  const auto n = static_cast<int>(axis.size());
  const double lo = axis[static_cast<std::size_t>(std::max(i - 1, 0))];
  const double hi = axis[static_cast<std::size_t>(std::min(i + 1, n - 1))];
  return {lo, hi};
}

}  // namespace nfloc
