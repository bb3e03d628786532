#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nfloc {

/// Inclusive uniform axis lo, lo + step, ... up to hi (within step * 1e-9).
std::vector<double> linear_axis(double lo, double hi, double step);

/// Rectangular (range, angle) search region sampled on two monotone axes.
class SearchGrid {
 public:
  SearchGrid(std::vector<double> r_axis, std::vector<double> theta_axis, int refine_iters);

  static SearchGrid uniform(double r_min, double r_max, double r_step, double theta_min,
                            double theta_max, double theta_step, int refine_iters);

  /// r in [3, 80] m step 0.25 m, theta in [30, 150] deg step 0.25 deg,
  /// 20 refinement iterations.
  static SearchGrid default_grid();

  const std::vector<double>& r_axis() const { return r_axis_; }
  const std::vector<double>& theta_axis() const { return theta_axis_; }
  int refine_iters() const { return refine_iters_; }

 private:
  std::vector<double> r_axis_;
  std::vector<double> theta_axis_;
  int refine_iters_;
};

/// values(i, j) is the spectrum at (r_axis[i], theta_axis[j]).
struct SpectrumGrid {
  Eigen::MatrixXd values;
  SearchGrid grid;
};

struct Location {
  double range_m = 0.0;
  double angle_rad = 0.0;
};

/// Result of a P-target localization. When detection_failed is set,
/// `targets` holds fewer than P entries and `diagnostic` says why.
struct Estimate {
  std::vector<Location> targets;
  std::vector<double> peak_values;
  bool detection_failed = false;
  std::string diagnostic;
};

/// Cells that are not beaten by any 8-neighbour; on equal values the cell
/// that comes first in row-major order wins. Returned in descending value
/// order, ties in row-major order.
std::vector<std::pair<int, int>> local_maxima_2d(const Eigen::MatrixXd& values);

/// 1D analogue of local_maxima_2d with two neighbours.
std::vector<int> local_maxima_1d(const std::vector<double>& values);

/// Golden-section maximization of f over [lo, hi] with a fixed number of
/// bracket reductions. Returns (argmax, value); never returns a point worse
/// than `start`.
std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo,
                                             double hi, double start, int iters);

/// Neighbourhood [axis[i-1], axis[i+1]] clamped to the axis ends.
std::pair<double, double> cell_bracket(const std::vector<double>& axis, int i);

}  // namespace nfloc
