#include "nfloc/subspace.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace nfloc {

Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& snapshots) {
  if (snapshots.rows() == 0 || snapshots.cols() == 0)
    throw std::invalid_argument("sample covariance needs a non-empty snapshot matrix");
  const Eigen::Index n = snapshots.rows();
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(snapshots, 1.0 / static_cast<double>(snapshots.cols()));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.adjoint();
  cov.diagonal() = cov.diagonal().real().cast<cplx>();
  return cov;
}

EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw std::invalid_argument("hermitian_eig needs a non-empty square matrix");
  if (!matrix.allFinite()) throw std::invalid_argument("hermitian_eig: matrix has non-finite entries");

  const Eigen::MatrixXcd herm = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");

  const Eigen::Index n = herm.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ev(a) > ev(b); });

  EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXcd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = ev(order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

SubspaceDecomposition split_subspaces(const EigenDecomposition& eig, int n_signal) {
  const auto n = static_cast<int>(eig.eigenvalues.size());
  if (n_signal < 1 || n_signal >= n)
    throw std::invalid_argument("signal dimension " + std::to_string(n_signal) + " outside [1, " +
                                std::to_string(n) + ")");
  return SubspaceDecomposition{
      eig.eigenvectors.leftCols(n_signal),
      eig.eigenvectors.rightCols(n - n_signal),
      eig.eigenvalues,
  };
}

std::vector<SubspaceDecomposition> decompose_subcarriers(const ReceivedData& data, int n_signal) {
  std::vector<SubspaceDecomposition> out;
  out.reserve(data.per_subcarrier.size());
  for (const Eigen::MatrixXcd& y : data.per_subcarrier)
    out.push_back(split_subspaces(hermitian_eig(sample_covariance(y)), n_signal));
  return out;
}

SubcarrierData analyze_subcarriers(const ReceivedData& data, int n_signal) {
  SubcarrierData out;
  out.covariances.reserve(data.per_subcarrier.size());
  out.subspaces.reserve(data.per_subcarrier.size());
  for (const Eigen::MatrixXcd& y : data.per_subcarrier) {
    out.covariances.push_back(sample_covariance(y));
    out.subspaces.push_back(split_subspaces(hermitian_eig(out.covariances.back()), n_signal));
  }
  return out;
}

}  // namespace nfloc
