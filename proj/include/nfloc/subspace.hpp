#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nfloc/signal.hpp"

namespace nfloc {

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // column i pairs with eigenvalues(i)
};

/// Signal subspace (P dominant eigenvectors) and its orthogonal complement.
struct SubspaceDecomposition {
  Eigen::MatrixXcd signal_basis;  // N x P
  Eigen::MatrixXcd noise_basis;   // N x (N - P)
  Eigen::VectorXd eigenvalues;    // length N, descending
};

/// Per-subcarrier covariances and their subspace splits.
struct SubcarrierData {
  std::vector<Eigen::MatrixXcd> covariances;
  std::vector<SubspaceDecomposition> subspaces;
};

/// (1/K) Y Y^H, symmetrized so the result is exactly Hermitian.
Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& snapshots);

/// Throws std::invalid_argument on non-square or non-finite input. The
/// input is symmetrized before decomposition. Equal eigenvalues keep the
/// solver's order.
EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& matrix);

SubspaceDecomposition split_subspaces(const EigenDecomposition& eig, int n_signal);

/// Covariance, eigendecomposition and split for every subcarrier.
std::vector<SubspaceDecomposition> decompose_subcarriers(const ReceivedData& data, int n_signal);

SubcarrierData analyze_subcarriers(const ReceivedData& data, int n_signal);

}  // namespace nfloc
