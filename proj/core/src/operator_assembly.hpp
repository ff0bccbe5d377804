#pragma once

#include <Eigen/SparseCore>

#include "kolmo/field.hpp"
#include "kolmo/grid.hpp"

namespace kolmo::fpk::detail {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Finite-volume matrix M of rho -> div(div(A rho) - b rho) with zero flux on
/// the box boundary. Face flux along axis e between cells L and R:
///   J = [(a_ee rho)_R - (a_ee rho)_L] / h + cross term - b_e(face) (rho_L + rho_R) / 2,
/// where diffusion entries are taken at cell centres and the cross derivative
/// is the bilinear average of the transverse difference (one-sided at the
/// box edge). Columns of M sum to zero, so 1^T M = 0 and M^T is a
/// non-divergence discretization of L u = tr(A D^2 u) + <b, grad u>.
SparseMatrix assemble_fpk_matrix(const GridSpec& grid, const DiffusionMatrixField& a,
                                 const DriftField& b);

/// Throws EllipticityError when A has a non-positive eigenvalue at a cell centre.
void require_positive_diffusion(const GridSpec& grid, const DiffusionMatrixField& a);

struct PinnedSolve {
  Eigen::VectorXd x;
  double residual = 0.0;
  std::vector<double> history;
};

/// Solves M x = rhs after replacing row `pinned` with the unit row, using
/// sparse LU plus iterative refinement. `rhs[pinned]` supplies the pinned value.
/// The reported residual is the normwise backward error
/// |r|_inf / (|M|_inf |x|_inf + |rhs|_inf).
PinnedSolve solve_pinned(const SparseMatrix& m, Eigen::VectorXd rhs, int pinned,
                         int refinement_steps);

/// Index of the cell containing the origin (upper-right neighbour for even n).
int center_cell(const GridSpec& grid);

}  // namespace kolmo::fpk::detail
