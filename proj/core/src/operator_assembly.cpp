#include "operator_assembly.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "kolmo/error.hpp"

namespace kolmo::fpk::detail {

namespace {

using Triplet = Eigen::Triplet<double, int>;

class Assembler {
 public:
  Assembler(const GridSpec& grid, std::vector<Triplet>& out) : grid_(grid), out_(out) {}

  // Adds the flux J = sum coef_k rho_k through the face from cell l to cell r.
  void flux(int l, int r, const std::vector<std::pair<int, double>>& terms) {
    const double inv_h = 1.0 / grid_.h();
    for (const auto& [k, c] : terms) {
      out_.emplace_back(l, k, c * inv_h);
      out_.emplace_back(r, k, -c * inv_h);
    }
  }

 private:
  const GridSpec& grid_;
  std::vector<Triplet>& out_;
};

}  // namespace

void require_positive_diffusion(const GridSpec& grid, const DiffusionMatrixField& a) {
  if (a.dimension() != grid.dimension()) throw ShapeError("diffusion dimension does not match grid");
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Point x = grid.center(c);
    const auto eig = a(x).eigenvalues(grid.dimension());
    if (!(eig[0] > 0.0) || !std::isfinite(eig[1])) {
      throw EllipticityError("diffusion matrix is not positive definite at " +
                             kolmo::to_string(x, grid.dimension()));
    }
  }
}

SparseMatrix assemble_fpk_matrix(const GridSpec& grid, const DiffusionMatrixField& a,
                                 const DriftField& b) {
  if (b.dimension() != grid.dimension()) throw ShapeError("drift dimension does not match grid");
  const int d = grid.dimension();
  const int n = grid.cells();
  const double h = grid.h();
  const std::size_t size = grid.size();

  std::vector<SymMatrix2> acell(size);
  for (std::size_t c = 0; c < size; ++c) acell[c] = a(grid.center(c));

  std::vector<Triplet> triplets;
  triplets.reserve(size * (d == 1 ? 8 : 40));
  Assembler asmb(grid, triplets);

  auto idx = [n](int i, int j) { return i + n * j; };
  const int rows = d == 1 ? 1 : n;

  // Faces normal to axis 0.
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const int l = idx(i, j);
      const int r = idx(i + 1, j);
      const Point face{-grid.radius() + (i + 1) * h, d == 1 ? 0.0 : grid.coordinate(j)};
      const double bf = b(face)[0];
      std::vector<std::pair<int, double>> terms{
          {r, acell[r].xx / h}, {l, -acell[l].xx / h}, {l, -0.5 * bf}, {r, -0.5 * bf}};
      if (d == 2) {
        int up = j + 1;
        int dn = j - 1;
        double w = 1.0 / (4.0 * h);
        if (j == 0) { dn = j; w = 1.0 / (2.0 * h); }
        if (j == n - 1) { up = j; w = 1.0 / (2.0 * h); }
        for (int col : {i, i + 1}) {
          terms.emplace_back(idx(col, up), w * acell[idx(col, up)].xy);
          terms.emplace_back(idx(col, dn), -w * acell[idx(col, dn)].xy);
        }
      }
      asmb.flux(l, r, terms);
    }
  }
  // Faces normal to axis 1.
  if (d == 2) {
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int l = idx(i, j);
        const int r = idx(i, j + 1);
        const Point face{grid.coordinate(i), -grid.radius() + (j + 1) * h};
        const double bf = b(face)[1];
        std::vector<std::pair<int, double>> terms{
            {r, acell[r].yy / h}, {l, -acell[l].yy / h}, {l, -0.5 * bf}, {r, -0.5 * bf}};
        int rt = i + 1;
        int lt = i - 1;
        double w = 1.0 / (4.0 * h);
        if (i == 0) { lt = i; w = 1.0 / (2.0 * h); }
        if (i == n - 1) { rt = i; w = 1.0 / (2.0 * h); }
        for (int row : {j, j + 1}) {
          terms.emplace_back(idx(rt, row), w * acell[idx(rt, row)].xy);
          terms.emplace_back(idx(lt, row), -w * acell[idx(lt, row)].xy);
        }
        asmb.flux(l, r, terms);
      }
    }
  }
  SparseMatrix m(static_cast<int>(size), static_cast<int>(size));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

PinnedSolve solve_pinned(const SparseMatrix& m, Eigen::VectorXd rhs, int pinned,
                         int refinement_steps) {
  SparseMatrix a = m;
  // Zero row `pinned` and set its diagonal to one.
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.row() == pinned) it.valueRef() = it.col() == pinned ? 1.0 : 0.0;
    }
  }
  a.prune(0.0);
  if (a.coeff(pinned, pinned) != 1.0) a.coeffRef(pinned, pinned) = 1.0;
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw ConvergenceError("sparse LU factorization failed: " + lu.lastErrorMessage(), {});
  }
  double norm_a = 0.0;
  {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
    }
    norm_a = row_sums.maxCoeff();
  }
  PinnedSolve out;
  out.x = lu.solve(rhs);
  auto backward_error = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r = rhs - a * x;
    const double denom = norm_a * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
    return denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : 0.0;
  };
  Eigen::VectorXd r;
  out.residual = backward_error(out.x, r);
  out.history.push_back(out.residual);
  for (int step = 0; step < refinement_steps && std::isfinite(out.residual) && out.residual > 1e-15;
       ++step) {
    out.x += lu.solve(r);
    out.residual = backward_error(out.x, r);
    out.history.push_back(out.residual);
  }
  return out;
}

int center_cell(const GridSpec& grid) {
  const int half = grid.cells() / 2;
  return grid.dimension() == 1 ? half : half + grid.cells() * half;
}

}  // namespace kolmo::fpk::detail
