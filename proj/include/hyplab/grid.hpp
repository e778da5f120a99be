#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace hyplab {

/// n-component function on the periodic grid x_i = i/N, i = 0..N-1.
/// Off-grid evaluation uses periodic 4-point cubic Lagrange interpolation,
/// so u(x+1) == u(x) holds exactly for any real x.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int n, int N) : n_(n), N_(N), values_(n, std::vector<double>(N, 0.0)) {
    if (n < 1 || N < 4) throw std::invalid_argument("GridFunction needs n >= 1, N >= 4");
  }

  int n() const { return n_; }
  int N() const { return N_; }

  double& at(int j, int i) { return values_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]; }
  double at(int j, int i) const {
    return values_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }

  /// Periodic cubic interpolation of component j at arbitrary x.
  double eval(int j, double x) const;

  /// sup over components and grid points of |value|.
  double sup_norm() const;

  /// Fill component j by sampling f at the grid points.
  template <class F>
  void fill(int j, F&& f) {
    for (int i = 0; i < N_; ++i) at(j, i) = f(static_cast<double>(i) / N_);
  }

  /// Flat stacked layout idx = j*N + i, shared with the sparse assembly.
  Eigen::VectorXd to_stacked() const;
  static GridFunction from_stacked(const Eigen::VectorXd& v, int n, int N);

 private:
  int n_ = 0;
  int N_ = 0;
  std::vector<std::vector<double>> values_;
};

/// Interpolation weights of the 4-point periodic cubic stencil at x:
/// indices (mod N) and weights such that u(x) = sum w[m] * u[idx[m]].
struct CubicStencil {
  int idx[4];
  double w[4];
};
CubicStencil cubic_stencil(double x, int N);

/// Wrap a real position into [0,1).
double wrap_unit(double x);

}  // namespace hyplab
