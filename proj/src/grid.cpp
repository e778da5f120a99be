#include "hyplab/grid.hpp"

#include <cmath>

namespace hyplab {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return (r >= 1.0) ? 0.0 : r;  // guard against floor rounding at integers
}

CubicStencil cubic_stencil(double x, int N) {
  double xs = wrap_unit(x) * N;
  int i1 = static_cast<int>(std::floor(xs));
  if (i1 >= N) i1 = N - 1;
  double s = xs - i1;  // in [0,1); stencil nodes at offsets -1, 0, 1, 2
  CubicStencil st;
  st.idx[0] = (i1 - 1 + N) % N;
  st.idx[1] = i1 % N;
  st.idx[2] = (i1 + 1) % N;
  st.idx[3] = (i1 + 2) % N;
  // Lagrange basis on equispaced nodes {-1, 0, 1, 2} evaluated at s.
  st.w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
  st.w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  st.w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
  st.w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
  return st;
}

double GridFunction::eval(int j, double x) const {
  CubicStencil st = cubic_stencil(x, N_);
  const auto& row = values_[static_cast<std::size_t>(j)];
  return st.w[0] * row[static_cast<std::size_t>(st.idx[0])] +
         st.w[1] * row[static_cast<std::size_t>(st.idx[1])] +
         st.w[2] * row[static_cast<std::size_t>(st.idx[2])] +
         st.w[3] * row[static_cast<std::size_t>(st.idx[3])];
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (const auto& row : values_)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

Eigen::VectorXd GridFunction::to_stacked() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n_) * N_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < N_; ++i) v[static_cast<Eigen::Index>(j) * N_ + i] = at(j, i);
  return v;
}

GridFunction GridFunction::from_stacked(const Eigen::VectorXd& v, int n, int N) {
  if (v.size() != static_cast<Eigen::Index>(n) * N)
    throw std::invalid_argument("stacked vector size mismatch");
  GridFunction u(n, N);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < N; ++i) u.at(j, i) = v[static_cast<Eigen::Index>(j) * N + i];
  return u;
}

}  // namespace hyplab
