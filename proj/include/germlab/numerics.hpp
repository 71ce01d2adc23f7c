#pragma once

// Small dense solvers: the systems in this project have at most ~14 unknowns,
// so plain Gaussian elimination with partial pivoting is enough.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace germlab {

using VecN = std::vector<double>;

// Solves A z = b in place (A row-major n x n, overwritten). Returns false on a
// vanishing pivot.
inline bool lin_solve(VecN& A, VecN& b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0.0) return false;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(A[col * n + k], A[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = A[r * n + col] / A[col * n + col];
      if (m == 0.0) continue;
      for (int k = col; k < n; ++k) A[r * n + k] -= m * A[col * n + k];
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int k = r + 1; k < n; ++k) acc -= A[r * n + k] * b[k];
    b[r] = acc / A[r * n + r];
  }
  return true;
}

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Newton iteration for a square system. eval fills f (size n), jac fills the
// row-major Jacobian (size n*n). Convergence is measured on max |f_i|.
inline NewtonReport newton_solve(int n, VecN& z, const std::function<void(const VecN&, VecN&)>& eval,
                                 const std::function<void(const VecN&, VecN&)>& jac,
                                 double tol = 1e-12, int max_iter = 40) {
  NewtonReport rep;
  VecN f(n), J(n * n), step(n);
  for (int it = 0; it < max_iter; ++it) {
    eval(z, f);
    double r = 0.0;
    for (double v : f) r = std::max(r, std::fabs(v));
    rep.residual = r;
    rep.iterations = it;
    if (r < tol) {
      rep.converged = true;
      return rep;
    }
    jac(z, J);
    step = f;
    if (!lin_solve(J, step, n)) return rep;
    for (int k = 0; k < n; ++k) z[k] -= step[k];
  }
  VecN f2(n);
  eval(z, f2);
  double r = 0.0;
  for (double v : f2) r = std::max(r, std::fabs(v));
  rep.residual = r;
  rep.converged = r < tol;
  return rep;
}

// Finite-difference Jacobian helper for systems without analytic derivatives.
inline void fd_jacobian(int n_out, int n_in, const VecN& z,
                        const std::function<void(const VecN&, VecN&)>& eval, VecN& J,
                        double h = 1e-7) {
  VecN zp = z, f0(n_out), f1(n_out);
  eval(z, f0);
  J.assign(n_out * n_in, 0.0);
  for (int c = 0; c < n_in; ++c) {
    const double step = h * std::max(1.0, std::fabs(z[c]));
    zp[c] = z[c] + step;
    eval(zp, f1);
    zp[c] = z[c];
    for (int r = 0; r < n_out; ++r) J[r * n_in + c] = (f1[r] - f0[r]) / step;
  }
}

}  // namespace germlab
