#include "parafreq/solver.hpp"

#include "parafreq/quadrature.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace parafreq {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Spatial operator L u = div(a grad u) + b . grad u + c u at time t,
// flux form with face-averaged coefficients; mixed a^{ij} terms use the
// centered cross stencil. Boundary rows are left empty.
SpMat assemble_operator(const SpaceTimeField& grid,
                        const CoefficientField& coeffs, double t,
                        double ellipticity_floor) {
  int n = grid.dim();
  double h = grid.spacing();
  int N = grid.nodes_per_slice();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(N) * (2 * n + 1 + (n > 1 ? 4 : 0)));

  for (int flat = 0; flat < N; ++flat) {
    if (grid.is_boundary_node(flat)) continue;
    Eigen::VectorXd x = grid.node_coords(flat);
    Eigen::MatrixXd a_here = coeffs.a(x, t);
    Eigen::VectorXd b_here = coeffs.b(x, t);
    double c_here = coeffs.c(x, t);

    // Diagonal diffusion: face-averaged a^{ii}.
    std::vector<int> idx(n);
    int rem = flat;
    for (int i = 0; i < n; ++i) {
      idx[i] = rem % grid.shape()[i];
      rem /= grid.shape()[i];
    }
    double diag = c_here;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += 0.5 * h;
      xm[i] -= 0.5 * h;
      // face coefficients by midpoint evaluation
      double ap = coeffs.a(xp, t)(i, i);
      double am = coeffs.a(xm, t)(i, i);
      if (ap < ellipticity_floor || am < ellipticity_floor) {
        std::ostringstream os;
        os << "ellipticity violated near node " << flat << " (a_face " << ap
           << ", " << am << ")";
        throw std::runtime_error(os.str());
      }
      std::vector<int> up = idx, dn = idx;
      up[i] += 1;
      dn[i] -= 1;
      double cp = ap / (h * h) + b_here[i] / (2 * h);
      double cm = am / (h * h) - b_here[i] / (2 * h);
      trip.emplace_back(flat, grid.flat_index(up), cp);
      trip.emplace_back(flat, grid.flat_index(dn), cm);
      diag -= (ap + am) / (h * h);
    }
    // Mixed terms d_i(a^{ij} d_j u), i != j: centered cross differences.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || a_here(i, j) == 0.0) continue;
        // d_i(a^{ij} d_j u) ~ [a(x+he_i)(u(x+he_i+he_j)-u(x+he_i-he_j))
        //                     - a(x-he_i)(u(x-he_i+he_j)-u(x-he_i-he_j))]/(4h^2)
        for (int si : {+1, -1}) {
          Eigen::VectorXd xs = x;
          xs[i] += si * h;
          double as = coeffs.a(xs, t)(i, j);
          for (int sj : {+1, -1}) {
            std::vector<int> nb = idx;
            nb[i] += si;
            nb[j] += sj;
            trip.emplace_back(flat, grid.flat_index(nb),
                              si * sj * as / (4 * h * h));
          }
        }
      }
    trip.emplace_back(flat, flat, diag);
  }
  SpMat L(N, N);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

}  // namespace

SpaceTimeField solve(const CoefficientField& coeffs, const ScalarFn& initial,
                     const ScalarFn& boundary, const Box& box,
                     const SolveOptions& opts) {
  int n = box.dim();
  if (coeffs.n != n) throw std::invalid_argument("coefficient dimension mismatch");
  int n_steps = static_cast<int>(std::lround((opts.t_end - opts.t_start) / opts.tau));
  if (n_steps < 1) throw std::invalid_argument("empty time range");
  SpaceTimeField field(box, opts.h, opts.t_start, opts.tau, n_steps + 1,
                       Provenance::Solver);
  field.dirichlet_boundary = true;
  int N = field.nodes_per_slice();

  std::vector<double> times(field.num_times());
  for (int k = 0; k < field.num_times(); ++k) times[k] = field.time(k);
  if (opts.validate) {
    auto violations = validate_coefficients(coeffs, box, opts.h, times);
    if (!violations.empty()) {
      std::ostringstream os;
      os << "coefficient invariants violated (" << violations.size()
         << " samples); first: " << violations.front().what;
      throw std::runtime_error(os.str());
    }
  }

  // Gauge shift so the zeroth-order coefficient is nonpositive.
  double lambda_hat = 0.0;
  if (opts.gauge) {
    for (int flat = 0; flat < N; flat += std::max(1, N / 256))
      for (double t : {opts.t_start, 0.5 * (opts.t_start + opts.t_end), opts.t_end})
        lambda_hat = std::max(lambda_hat, coeffs.c(field.node_coords(flat), t));
  }
  CoefficientField gauged = coeffs;
  if (lambda_hat > 0) {
    auto base_c = coeffs.c;
    gauged.c = [base_c, lambda_hat](const Eigen::VectorXd& x, double t) {
      return base_c(x, t) - lambda_hat;
    };
  }

  double floor = 1.0 / (1.0 + coeffs.lambda) - 1e-9;

  // v(t) = e^{-lambda_hat (t - t_start)} u(t)
  auto to_v = [&](double t) { return std::exp(-lambda_hat * (t - opts.t_start)); };

  Eigen::VectorXd v(N);
  for (int flat = 0; flat < N; ++flat) {
    Eigen::VectorXd x = field.node_coords(flat);
    double u0 = field.is_boundary_node(flat) ? boundary(x, opts.t_start)
                                             : initial(x, opts.t_start);
    field.at(0, flat) = u0;
    v[flat] = u0;  // gauge factor is 1 at t_start
  }

  SpMat I(N, N);
  I.setIdentity();

  double theta = opts.scheme == TimeScheme::BackwardEuler ? 1.0 : 0.5;
  SpMat L_old = assemble_operator(field, gauged, opts.t_start, floor);

  Eigen::SparseLU<SpMat> direct;
  Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> iterative;
  iterative.setTolerance(1e-13);

  for (int k = 1; k <= n_steps; ++k) {
    double t_new = field.time(k);
    SpMat L_new = assemble_operator(field, gauged, t_new, floor);

    SpMat A = I - opts.tau * theta * L_new;
    Eigen::VectorXd rhs;
    if (theta == 1.0)
      rhs = v;
    else
      rhs = v + opts.tau * (1 - theta) * (L_old * v);

    // Pin boundary rows: A row -> identity, rhs -> gauged boundary value.
    for (int flat = 0; flat < N; ++flat) {
      if (!field.is_boundary_node(flat)) continue;
      rhs[flat] = boundary(field.node_coords(flat), t_new) * to_v(t_new);
    }
    // Boundary rows of A are identity already: assemble_operator leaves them
    // empty, so I - tau*theta*L has a bare 1 on the diagonal there.

    Eigen::VectorXd v_new;
    if (opts.linear == LinearSolver::Direct) {
      direct.compute(A);
      if (direct.info() != Eigen::Success)
        throw std::runtime_error("sparse factorization failed");
      v_new = direct.solve(rhs);
      if (direct.info() != Eigen::Success)
        throw std::runtime_error("sparse solve failed");
    } else {
      iterative.compute(A);
      v_new = iterative.solveWithGuess(rhs, v);
      if (iterative.info() != Eigen::Success) {
        std::ostringstream os;
        os << "linear solve did not converge; residual " << iterative.error();
        throw std::runtime_error(os.str());
      }
    }
    v = v_new;
    double back = 1.0 / to_v(t_new);
    for (int flat = 0; flat < N; ++flat) field.at(k, flat) = v[flat] * back;
    L_old = std::move(L_new);
  }
  return field;
}

double discrete_residual(const SpaceTimeField& field,
                         const CoefficientField& coeffs, TimeScheme scheme) {
  int N = field.nodes_per_slice();
  double floor = 1.0 / (1.0 + coeffs.lambda) - 1e-9;
  double worst = 0;
  double tau = field.dt();
  for (int k = 1; k < field.num_times(); ++k) {
    double t_new = field.time(k);
    SpMat L_new = assemble_operator(field, coeffs, t_new, floor);
    Eigen::VectorXd u_old = Eigen::Map<const Eigen::VectorXd>(
        field.slice(k - 1).data(), N);
    Eigen::VectorXd u_new =
        Eigen::Map<const Eigen::VectorXd>(field.slice(k).data(), N);
    Eigen::VectorXd res;
    if (scheme == TimeScheme::BackwardEuler) {
      res = (u_new - u_old) / tau - L_new * u_new;
    } else {
      SpMat L_old = assemble_operator(field, coeffs, field.time(k - 1), floor);
      res = (u_new - u_old) / tau - 0.5 * (L_new * u_new + L_old * u_old);
    }
    for (int flat = 0; flat < N; ++flat)
      if (!field.is_boundary_node(flat))
        worst = std::max(worst, std::abs(res[flat]));
  }
  return worst;
}

MaxPrincipleReport max_principle_check(const SpaceTimeField& field,
                                       double zero_tol) {
  if (!field.dirichlet_boundary)
    throw std::invalid_argument("max principle check needs Dirichlet data");
  MaxPrincipleReport rep;
  int N = field.nodes_per_slice();
  for (int flat = 0; flat < N; ++flat)
    rep.initial_max = std::max(rep.initial_max, field.at(0, flat));
  if (rep.initial_max > zero_tol)
    throw std::invalid_argument("initial slice is not nonpositive");
  rep.strictly_negative_interior = true;
  for (int k = 1; k < field.num_times(); ++k)
    for (int flat = 0; flat < N; ++flat) {
      double v = field.at(k, flat);
      rep.max_later = std::max(rep.max_later, v);
      if (!field.is_boundary_node(flat)) {
        if (std::abs(v) <= zero_tol) ++rep.interior_zero_count;
        if (v >= 0) rep.strictly_negative_interior = false;
      }
    }
  return rep;
}

std::vector<double> doubling_profile(SpaceTimeField& field,
                                     const Eigen::VectorXd& center,
                                     const std::vector<double>& radii) {
  double t_top = field.t_end();
  std::vector<double> out;
  auto u2 = [&](const Eigen::VectorXd& x, double t) {
    double v = field.value(x, t);
    return v * v;
  };
  double sup = 0;
  for (double r : radii) {
    for (int i = 0; i < field.dim(); ++i) {
      if (center[i] - 2 * r < field.box().lo[i] ||
          center[i] + 2 * r > field.box().hi[i])
        throw std::domain_error("doubling cylinder leaves the domain");
    }
    if (t_top - 4 * r * r < field.t_start())
      throw std::domain_error("doubling cylinder leaves the time range");
    double num = cylinder_mean(field.dim(), center, t_top, 2 * r, u2);
    double den = cylinder_mean(field.dim(), center, t_top, r, u2);
    if (den < 1e-280)
      throw std::runtime_error("vanishing cylinder: mean-square underflow");
    double ratio = std::log(num / den) / std::log(4.0);
    out.push_back(ratio);
    sup = std::max(sup, ratio);
  }
  field.lambda_doubling = sup;
  return out;
}

RadialProfile RadialProfile::example1() {
  RadialProfile p;
  p.f = [](double s) {
    if (s <= 1.5) return 1.5 * s - 0.5 * s * s - 1.0;
    return 0.125;
  };
  p.kinks = {1.5};
  p.bounded = true;
  p.growth_degree = 2;
  return p;
}

RadialProfile RadialProfile::example2(double blend_halfwidth) {
  // Pieces: quadratic / flat 1/8 / outer quadratic, with C^1 cubic Hermite
  // blending on [s0 - w, s0 + w] around each junction.
  double w = blend_halfwidth;
  auto f1 = [](double s) { return 1.5 * s - 0.5 * s * s - 1.0; };
  auto d1 = [](double s) { return 1.5 - s; };
  auto f2 = [](double) { return 0.125; };
  auto d2 = [](double) { return 0.0; };
  auto f3 = [](double s) { return (s * s - 8 * s + 15) / 24.0; };
  auto d3 = [](double s) { return (2 * s - 8) / 24.0; };
  auto blend = [w](double s, double s0, auto fl, auto dl, auto fr, auto dr) {
    double ta = s0 - w, tb = s0 + w;
    double u = (s - ta) / (tb - ta);
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * fl(ta) + h10 * (tb - ta) * dl(ta) + h01 * fr(tb) +
           h11 * (tb - ta) * dr(tb);
  };
  RadialProfile p;
  p.f = [=](double s) {
    if (s < 1.5 - w) return f1(s);
    if (s <= 1.5 + w) return blend(s, 1.5, f1, d1, f2, d2);
    if (s < 2 - w) return f2(s);
    if (s <= 2 + w) return blend(s, 2.0, f2, d2, f3, d3);
    return f3(s);
  };
  p.kinks = {1.5 - w, 1.5 + w, 2 - w, 2 + w};
  p.bounded = true;
  p.growth_degree = 2;
  return p;
}

double heat_convolve(const RadialProfile& profile, double t, double radius) {
  if (!profile.bounded)
    throw std::invalid_argument("divergent radial profile rejected");
  if (radius < 0) throw std::invalid_argument("negative radius");
  if (t <= 0) return profile.f(radius * radius);

  double rho = radius;
  double sigma = std::sqrt(2 * t);  // Gaussian scale of the kernel in s
  auto integrand = [&](double s) {
    double z = rho * s / (2 * t);
    double gauss = std::exp(-(rho - s) * (rho - s) / (4 * t));
    double bessel = gsl_sf_bessel_I0_scaled(z);
    return profile.f(s * s) * s / (2 * t) * gauss * bessel;
  };
  // Window where the Gaussian factor is non-negligible, split at profile
  // kinks and at dyadic multiples of the Gaussian scale so the adaptive rule
  // cannot step over the peak.
  double half_width = 42 * sigma;
  double lo = std::max(0.0, rho - half_width);
  double hi = rho + half_width;
  std::vector<double> cuts{lo, hi};
  for (double ks : profile.kinks) {
    double kr = std::sqrt(std::max(0.0, ks));
    if (kr > lo && kr < hi) cuts.push_back(kr);
  }
  for (int j : {-32, -16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16, 32}) {
    double s = rho + j * sigma;
    if (s > lo && s < hi) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // Panels are smooth and at most a few Gaussian widths wide, so a fixed
  // Gauss-Legendre rule per panel reaches the 1e-9 budget.
  const QuadratureRule& gl = gauss_legendre(24);
  double total = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t q = 0; q < gl.nodes.size(); ++q)
      total += half * gl.weights[q] * integrand(mid + half * gl.nodes[q]);
  }
  return total;
}

double heat_convolve(const RadialProfile& profile, double t,
                     const Eigen::VectorXd& x) {
  return heat_convolve(profile, t, x.norm());
}

double RadialSolution::value(double rho, double t) const {
  int nt = static_cast<int>(times.size());
  double rel_t = (t - times.front()) / tau;
  rel_t = std::clamp(rel_t, 0.0, static_cast<double>(nt - 1));
  int k = std::min(static_cast<int>(rel_t), nt - 2 >= 0 ? nt - 2 : 0);
  double ft = rel_t - k;
  auto slice_val = [&](int kk) {
    const auto& s = slices[kk];
    int m = static_cast<int>(s.size());
    double rel = rho / h - 0.5;
    if (rel <= 0) return s[0];
    if (rel >= m - 1) {
      // linear to the Dirichlet zero at rho = R
      double last_rho = (m - 0.5) * h;
      double f = (rho - last_rho) / (R - last_rho);
      return s[m - 1] * (1 - std::clamp(f, 0.0, 1.0));
    }
    int i = static_cast<int>(rel);
    double fr = rel - i;
    return (1 - fr) * s[i] + fr * s[i + 1];
  };
  if (nt == 1) return slice_val(0);
  return (1 - ft) * slice_val(k) + ft * slice_val(k + 1);
}

double RadialSolution::first_root(double t, double rho_min) const {
  const int scan = 2000;
  double prev_rho = rho_min, prev_v = value(prev_rho, t);
  for (int i = 1; i <= scan; ++i) {
    double rho = rho_min + (R - rho_min) * i / scan;
    double v = value(rho, t);
    if (prev_v == 0) return prev_rho;
    if (prev_v * v < 0) {
      double a = prev_rho, b = rho;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        double vm = value(m, t);
        if (prev_v * vm <= 0)
          b = m;
        else {
          a = m;
          prev_v = vm;
        }
      }
      return 0.5 * (a + b);
    }
    prev_rho = rho;
    prev_v = v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

RadialSolution radial_solve(const std::function<double(double)>& initial_rho,
                            double R, int n_cells, double tau, double t_end) {
  RadialSolution sol;
  sol.R = R;
  sol.h = R / n_cells;
  sol.tau = tau;
  int n_steps = static_cast<int>(std::lround(t_end / tau));
  double h = sol.h;

  std::vector<double> v(n_cells);
  for (int i = 0; i < n_cells; ++i) v[i] = initial_rho((i + 0.5) * h);
  sol.times.push_back(0.0);
  sol.slices.push_back(v);

  // Backward Euler, tridiagonal: (1/rho_i) d(rho dv/drho) in flux form.
  std::vector<double> a(n_cells), b(n_cells), c(n_cells), rhs(n_cells);
  for (int k = 1; k <= n_steps; ++k) {
    for (int i = 0; i < n_cells; ++i) {
      double rho_i = (i + 0.5) * h;
      double face_m = i == 0 ? 0.0 : i * h;  // inner face radius
      double face_p = (i + 1) * h;
      double wm = face_m / (rho_i * h * h);
      double wp = face_p / (rho_i * h * h);
      if (i == n_cells - 1) {
        // ghost through the Dirichlet zero at rho = R: u_ghost = -u_last
        b[i] = 1 + tau * (wm + 2 * wp);
        a[i] = -tau * wm;
        c[i] = 0;
      } else {
        b[i] = 1 + tau * (wm + wp);
        a[i] = -tau * wm;
        c[i] = -tau * wp;
      }
      rhs[i] = v[i];
    }
    // Thomas algorithm.
    for (int i = 1; i < n_cells; ++i) {
      double m = a[i] / b[i - 1];
      b[i] -= m * c[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
    v[n_cells - 1] = rhs[n_cells - 1] / b[n_cells - 1];
    for (int i = n_cells - 2; i >= 0; --i)
      v[i] = (rhs[i] - c[i] * v[i + 1]) / b[i];
    sol.times.push_back(k * tau);
    sol.slices.push_back(v);
  }
  return sol;
}

RadialSolution polar_solve(const std::function<double(double)>& initial_rho,
                           double R, int n_rho, int n_theta, double tau,
                           double t_end) {
  // Laplacian on a polar grid: (1/rho) d_rho(rho d_rho u) + (1/rho^2) d_tt u,
  // cell-centered in rho, periodic in theta.
  double h = R / n_rho;
  double dth = 2 * std::numbers::pi / n_theta;
  int N = n_rho * n_theta;
  auto id = [&](int i, int j) { return j * n_rho + i; };

  std::vector<Triplet> trip;
  for (int j = 0; j < n_theta; ++j)
    for (int i = 0; i < n_rho; ++i) {
      double rho_i = (i + 0.5) * h;
      double face_m = i == 0 ? 0.0 : i * h;
      double face_p = (i + 1) * h;
      double wm = face_m / (rho_i * h * h);
      double wp = face_p / (rho_i * h * h);
      double wt = 1.0 / (rho_i * rho_i * dth * dth);
      double diag = wm + 2 * wt;
      // theta neighbours (periodic)
      int jm = (j + n_theta - 1) % n_theta, jp = (j + 1) % n_theta;
      trip.emplace_back(id(i, j), id(i, jm), -tau * wt);
      trip.emplace_back(id(i, j), id(i, jp), -tau * wt);
      if (i > 0) trip.emplace_back(id(i, j), id(i - 1, j), -tau * wm);
      if (i == n_rho - 1) {
        diag += 2 * wp;  // ghost through Dirichlet zero
      } else {
        diag += wp;
        trip.emplace_back(id(i, j), id(i + 1, j), -tau * wp);
      }
      trip.emplace_back(id(i, j), id(i, j), 1 + tau * diag);
    }
  SpMat A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("polar factorization failed");

  Eigen::VectorXd v(N);
  for (int j = 0; j < n_theta; ++j)
    for (int i = 0; i < n_rho; ++i) v[id(i, j)] = initial_rho((i + 0.5) * h);

  RadialSolution sol;
  sol.R = R;
  sol.h = h;
  sol.tau = tau;
  sol.times.push_back(0.0);
  std::vector<double> ray(n_rho);
  for (int i = 0; i < n_rho; ++i) ray[i] = v[id(i, 0)];
  sol.slices.push_back(ray);

  int n_steps = static_cast<int>(std::lround(t_end / tau));
  for (int k = 1; k <= n_steps; ++k) {
    v = lu.solve(v);
    sol.times.push_back(k * tau);
    for (int i = 0; i < n_rho; ++i) ray[i] = v[id(i, 0)];
    sol.slices.push_back(ray);
  }
  return sol;
}

}  // namespace parafreq
