#include "parafreq/nodal.hpp"

#include "parafreq/quadrature.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace parafreq {

namespace {

bool positive(double v) { return v >= 0.0; }  // zero tie-break: positive

double edge_cross(double va, double vb) { return va / (va - vb); }

}  // namespace

std::vector<Eigen::VectorXd> NodalSlice::sample_points(double step) const {
  std::vector<Eigen::VectorXd> pts;
  if (dim == 1) {
    for (double p : points) {
      Eigen::VectorXd v(1);
      v[0] = p;
      pts.push_back(v);
    }
    return pts;
  }
  if (dim == 2) {
    for (const auto& seg : segments) {
      double len = (seg[1] - seg[0]).norm();
      int m = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int i = 0; i <= m; ++i) {
        Eigen::Vector2d p = seg[0] + (seg[1] - seg[0]) * (double(i) / m);
        pts.push_back(p);
      }
    }
    return pts;
  }
  for (const auto& tri : triangles) {
    double scale = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[0]).norm(),
                             (tri[2] - tri[1]).norm()});
    int m = std::max(1, static_cast<int>(std::ceil(scale / step)));
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m - i; ++j) {
        double a = double(i) / m, b = double(j) / m;
        Eigen::Vector3d p = tri[0] + a * (tri[1] - tri[0]) + b * (tri[2] - tri[0]);
        pts.push_back(p);
      }
  }
  return pts;
}

void NodalSlice::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (dim == 1) {
    os << "x\n";
    for (double p : points) os << p << "\n";
  } else if (dim == 2) {
    os << "x0,y0,x1,y1\n";
    for (const auto& s : segments)
      os << s[0][0] << "," << s[0][1] << "," << s[1][0] << "," << s[1][1] << "\n";
  } else {
    os << "x0,y0,z0,x1,y1,z1,x2,y2,z2\n";
    for (const auto& t : triangles) {
      for (int i = 0; i < 3; ++i)
        os << t[i][0] << "," << t[i][1] << "," << t[i][2]
           << (i == 2 ? "\n" : ",");
    }
  }
}

namespace {

void extract_1d(const SpaceTimeField& field, int k, NodalSlice& out) {
  int nx = field.shape()[0];
  double lo = field.box().lo[0], h = field.spacing();
  for (int i = 0; i + 1 < nx; ++i) {
    double va = field.at(k, i), vb = field.at(k, i + 1);
    if (positive(va) == positive(vb)) continue;
    out.points.push_back(lo + h * (i + edge_cross(va, vb)));
  }
  out.measure = static_cast<double>(out.points.size());
}

void extract_2d(const SpaceTimeField& field, int k, NodalSlice& out) {
  int nx = field.shape()[0], ny = field.shape()[1];
  double lx = field.box().lo[0], ly = field.box().lo[1], h = field.spacing();
  auto val = [&](int i, int j) { return field.at(k, j * nx + i); };

  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      double v0 = val(i, j), v1 = val(i + 1, j), v2 = val(i + 1, j + 1),
             v3 = val(i, j + 1);
      int code = (positive(v0) ? 1 : 0) | (positive(v1) ? 2 : 0) |
                 (positive(v2) ? 4 : 0) | (positive(v3) ? 8 : 0);
      if (code == 0 || code == 15) continue;
      double x0 = lx + i * h, y0 = ly + j * h;
      // Edge crossing points: e0 bottom, e1 right, e2 top, e3 left.
      auto edge_point = [&](int e) -> Eigen::Vector2d {
        switch (e) {
          case 0: return {x0 + h * edge_cross(v0, v1), y0};
          case 1: return {x0 + h, y0 + h * edge_cross(v1, v2)};
          case 2: return {x0 + h * edge_cross(v3, v2), y0 + h};
          default: return {x0, y0 + h * edge_cross(v0, v3)};
        }
      };
      auto emit = [&](int ea, int eb) {
        out.segments.push_back({edge_point(ea), edge_point(eb)});
      };
      switch (code) {
        case 1: emit(3, 0); break;
        case 2: emit(0, 1); break;
        case 3: emit(3, 1); break;
        case 4: emit(1, 2); break;
        case 6: emit(0, 2); break;
        case 7: emit(3, 2); break;
        case 8: emit(2, 3); break;
        case 9: emit(0, 2); break;
        case 11: emit(1, 2); break;
        case 12: emit(3, 1); break;
        case 13: emit(0, 1); break;
        case 14: emit(3, 0); break;
        case 5: {  // saddle: resolve by the cell-centre average
          double c = 0.25 * (v0 + v1 + v2 + v3);
          if (positive(c)) {
            emit(0, 1);
            emit(2, 3);
          } else {
            emit(3, 0);
            emit(1, 2);
          }
          break;
        }
        case 10: {
          double c = 0.25 * (v0 + v1 + v2 + v3);
          if (positive(c)) {
            emit(3, 0);
            emit(1, 2);
          } else {
            emit(0, 1);
            emit(2, 3);
          }
          break;
        }
        default: break;
      }
    }
  double len = 0;
  for (const auto& s : out.segments) len += (s[1] - s[0]).norm();
  out.measure = len;
}

void extract_3d(const SpaceTimeField& field, int k, NodalSlice& out) {
  int nx = field.shape()[0], ny = field.shape()[1], nz = field.shape()[2];
  double h = field.spacing();
  Eigen::Vector3d lo(field.box().lo[0], field.box().lo[1], field.box().lo[2]);
  auto val = [&](int i, int j, int m) {
    return field.at(k, (m * ny + j) * nx + i);
  };
  // Cube corners indexed by coordinate bits; six tetrahedra around the main
  // diagonal 0-7 tile the cube.
  static const int tets[6][4] = {{0, 5, 1, 7}, {0, 1, 3, 7}, {0, 3, 2, 7},
                                 {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}};
  double area = 0;
  for (int m = 0; m + 1 < nz; ++m)
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        double cv[8];
        Eigen::Vector3d cp[8];
        for (int c = 0; c < 8; ++c) {
          int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
          cv[c] = val(i + dx, j + dy, m + dz);
          cp[c] = lo + h * Eigen::Vector3d(i + dx, j + dy, m + dz);
        }
        for (const auto& tet : tets) {
          double v[4] = {cv[tet[0]], cv[tet[1]], cv[tet[2]], cv[tet[3]]};
          Eigen::Vector3d p[4] = {cp[tet[0]], cp[tet[1]], cp[tet[2]], cp[tet[3]]};
          int code = 0;
          for (int c = 0; c < 4; ++c)
            if (positive(v[c])) code |= 1 << c;
          if (code == 0 || code == 15) continue;
          auto cross_pt = [&](int a, int b) -> Eigen::Vector3d {
            return p[a] + (p[b] - p[a]) * edge_cross(v[a], v[b]);
          };
          // Lone vertex against the other three -> one triangle; 2-2 split ->
          // a quad cut into two triangles.
          auto push_tri = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              const Eigen::Vector3d& c) {
            out.triangles.push_back({a, b, c});
            area += 0.5 * ((b - a).cross(c - a)).norm();
          };
          int bits = code;
          int ones = __builtin_popcount(bits);
          int lone = -1;
          if (ones == 1 || ones == 3) {
            for (int c = 0; c < 4; ++c) {
              bool side = (bits >> c) & 1;
              if ((ones == 1) == side) lone = c;
            }
            int others[3], idx = 0;
            for (int c = 0; c < 4; ++c)
              if (c != lone) others[idx++] = c;
            push_tri(cross_pt(lone, others[0]), cross_pt(lone, others[1]),
                     cross_pt(lone, others[2]));
          } else {
            int pos_idx[2], neg_idx[2], pi = 0, ni = 0;
            for (int c = 0; c < 4; ++c)
              ((bits >> c) & 1) ? (void)(pos_idx[pi++] = c)
                                : (void)(neg_idx[ni++] = c);
            Eigen::Vector3d q00 = cross_pt(pos_idx[0], neg_idx[0]);
            Eigen::Vector3d q01 = cross_pt(pos_idx[0], neg_idx[1]);
            Eigen::Vector3d q11 = cross_pt(pos_idx[1], neg_idx[1]);
            Eigen::Vector3d q10 = cross_pt(pos_idx[1], neg_idx[0]);
            push_tri(q00, q01, q11);
            push_tri(q00, q11, q10);
          }
        }
      }
  out.measure = area;
}

}  // namespace

NodalSlice extract_nodal(const SpaceTimeField& field, double t) {
  int n = field.dim();
  if (n < 1 || n > 3)
    throw std::invalid_argument("nodal extraction supports dimensions 1..3");
  int k = field.slice_index(t);
  NodalSlice out;
  out.t = field.time(k);
  out.dim = n;

  double vmax = 0, c2 = 0;
  const auto& s = field.slice(k);
  for (double v : s) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite slice value");
    vmax = std::max(vmax, std::abs(v));
  }
  if (vmax == 0) {
    out.identically_zero = true;
    return out;
  }
  double h = field.spacing();
  // Local C^2 scale from second differences; feeds the singular-set bands.
  for (int flat = 0; flat < field.nodes_per_slice(); ++flat) {
    if (field.is_boundary_node(flat)) continue;
    std::vector<int> idx(n);
    int rem = flat;
    for (int i = 0; i < n; ++i) {
      idx[i] = rem % field.shape()[i];
      rem /= field.shape()[i];
    }
    for (int i = 0; i < n; ++i) {
      std::vector<int> up = idx, dn = idx;
      up[i] += 1;
      dn[i] -= 1;
      double dd = std::abs(s[field.flat_index(up)] - 2 * s[flat] +
                           s[field.flat_index(dn)]) / (h * h);
      c2 = std::max(c2, dd);
    }
  }
  out.tol_u = 10 * h * h * c2;
  out.tol_g = 10 * h * c2;

  if (n == 1) extract_1d(field, k, out);
  if (n == 2) extract_2d(field, k, out);
  if (n == 3) extract_3d(field, k, out);

  // Singular candidates: |u| and |grad u| both inside their bands.
  for (int flat = 0; flat < field.nodes_per_slice(); ++flat) {
    if (field.is_boundary_node(flat)) continue;
    if (std::abs(s[flat]) > out.tol_u) continue;
    Eigen::VectorXd x = field.node_coords(flat);
    if (field.gradient(x, out.t).norm() <= out.tol_g)
      out.singular_points.push_back(x);
  }
  return out;
}

BoxDimension box_dimension(NodalSlice& slice,
                           const std::vector<double>& scales) {
  if (scales.size() < 4)
    throw std::invalid_argument("need at least 4 scales");
  double smin = *std::min_element(scales.begin(), scales.end());
  double smax = *std::max_element(scales.begin(), scales.end());
  if (std::log10(smax / smin) < 1.5 - 1e-9)
    throw std::invalid_argument("scales must span at least 1.5 decades");

  BoxDimension out;
  bool empty = slice.dim == 1 ? slice.points.empty()
               : slice.dim == 2 ? slice.segments.empty()
                                : slice.triangles.empty();
  if (empty || slice.identically_zero) {
    out.empty = true;
    out.dimension = -std::numeric_limits<double>::infinity();
    return out;
  }

  std::vector<double> lx, ly;
  for (double eps : scales) {
    auto pts = slice.sample_points(eps / 3.0);
    Eigen::VectorXd lo = pts.front();
    for (const auto& p : pts) lo = lo.cwiseMin(p);
    std::set<std::vector<long>> boxes;
    for (const auto& p : pts) {
      std::vector<long> key(slice.dim);
      for (int i = 0; i < slice.dim; ++i)
        key[i] = static_cast<long>(std::floor((p[i] - lo[i]) / eps));
      boxes.insert(key);
    }
    long count = static_cast<long>(boxes.size());
    out.table.emplace_back(eps, count);
    lx.push_back(std::log(1.0 / eps));
    ly.push_back(std::log(static_cast<double>(count)));
  }
  int m = static_cast<int>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double denom = m * sxx - sx * sx;
  double slope = (m * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / m;
  double ss = 0;
  for (int i = 0; i < m; ++i) {
    double resid = ly[i] - slope * lx[i] - intercept;
    ss += resid * resid;
  }
  double slope_se = std::sqrt(ss / std::max(1, m - 2) / (sxx - sx * sx / m));
  out.dimension = slope;
  out.half_width = 2 * slope_se;
  slice.box_counts = out.table;
  return out;
}

namespace {

std::vector<Eigen::VectorXd> ball_samples(int n, int steps) {
  std::vector<Eigen::VectorXd> pts;
  Eigen::VectorXd y(n);
  std::function<void(int)> rec = [&](int d) {
    if (d == n) {
      if (y.norm() < 1.0) pts.push_back(y);
      return;
    }
    for (int k = 0; k <= steps; ++k) {
      y[d] = -1.0 + 2.0 * k / steps;
      rec(d + 1);
    }
  };
  rec(0);
  return pts;
}

std::vector<Eigen::VectorXd> sphere_directions(int n, int m) {
  std::vector<Eigen::VectorXd> dirs;
  if (n == 1) {
    Eigen::VectorXd e(1);
    e[0] = 1;
    dirs.push_back(e);
    return dirs;
  }
  if (n == 2) {
    for (int j = 0; j < m; ++j) {
      double th = std::numbers::pi * j / m;  // half circle: w and -w coincide
      Eigen::VectorXd w(2);
      w << std::cos(th), std::sin(th);
      dirs.push_back(w);
    }
    return dirs;
  }
  // Fibonacci hemisphere.
  double golden = (1 + std::sqrt(5.0)) / 2;
  for (int j = 0; j < m; ++j) {
    double z = (j + 0.5) / m;  // upper hemisphere
    double rad = std::sqrt(std::max(0.0, 1 - z * z));
    double th = 2 * std::numbers::pi * j / golden;
    Eigen::VectorXd w(3);
    w << rad * std::cos(th), rad * std::sin(th), z;
    dirs.push_back(w);
  }
  return dirs;
}

// Orthonormal basis of the orthogonal complement of span{v}.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& v) {
  int n = static_cast<int>(v.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) -
                      v * v.transpose() / v.squaredNorm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(n - 1);
}

// Orthogonal complement of the column span of W.
Eigen::MatrixXd complement_of(const Eigen::MatrixXd& W) {
  int n = static_cast<int>(W.rows());
  int m = static_cast<int>(W.cols());
  if (m == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) -
                         W * (W.transpose() * W).inverse() * W.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(n - m);
}

// Monomials of degree d in m variables, as exponent lists.
std::vector<std::vector<int>> exponents(int m, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(m, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == m - 1) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[pos] = k;
      rec(pos + 1, left - k);
    }
  };
  rec(0, d);
  return out;
}

struct SliceFn {
  const SpaceTimeField* field;
  double t;
  Eigen::VectorXd x;
  double r;
  double normalizer = 1.0;

  double raw(const Eigen::VectorXd& y) const {
    return field->value(x + r * y, t);
  }
  double normalized(const Eigen::VectorXd& y) const {
    return raw(y) / normalizer;
  }
};

struct CandidateFit {
  double deviation = std::numeric_limits<double>::infinity();
  Eigen::VectorXd coef;
  int order = 0;
  Eigen::MatrixXd W;  // columns: basis of the coordinates P depends on
};

// Least-squares fit of a degree-d homogeneous polynomial in the W coordinates
// to uhat on B_1, followed by the unit-mean normalization the definition
// demands; returns the sup deviation.
CandidateFit fit_candidate(const std::vector<Eigen::VectorXd>& samples,
                           const std::vector<double>& uvals,
                           const Eigen::MatrixXd& W, int d) {
  int m = static_cast<int>(W.cols());
  auto exps = exponents(m, d);
  int nb = static_cast<int>(exps.size());
  int np = static_cast<int>(samples.size());
  Eigen::MatrixXd M(np, nb);
  for (int i = 0; i < np; ++i) {
    Eigen::VectorXd w = W.transpose() * samples[i];
    for (int j = 0; j < nb; ++j) {
      double v = 1;
      for (int q = 0; q < m; ++q)
        for (int p = 0; p < exps[j][q]; ++p) v *= w[q];
      M(i, j) = v;
    }
  }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(uvals.data(), np);
  Eigen::VectorXd coef = (M.transpose() * M)
                             .ldlt()
                             .solve(M.transpose() * rhs);
  // Normalize: mean_{B_1} P^2 = 1.
  Eigen::VectorXd fitted = M * coef;
  int n = static_cast<int>(samples.front().size());
  auto peval = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd w = W.transpose() * y;
    double s = 0;
    for (int j = 0; j < nb; ++j) {
      double v = coef[j];
      for (int q = 0; q < m; ++q)
        for (int p = 0; p < exps[j][q]; ++p) v *= w[q];
      s += v;
    }
    return s;
  };
  double mean_sq = ball_integrate(n, 1.0,
                                  [&](const Eigen::VectorXd& y) {
                                    double v = peval(y);
                                    return v * v;
                                  },
                                  24) /
                   ball_volume(n, 1.0);
  CandidateFit out;
  if (mean_sq <= 1e-300) return out;  // degenerate candidate
  double scale = 1.0 / std::sqrt(mean_sq);
  out.coef = coef * scale;
  out.order = d;
  out.W = W;
  double dev = 0;
  for (int i = 0; i < np; ++i)
    dev = std::max(dev, std::abs(rhs[i] - fitted[i] * scale));
  out.deviation = dev;
  return out;
}

Polynomial candidate_polynomial(const CandidateFit& fit, int n) {
  auto exps = exponents(static_cast<int>(fit.W.cols()), fit.order);
  Polynomial P(n);
  for (size_t j = 0; j < exps.size(); ++j) {
    Polynomial term = Polynomial::constant(n, rational_from_double(fit.coef[j]));
    for (int q = 0; q < fit.W.cols(); ++q) {
      Polynomial lin(n);
      for (int i = 0; i < n; ++i) {
        std::vector<int> mu(n, 0);
        mu[i] = 1;
        lin = lin + Polynomial::monomial(n, mu, 0,
                                         rational_from_double(fit.W(i, q)));
      }
      for (int p = 0; p < exps[j][q]; ++p) term = term * lin;
    }
    P = P + term;
  }
  return P;
}

}  // namespace

double symmetric_deviation(const SpaceTimeField& field, double t,
                           const Eigen::VectorXd& x, double r,
                           const Polynomial& P) {
  SliceFn u{&field, t, x, r};
  int n = field.dim();
  double mean_sq = ball_integrate(n, 1.0,
                                  [&](const Eigen::VectorXd& y) {
                                    double v = u.raw(y);
                                    return v * v;
                                  },
                                  32) /
                   ball_volume(n, 1.0);
  if (mean_sq <= 1e-300) throw std::domain_error("degenerate normalizer");
  u.normalizer = std::sqrt(mean_sq);
  double dev = 0;
  for (const auto& y : ball_samples(n, n == 3 ? 10 : 16))
    dev = std::max(dev, std::abs(u.normalized(y) - P.eval(y, 0.0)));
  return dev;
}

SymmetryReport symmetry_test(const SpaceTimeField& field, double t,
                             const Eigen::VectorXd& x, double r, int k,
                             double eta, int max_order) {
  int n = field.dim();
  if (k < 0 || k > n) throw std::invalid_argument("symmetry dimension out of range");
  for (int i = 0; i < n; ++i)
    if (x[i] - r < field.box().lo[i] - 1e-12 ||
        x[i] + r > field.box().hi[i] + 1e-12)
      throw std::domain_error("B_r(x) leaves the slice domain");

  SliceFn u{&field, t, x, r};
  double mean_sq = ball_integrate(n, 1.0,
                                  [&](const Eigen::VectorXd& y) {
                                    double v = u.raw(y);
                                    return v * v;
                                  },
                                  32) /
                   ball_volume(n, 1.0);
  if (mean_sq <= 1e-300) throw std::domain_error("degenerate normalizer");
  u.normalizer = std::sqrt(mean_sq);

  auto samples = ball_samples(n, n == 3 ? 10 : 16);
  std::vector<double> uvals(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    uvals[i] = u.normalized(samples[i]);

  SymmetryReport report;
  report.center = x;
  report.r = r;
  report.k = k;
  report.eta = eta;

  if (k == n) {
    // Fully symmetric: P is the constant +-1.
    double dev_p = 0, dev_m = 0;
    for (double v : uvals) {
      dev_p = std::max(dev_p, std::abs(v - 1.0));
      dev_m = std::max(dev_m, std::abs(v + 1.0));
    }
    double best = std::min(dev_p, dev_m);
    report.order = 0;
    report.P = Polynomial::constant(n, Rational(dev_p <= dev_m ? 1 : -1));
    report.V = Eigen::MatrixXd::Identity(n, n);
    report.deviation = best;
    report.verdict = best <= eta;
    return report;
  }

  CandidateFit best;
  for (int d = 0; d <= max_order; ++d) {
    if (k == 0) {
      // Plain homogeneity: full coordinate set, no orientation search.
      CandidateFit c = fit_candidate(samples, uvals,
                                     Eigen::MatrixXd::Identity(n, n), d);
      if (c.deviation < best.deviation) best = c;
      continue;
    }
    int m = n - k;  // dimension of the coordinates P may depend on
    // Orientation grid. For m = 1 the searched direction spans W itself; for
    // m = 2 (n = 3, k = 1) the searched direction spans V and W is its
    // complement.
    int grid = n == 2 ? 96 : 400;
    auto dirs = sphere_directions(n, grid);
    Eigen::VectorXd best_dir;
    CandidateFit best_d;
    for (const auto& w : dirs) {
      Eigen::MatrixXd W;
      if (m == 1)
        W = w;
      else
        W = complement_basis(w);
      CandidateFit c = fit_candidate(samples, uvals, W, d);
      if (c.deviation < best_d.deviation) {
        best_d = c;
        best_dir = w;
      }
    }
    // Local refinement around the best direction.
    if (best_dir.size() > 0) {
      double step = n == 2 ? std::numbers::pi / grid : 0.1;
      for (int iter = 0; iter < 12; ++iter) {
        bool improved = false;
        for (int axis = 0; axis < n; ++axis)
          for (double sgn : {+1.0, -1.0}) {
            Eigen::VectorXd cand = best_dir + sgn * step * Eigen::VectorXd::Unit(n, axis);
            cand.normalize();
            Eigen::MatrixXd W = (m == 1) ? Eigen::MatrixXd(cand)
                                         : complement_basis(cand);
            CandidateFit c = fit_candidate(samples, uvals, W, d);
            if (c.deviation < best_d.deviation) {
              best_d = c;
              best_dir = cand;
              improved = true;
            }
          }
        if (!improved) step /= 2;
      }
    }
    if (best_d.deviation < best.deviation) best = best_d;
  }

  if (!std::isfinite(best.deviation))
    throw std::domain_error("degenerate symmetry fit");

  report.order = best.order;
  report.P = candidate_polynomial(best, n);
  if (k == 0)
    report.V = Eigen::MatrixXd::Zero(n, 0);
  else
    report.V = complement_of(best.W);
  report.deviation = best.deviation;
  report.verdict = best.deviation <= eta;
  return report;
}

double shift_invariance_defect(const Polynomial& P, const Eigen::MatrixXd& V) {
  if (V.cols() == 0) return 0.0;
  int n = P.dim();
  double worst = 0;
  auto pts = ball_samples(n, 8);
  for (const auto& y : pts)
    for (int c = 0; c < V.cols(); ++c)
      for (double s : {-0.5, 0.3, 0.7}) {
        Eigen::VectorXd shifted = y + s * V.col(c);
        worst = std::max(worst,
                         std::abs(P.eval(shifted, 0.0) - P.eval(y, 0.0)));
      }
  return worst;
}

StratifyResult stratify(const SpaceTimeField& field, double t, int k,
                        double eta, const std::vector<double>& scales,
                        const std::vector<Eigen::VectorXd>& nodes,
                        int max_order) {
  StratifyResult result;
  result.k = k;
  result.eta = eta;
  for (const auto& x : nodes) {
    ++result.nodes_checked;
    bool symmetric_somewhere = false;
    for (double s : scales) {
      bool fits = true;
      for (int i = 0; i < field.dim(); ++i)
        if (x[i] - s < field.box().lo[i] || x[i] + s > field.box().hi[i])
          fits = false;
      if (!fits) continue;
      try {
        if (symmetry_test(field, t, x, s, k + 1, eta, max_order).verdict) {
          symmetric_somewhere = true;
          break;
        }
      } catch (const std::domain_error&) {
        continue;  // degenerate window at this scale
      }
    }
    if (!symmetric_somewhere) result.stratum.push_back(x);
  }
  return result;
}

ConeSplitVerdict cone_splitting_check(const SpaceTimeField& field, double t,
                                      const Eigen::VectorXd& x,
                                      const Eigen::MatrixXd& V, double r2,
                                      double r1, const Eigen::VectorXd& y,
                                      double eps, double eta, int max_order) {
  ConeSplitVerdict verdict;
  int k = static_cast<int>(V.cols());
  // Uniform k-symmetry along [r2, r1]: one polynomial fits all scales.
  double rmid = std::sqrt(r1 * r2);
  SymmetryReport mid = symmetry_test(field, t, x, rmid, k, eps, max_order);
  double worst = mid.deviation;
  for (double r : {r2, 0.5 * (r2 + r1), r1})
    worst = std::max(worst, symmetric_deviation(field, t, x, r, mid.P));
  verdict.k_deviation = worst;
  if (worst > eps) {
    verdict.detail = "uniform k-symmetry not established";
    return verdict;
  }
  // Secondary point: inside B_r(x), away from x + V, 0-symmetric at r1.
  double r = r1;
  Eigen::VectorXd d = y - x;
  Eigen::VectorXd proj = V.cols() > 0 ? (V * (V.transpose() * d)).eval()
                                      : Eigen::VectorXd::Zero(d.size());
  double off_plane = (d - proj).norm();
  const double tau = 0.05;
  if (d.norm() > r || off_plane < tau * r) {
    verdict.detail = "secondary point not in the admissible annulus";
    return verdict;
  }
  SymmetryReport at_y = symmetry_test(field, t, y, r, 0, eps, max_order);
  if (!at_y.verdict) {
    verdict.detail = "secondary point not 0-symmetric at the working scale";
    return verdict;
  }
  verdict.preconditions_met = true;

  SymmetryReport up = symmetry_test(field, t, x, rmid, k + 1, eta, max_order);
  double worst_up = up.deviation;
  for (double rr : {r2, 0.5 * (r2 + r1), r1})
    worst_up = std::max(worst_up, symmetric_deviation(field, t, x, rr, up.P));
  verdict.k1_deviation = worst_up;
  verdict.splits = worst_up <= eta;
  verdict.detail = verdict.splits ? "upgraded to (k+1)-symmetry"
                                  : "no (k+1)-symmetric polynomial found";
  return verdict;
}

NodalCountSeries nodal_count_1d(const SpaceTimeField& field,
                                double band_factor) {
  if (field.dim() != 1)
    throw std::invalid_argument("nodal_count_1d expects a 1D field");
  NodalCountSeries out;
  for (int k = 0; k < field.num_times(); ++k) {
    const auto& s = field.slice(k);
    double vmax = 0;
    for (double v : s) vmax = std::max(vmax, std::abs(v));
    double band = band_factor * vmax;
    int count = 0, last_sign = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      double v = s[i];
      if (std::abs(v) <= band) continue;
      int sign = v > 0 ? 1 : -1;
      if (last_sign != 0 && sign != last_sign) ++count;
      last_sign = sign;
    }
    out.times.push_back(field.time(k));
    out.counts.push_back(count);
  }
  out.non_increasing = true;
  for (size_t i = 1; i < out.counts.size(); ++i)
    if (out.counts[i] > out.counts[i - 1]) out.non_increasing = false;
  return out;
}

}  // namespace parafreq
