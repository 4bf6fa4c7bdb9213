#include "parafreq/field.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <stdexcept>

namespace parafreq {

bool Box::contains(const Eigen::VectorXd& x, double margin) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - margin || x[i] > hi[i] + margin) return false;
  return true;
}

SpaceTimeField::SpaceTimeField(Box box, double h, double t_start, double dt,
                               int n_times, Provenance provenance)
    : box_(std::move(box)), h_(h), dt_(dt), provenance_(provenance) {
  if (h <= 0 || n_times < 1) throw std::invalid_argument("bad grid parameters");
  int n = box_.dim();
  if (n < 1 || n > 3) throw std::invalid_argument("field dimension must be 1..3");
  dims_.resize(n);
  slice_size_ = 1;
  for (int i = 0; i < n; ++i) {
    double span = box_.hi[i] - box_.lo[i];
    dims_[i] = static_cast<int>(std::lround(span / h)) + 1;
    if (dims_[i] < 2) throw std::invalid_argument("box too small for spacing");
    slice_size_ *= dims_[i];
  }
  times_.resize(n_times);
  for (int k = 0; k < n_times; ++k) times_[k] = t_start + k * dt;
  data_.assign(n_times, std::vector<double>(slice_size_, 0.0));
}

SpaceTimeField SpaceTimeField::from_function(Box box, double h, double t_start,
                                             double dt, int n_times, ScalarFn fn,
                                             Provenance provenance,
                                             GradientFn grad) {
  SpaceTimeField f(std::move(box), h, t_start, dt, n_times, provenance);
  for (int k = 0; k < n_times; ++k)
    for (int flat = 0; flat < f.slice_size_; ++flat)
      f.data_[k][flat] = fn(f.node_coords(flat), f.times_[k]);
  f.exact_ = std::move(fn);
  f.exact_grad_ = std::move(grad);
  return f;
}

Eigen::VectorXd SpaceTimeField::node_coords(int flat) const {
  int n = dim();
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = box_.lo[i] + (flat % dims_[i]) * h_;
    flat /= dims_[i];
  }
  return x;
}

int SpaceTimeField::flat_index(const std::vector<int>& idx) const {
  int flat = 0;
  for (int i = dim() - 1; i >= 0; --i) flat = flat * dims_[i] + idx[i];
  return flat;
}

bool SpaceTimeField::is_boundary_node(int flat) const {
  for (int i = 0; i < dim(); ++i) {
    int c = flat % dims_[i];
    flat /= dims_[i];
    if (c == 0 || c == dims_[i] - 1) return true;
  }
  return false;
}

int SpaceTimeField::slice_index(double t) const {
  double rel = (t - times_.front()) / dt_;
  int k = static_cast<int>(std::lround(rel));
  if (k < 0 || k >= num_times() || std::abs(times_[k] - t) > 0.51 * dt_)
    throw std::domain_error("time outside the stored range");
  return k;
}

double SpaceTimeField::interp_slice(int k, const Eigen::VectorXd& x) const {
  int n = dim();
  std::vector<int> base(n);
  std::vector<double> frac(n);
  for (int i = 0; i < n; ++i) {
    double rel = (x[i] - box_.lo[i]) / h_;
    if (rel < -1e-9 || rel > dims_[i] - 1 + 1e-9)
      throw std::domain_error("point outside the spatial domain");
    rel = std::clamp(rel, 0.0, static_cast<double>(dims_[i] - 1));
    int b = std::min(static_cast<int>(rel), dims_[i] - 2);
    base[i] = b;
    frac[i] = rel - b;
  }
  double sum = 0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) {
      int bit = (corner >> i) & 1;
      idx[i] = base[i] + bit;
      w *= bit ? frac[i] : 1 - frac[i];
    }
    if (w != 0) sum += w * data_[k][flat_index(idx)];
  }
  return sum;
}

double SpaceTimeField::value(const Eigen::VectorXd& x, double t) const {
  if (exact_) return exact_(x, t);
  double rel = (t - times_.front()) / dt_;
  if (rel < -1e-9 || rel > num_times() - 1 + 1e-9)
    throw std::domain_error("time outside the stored range");
  rel = std::clamp(rel, 0.0, static_cast<double>(num_times() - 1));
  int k = std::min(static_cast<int>(rel), num_times() - 2);
  if (num_times() == 1) return interp_slice(0, x);
  double f = rel - k;
  if (f == 0) return interp_slice(k, x);
  return (1 - f) * interp_slice(k, x) + f * interp_slice(k + 1, x);
}

Eigen::VectorXd SpaceTimeField::gradient(const Eigen::VectorXd& x, double t) const {
  int n = dim();
  if (exact_grad_) return exact_grad_(x, t);
  if (exact_) {
    // Central differences of the defining callable at a step decoupled from
    // the storage grid.
    const double step = 1e-5 * std::max(1.0, x.norm());
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd a = x, b = x;
      a[i] += step;
      b[i] -= step;
      g[i] = (exact_(a, t) - exact_(b, t)) / (2 * step);
    }
    return g;
  }
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    double lo = box_.lo[i], hi = box_.hi[i];
    double step = h_;
    double xp = std::min(x[i] + step, hi), xm = std::max(x[i] - step, lo);
    Eigen::VectorXd a = x, b = x;
    a[i] = xp;
    b[i] = xm;
    g[i] = (value(a, t) - value(b, t)) / (xp - xm);
  }
  return g;
}

void SpaceTimeField::save(const std::string& path_prefix) const {
  static_assert(sizeof(double) == 8);
  std::ofstream raw(path_prefix + ".f64", std::ios::binary);
  if (!raw) throw std::runtime_error("cannot open " + path_prefix + ".f64");
  for (const auto& s : data_) {
    for (double v : s) {
      uint64_t bits;
      std::memcpy(&bits, &v, 8);
      // little-endian on disk
      unsigned char buf[8];
      for (int i = 0; i < 8; ++i) buf[i] = (bits >> (8 * i)) & 0xff;
      raw.write(reinterpret_cast<char*>(buf), 8);
    }
  }
  nlohmann::json meta;
  std::vector<int> shape;
  shape.push_back(num_times());
  for (int i = dim() - 1; i >= 0; --i) shape.push_back(dims_[i]);
  meta["shape"] = shape;
  meta["spacing"] = h_;
  meta["t0"] = times_.front();
  meta["dt"] = dt_;
  std::vector<double> bbox;
  for (int i = 0; i < dim(); ++i) bbox.push_back(box_.lo[i]);
  for (int i = 0; i < dim(); ++i) bbox.push_back(box_.hi[i]);
  meta["bbox"] = bbox;
  meta["provenance"] = provenance_ == Provenance::Solver        ? "solver"
                       : provenance_ == Provenance::ClosedForm ? "closed-form"
                                                               : "convolution";
  std::ofstream side(path_prefix + ".json");
  side << meta.dump(2) << "\n";
}

SpaceTimeField SpaceTimeField::load(const std::string& path_prefix) {
  std::ifstream side(path_prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + path_prefix + ".json");
  nlohmann::json meta = nlohmann::json::parse(side);
  std::vector<int> shape = meta.at("shape").get<std::vector<int>>();
  int n = static_cast<int>(shape.size()) - 1;
  std::vector<double> bbox = meta.at("bbox").get<std::vector<double>>();
  Box box;
  box.lo = Eigen::VectorXd(n);
  box.hi = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) {
    box.lo[i] = bbox[i];
    box.hi[i] = bbox[n + i];
  }
  std::string prov = meta.value("provenance", "solver");
  Provenance p = prov == "closed-form"  ? Provenance::ClosedForm
                 : prov == "convolution" ? Provenance::Convolution
                                         : Provenance::Solver;
  SpaceTimeField f(box, meta.at("spacing").get<double>(),
                   meta.at("t0").get<double>(), meta.at("dt").get<double>(),
                   shape[0], p);
  std::ifstream raw(path_prefix + ".f64", std::ios::binary);
  if (!raw) throw std::runtime_error("cannot open " + path_prefix + ".f64");
  for (int k = 0; k < shape[0]; ++k)
    for (int flat = 0; flat < f.slice_size_; ++flat) {
      unsigned char buf[8];
      raw.read(reinterpret_cast<char*>(buf), 8);
      if (!raw) throw std::runtime_error("snapshot truncated");
      uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= uint64_t(buf[i]) << (8 * i);
      double v;
      std::memcpy(&v, &bits, 8);
      f.data_[k][flat] = v;
    }
  return f;
}

CoefficientField CoefficientField::heat(int n) {
  CoefficientField c;
  c.n = n;
  c.a = [n](const Eigen::VectorXd&, double) {
    return Eigen::MatrixXd::Identity(n, n).eval();
  };
  c.b = [n](const Eigen::VectorXd&, double) {
    return Eigen::VectorXd::Zero(n).eval();
  };
  c.c = [](const Eigen::VectorXd&, double) { return 0.0; };
  c.lambda = 0.0;
  c.alpha = 1.0;
  c.name = "heat";
  return c;
}

CoefficientField CoefficientField::perturbed_heat(int n, double lambda) {
  CoefficientField c = heat(n);
  c.a = [n, lambda](const Eigen::VectorXd& x, double t) {
    double phase = 0;
    for (int i = 0; i < n; ++i) phase += x[i];
    double s = 0.5 * std::sin(0.5 * phase) * std::cos(0.5 * t);
    return ((1.0 + lambda * s) * Eigen::MatrixXd::Identity(n, n)).eval();
  };
  c.lambda = lambda;
  c.alpha = 1.0;
  c.name = "perturbed_heat";
  return c;
}

CoefficientField CoefficientField::variable_1d() {
  CoefficientField c = heat(1);
  c.a = [](const Eigen::VectorXd& x, double t) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 1.0 + 0.1 * std::sin(x[0]) * std::cos(t);
    return m;
  };
  c.lambda = 0.12;  // (1+lambda)^{-1} <= 0.9 needs lambda >= 1/9
  c.alpha = 1.0;
  c.name = "variable_1d";
  return c;
}

CoefficientField CoefficientField::tabulated(const SpaceTimeField& phi,
                                             double lambda, double alpha) {
  CoefficientField c = heat(phi.dim());
  auto grid = std::make_shared<SpaceTimeField>(phi);
  c.a = [grid](const Eigen::VectorXd& x, double t) {
    int n = grid->dim();
    return (grid->value(x, t) * Eigen::MatrixXd::Identity(n, n)).eval();
  };
  c.lambda = lambda;
  c.alpha = alpha;
  c.name = "tabulated";
  return c;
}

std::vector<CoefficientViolation> validate_coefficients(
    const CoefficientField& coeffs, const Box& box, double h,
    const std::vector<double>& times, unsigned seed) {
  std::vector<CoefficientViolation> out;
  int n = box.dim();
  double lo_bound = 1.0 / (1.0 + coeffs.lambda);
  double hi_bound = 1.0 + coeffs.lambda;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto sample_point = [&]() {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x[i] = box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]);
    return x;
  };

  const int n_samples = 500;
  for (int k = 0; k < n_samples; ++k) {
    Eigen::VectorXd x = sample_point();
    double t = times.front() + unit(rng) * (times.back() - times.front());
    Eigen::MatrixXd a = coeffs.a(x, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    double emin = es.eigenvalues().minCoeff();
    double emax = es.eigenvalues().maxCoeff();
    if (emin < lo_bound - 1e-12 || emax > hi_bound + 1e-12)
      out.push_back({"ellipticity bound violated", x, t});
    if (coeffs.b(x, t).norm() > coeffs.lambda + 1e-12)
      out.push_back({"drift bound violated", x, t});
    if (std::abs(coeffs.c(x, t)) > coeffs.lambda + 1e-12)
      out.push_back({"zeroth-order bound violated", x, t});
  }

  // Modulus of continuity against the declared (lambda, alpha).
  for (int k = 0; k < n_samples; ++k) {
    Eigen::VectorXd x = sample_point(), y = sample_point();
    double t = times.front() + unit(rng) * (times.back() - times.front());
    double s = times.front() + unit(rng) * (times.back() - times.front());
    double d = std::sqrt((x - y).squaredNorm() + std::abs(t - s));
    if (d < h) continue;
    double diff = (coeffs.a(x, t) - coeffs.a(y, s)).norm();
    if (diff > coeffs.lambda * std::pow(d, coeffs.alpha) + 1e-12)
      out.push_back({"modulus of continuity violated", x, t});
  }
  return out;
}

}  // namespace parafreq
