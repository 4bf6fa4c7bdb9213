#pragma once

#include "parafreq/caloric.hpp"
#include "parafreq/field.hpp"

#include <optional>
#include <vector>

namespace parafreq {

// Symmetric positive square root of the coefficient matrix a(x,t).
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& a);

// Rescaled window u_{x,t;l}(y,s) = u(x + l A y, t + l^2 s) / norm with
// norm^2 = mean_{Q_1} of the rescaled square. A = sqrt(a(x,t)).
struct RescaledWindow {
  const SpaceTimeField* field = nullptr;
  Eigen::VectorXd x;
  double t = 0.0;
  double ell = 1.0;
  Eigen::MatrixXd A;
  double norm = 1.0;

  double eval(const Eigen::VectorXd& y, double s) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& y, double s) const;
};

RescaledWindow make_rescaled_window(const SpaceTimeField& field,
                                    const Eigen::VectorXd& x, double t,
                                    double ell,
                                    const Eigen::MatrixXd& A_opt = Eigen::MatrixXd());

// Rescaled coefficients of the window equation, derived metadata.
CoefficientField rescaled_coefficients(const CoefficientField& base,
                                       const Eigen::VectorXd& x, double t,
                                       double ell);

struct SliceIntegrals {
  double H = 0.0;  // int u^2 G on the slice t0 - r^2
  double E = 0.0;  // 2 r^2 int |grad u|^2 G on the same slice
  double N() const { return E / H; }
};

// Localized Poon integrals at center (x0,t0). Integration runs over the
// rescaled ball |z| < min(R0 / r, 12); past 12 rescaled units the Gaussian
// tail drops below 1e-8 relative for the polynomial growth handled here
// (parabolic degree <= 6). A defaults to the identity.
SliceIntegrals slice_integrals(const SpaceTimeField& field,
                               const Eigen::VectorXd& x0, double t0, double r,
                               double R0,
                               const Eigen::MatrixXd& A = Eigen::MatrixXd());

// Same, with an explicit cutoff in rescaled units (used for tail checks).
SliceIntegrals slice_integrals_z(const SpaceTimeField& field,
                                 const Eigen::VectorXd& x0, double t0,
                                 double scale, double z_radius,
                                 const Eigen::MatrixXd& A = Eigen::MatrixXd());

struct FrequencySample {
  double r = 0.0;
  double H = 0.0;
  double E = 0.0;
  double N = 0.0;
  std::optional<double> D;  // log_4 H(2r)/H(r) when 2r is admissible
  double doubling_residual = 0.0;  // cumulative trapezoid residual of
                                   // log H(r)/H(r_min) = 2 int N/s ds
};

struct FrequencyProfile {
  Eigen::VectorXd center;
  double t0 = 0.0;
  double R0 = 0.0;
  std::vector<FrequencySample> samples;

  double max_doubling_residual() const;
  void write_csv(const std::string& path) const;
};

FrequencyProfile frequency_profile(const SpaceTimeField& field,
                                   const Eigen::VectorXd& x0, double t0,
                                   const std::vector<double>& radii, double R0,
                                   const Eigen::MatrixXd& A = Eigen::MatrixXd());

struct MonotonicityViolation {
  Eigen::VectorXd center;
  double r1 = 0.0, r2 = 0.0;
  double N1 = 0.0, N2 = 0.0;
};

struct FlatnessObservation {
  Eigen::VectorXd center;
  double r = 0.0;
  double N = 0.0;
  double a0 = 0.0;
  double sup_deviation = 0.0;
  double ratio = 0.0;  // deviation / (sqrt(eps) |a0|)
};

struct AuditReport {
  std::vector<MonotonicityViolation> violations;
  std::vector<FlatnessObservation> flatness;
  int centers_checked = 0;
  int pairs_checked = 0;
};

// Checks N(r1) <= N(r2) + eps over all radius pairs at each center; for
// small-frequency windows (N <= eps) also records the flatness of u there.
AuditReport almost_monotonicity_audit(const SpaceTimeField& field,
                                      const CoefficientField& coeffs,
                                      const std::vector<Eigen::VectorXd>& centers,
                                      const std::vector<double>& radii,
                                      double eps, double R0);

struct PinchScan {
  std::vector<double> scales;
  std::vector<double> N;
  std::vector<int> drop_indices;  // i with |N_i - N_{i+1}| >= delta
  struct Plateau {
    int first = 0, last = 0;
    double mean_N = 0.0;
    int nearest_integer = 0;
    double integer_distance = 0.0;
  };
  std::vector<Plateau> plateaus;
};

// Geometric scale sweep r_i = r ratio^i; reports where the frequency drops
// by >= delta and classifies the pinched plateaus by nearest integer.
PinchScan pinch_scan(const SpaceTimeField& field, const Eigen::VectorXd& x0,
                     double t0, double r, double ratio, double delta, double R0,
                     int max_scales = 32,
                     const Eigen::MatrixXd& A = Eigen::MatrixXd());

struct TangentFit {
  CaloricPolynomial P;     // homogeneous of the plateau order, cylinder-unit
  double sup_error_Q1 = 0.0;
  double sup_error_slice = 0.0;  // on the s = 0 slice of the window
  double N_at_r = 0.0;
};

// Least-squares fit of a homogeneous caloric polynomial of order d to the
// rescaled window over Q_1. Requires the frequency at r to sit within
// plateau_delta of d.
TangentFit tangent_fit(const SpaceTimeField& field, const Eigen::VectorXd& x0,
                       double t0, double r, int d, double R0,
                       double plateau_delta = 0.2,
                       const Eigen::MatrixXd& A = Eigen::MatrixXd());

// sup over a Q_1 sample grid of |P1 - P2|.
double tangent_distance(const CaloricPolynomial& P1, const CaloricPolynomial& P2);

}  // namespace parafreq
