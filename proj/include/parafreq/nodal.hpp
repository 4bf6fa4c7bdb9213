#pragma once

#include "parafreq/field.hpp"
#include "parafreq/polynomial.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace parafreq {

// Codimension-one elements of the zero set of one time slice: points in 1D,
// segments in 2D, triangles in 3D.
struct NodalSlice {
  double t = 0.0;
  int dim = 1;
  std::vector<double> points;                                   // 1D
  std::vector<std::array<Eigen::Vector2d, 2>> segments;         // 2D
  std::vector<std::array<Eigen::Vector3d, 3>> triangles;        // 3D
  double measure = 0.0;  // count / length / area
  std::vector<std::pair<double, long>> box_counts;  // (eps, N(eps))
  std::vector<Eigen::VectorXd> singular_points;
  double tol_u = 0.0;  // |u| band used for the singular set
  double tol_g = 0.0;  // gradient band
  bool identically_zero = false;

  // Points spread along the elements, at most `step` apart.
  std::vector<Eigen::VectorXd> sample_points(double step) const;
  void write_csv(const std::string& path) const;
};

// Zero tie-break: grid value 0 counts as positive, which keeps the contour
// topology consistent across neighbouring cells.
NodalSlice extract_nodal(const SpaceTimeField& field, double t);

struct BoxDimension {
  double dimension = 0.0;
  double half_width = 0.0;  // confidence half-width from fit residuals
  bool empty = false;       // empty set: dimension reported as -inf
  std::vector<std::pair<double, long>> table;
};

// log N(eps) against log(1/eps); needs >= 4 scales spanning >= 1.5 decades.
// The count table is recorded on the slice as well.
BoxDimension box_dimension(NodalSlice& slice,
                           const std::vector<double>& scales);

struct SymmetryReport {
  Eigen::VectorXd center;
  double r = 0.0;
  int k = 0;
  double eta = 0.0;
  int order = 0;             // homogeneity order of the best fit
  Polynomial P;              // k-symmetric fit, mean_{B_1} P^2 = 1
  Eigen::MatrixXd V;         // columns span the invariance plane (may be empty)
  double deviation = 0.0;    // sup_{B_1} |u_{x,r} - P|
  bool verdict = false;

  SymmetryReport() : P(1) {}
};

// Quantitative (k, eta, r, x)-symmetry of the t-slice: the normalized
// rescaling u_{x,r} is compared in sup norm on B_1 against homogeneous
// polynomials invariant along a k-plane. Orientation search: coarse grid
// (~500 directions per sphere) plus local refinement.
SymmetryReport symmetry_test(const SpaceTimeField& field, double t,
                             const Eigen::VectorXd& x, double r, int k,
                             double eta, int max_order = 4);

// Deviation of the normalized rescaling from a fixed candidate polynomial.
double symmetric_deviation(const SpaceTimeField& field, double t,
                           const Eigen::VectorXd& x, double r,
                           const Polynomial& P);

// Largest |P(y+v) - P(y)| over samples y in B_1 and shifts v along V.
double shift_invariance_defect(const Polynomial& P, const Eigen::MatrixXd& V);

struct StratifyResult {
  int k = 0;
  double eta = 0.0;
  std::vector<Eigen::VectorXd> stratum;  // nodes with no (k+1)-symmetric scale
  int nodes_checked = 0;
};

// Grid classification of S^k_eta over the given nodes: a node belongs to the
// stratum when no scale in the dyadic list makes it (k+1, eta)-symmetric.
StratifyResult stratify(const SpaceTimeField& field, double t, int k,
                        double eta, const std::vector<double>& scales,
                        const std::vector<Eigen::VectorXd>& nodes,
                        int max_order = 4);

struct ConeSplitVerdict {
  bool preconditions_met = false;
  bool splits = false;
  double k_deviation = 0.0;      // uniform k-symmetry defect over the range
  double k1_deviation = 0.0;     // best uniform (k+1)-symmetry defect
  std::string detail;
};

// Cone splitting: uniform (k, eps, x)-symmetry along V over [r2, r1] plus a
// (0, eps)-symmetric point y off the plane upgrades to (k+1, eta, x).
ConeSplitVerdict cone_splitting_check(const SpaceTimeField& field, double t,
                                      const Eigen::VectorXd& x,
                                      const Eigen::MatrixXd& V, double r2,
                                      double r1, const Eigen::VectorXd& y,
                                      double eps, double eta,
                                      int max_order = 4);

struct NodalCountSeries {
  std::vector<double> times;
  std::vector<int> counts;
  bool non_increasing = false;
};

// Interior sign-change counts per slice of a 1D Dirichlet field, with a
// hysteresis band suppressing grid flicker.
NodalCountSeries nodal_count_1d(const SpaceTimeField& field,
                                double band_factor = 1e-9);

}  // namespace parafreq
