#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <string>

namespace stochpot::geom {

using Vec = Eigen::Vector3d;

// Points live in R^3 throughout; planar domains use the z = 0 slice with the
// dimension carried by the owning Domain.

enum class DomainKind { Ball, Disc, Shell, Cylinder };

struct Domain {
  DomainKind kind = DomainKind::Ball;
  int dim = 3;
  double radius = 1.0;        // outer radius for Shell
  double inner_radius = 0.0;  // Shell only
  double length = 0.0;        // Cylinder only, axis along z in [-L/2, L/2]
  Vec center = Vec::Zero();

  static Domain ball(int n, double R, const Vec& c = Vec::Zero());
  static Domain disc(double R, const Vec& c = Vec::Zero());
  static Domain shell(int n, double r_inner, double r_outer, const Vec& c = Vec::Zero());
  static Domain cylinder(double R, double L);

  bool contains(const Vec& x) const;
  // distance from an interior point to the boundary (the largest inscribed
  // ball radius); used by the walk-on-spheres solver
  double boundary_distance(const Vec& x) const;
  std::string describe() const;
};

enum class MeasureKind { Volume, Surface, Curve };

struct DomainGrid {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;
  Eigen::VectorXd weights;
  MeasureKind measure = MeasureKind::Volume;
  double exact_measure = 0.0;  // 0 when no closed form is available
  double cell_size = 0.0;      // spacing of the generating lattice, 0 for surface grids
  std::string descriptor;

  int size() const { return static_cast<int>(points.rows()); }
  Vec point(int i) const { return points.row(i).transpose(); }
  double weight_sum() const { return weights.sum(); }
  double measure_error() const { return std::abs(weight_sum() - exact_measure); }
};

// pi^{n/2} R^n / Gamma(n/2 + 1)
double ball_volume(int n, double R);
// measure of the boundary sphere, n omega_{n-1}-style: d/dR of the volume
double sphere_area(int n, double R);
// |B_{2R} \ B_R| / |B_R| = 2^n - 1, independent of R
double shell_volume_ratio(int n, double R = 1.0);

// Volume grids: tensor-product midpoint cells clipped to the domain, with the
// covered fraction of boundary cells estimated by 4^dim subsampling.
// Surface grids: latitude-longitude bands with sin(theta) weights on spheres,
// uniform angular samples on circles. `resolution` is the cell count per axis.
DomainGrid build_grid(const Domain& d, MeasureKind measure, int resolution);

struct Curve {
  Eigen::Matrix<double, Eigen::Dynamic, 3> samples;  // ordered path nodes
  bool closed = false;

  static Curve segment(const Vec& a, const Vec& b, int n_samples);
  static Curve circle(double R, const Vec& c, int n_samples);  // closed, in z = c_z plane

  int size() const { return static_cast<int>(samples.rows()); }
  Vec node(int i) const { return samples.row(i).transpose(); }
  Vec endpoint_a() const { return samples.row(0).transpose(); }
  Vec endpoint_b() const { return samples.row(samples.rows() - 1).transpose(); }
};

// Curvilinear frames (Appendix-style coordinates). Angles follow the physics
// convention: theta is the polar angle from +z, phi the azimuth.
Vec spherical_to_cartesian(double r, double theta, double phi);
Vec cylindrical_to_cartesian(double r, double phi, double z);
Vec polar_to_cartesian(double r, double theta);
void cartesian_to_spherical(const Vec& x, double& r, double& theta, double& phi);
void cartesian_to_cylindrical(const Vec& x, double& r, double& phi, double& z);
void cartesian_to_polar(const Vec& x, double& r, double& theta);

// CSV dump: header row with the domain descriptor, then one row per node.
void write_csv(const DomainGrid& grid, std::ostream& os);

}  // namespace stochpot::geom
