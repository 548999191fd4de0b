#include "stochpot/geometry.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace stochpot::geom {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

Domain Domain::ball(int n, double R, const Vec& c) {
  require(n >= 1, "ball: dimension must be >= 1");
  require(R > 0, "ball: radius must be positive");
  Domain d;
  d.kind = DomainKind::Ball;
  d.dim = n;
  d.radius = R;
  d.center = c;
  return d;
}

Domain Domain::disc(double R, const Vec& c) {
  require(R > 0, "disc: radius must be positive");
  Domain d;
  d.kind = DomainKind::Disc;
  d.dim = 2;
  d.radius = R;
  d.center = c;
  return d;
}

Domain Domain::shell(int n, double r_inner, double r_outer, const Vec& c) {
  require(n >= 1, "shell: dimension must be >= 1");
  require(r_inner > 0 && r_inner < r_outer, "shell: need 0 < r_inner < r_outer");
  Domain d;
  d.kind = DomainKind::Shell;
  d.dim = n;
  d.radius = r_outer;
  d.inner_radius = r_inner;
  d.center = c;
  return d;
}

Domain Domain::cylinder(double R, double L) {
  require(R > 0 && L > 0, "cylinder: radius and length must be positive");
  Domain d;
  d.kind = DomainKind::Cylinder;
  d.dim = 3;
  d.radius = R;
  d.length = L;
  return d;
}

bool Domain::contains(const Vec& x) const {
  const Vec rel = x - center;
  switch (kind) {
    case DomainKind::Ball: {
      const double r2 = dim == 2 ? rel.head<2>().squaredNorm() : rel.squaredNorm();
      return r2 < radius * radius;
    }
    case DomainKind::Disc:
      return rel.head<2>().squaredNorm() < radius * radius;
    case DomainKind::Shell: {
      const double r2 = dim == 2 ? rel.head<2>().squaredNorm() : rel.squaredNorm();
      return r2 > inner_radius * inner_radius && r2 < radius * radius;
    }
    case DomainKind::Cylinder: {
      const double rr = rel.head<2>().norm();
      return rr < radius && std::abs(rel.z()) < 0.5 * length;
    }
  }
  return false;
}

double Domain::boundary_distance(const Vec& x) const {
  const Vec rel = x - center;
  switch (kind) {
    case DomainKind::Ball:
      return radius - (dim == 2 ? rel.head<2>().norm() : rel.norm());
    case DomainKind::Disc:
      return radius - rel.head<2>().norm();
    case DomainKind::Shell: {
      const double r = dim == 2 ? rel.head<2>().norm() : rel.norm();
      return std::min(radius - r, r - inner_radius);
    }
    case DomainKind::Cylinder: {
      const double rr = rel.head<2>().norm();
      return std::min(radius - rr, 0.5 * length - std::abs(rel.z()));
    }
  }
  return 0.0;
}

std::string Domain::describe() const {
  char buf[160];
  switch (kind) {
    case DomainKind::Ball:
      std::snprintf(buf, sizeof buf, "ball(n=%d R=%g c=[%g %g %g])", dim, radius,
                    center.x(), center.y(), center.z());
      break;
    case DomainKind::Disc:
      std::snprintf(buf, sizeof buf, "disc(R=%g c=[%g %g])", radius, center.x(), center.y());
      break;
    case DomainKind::Shell:
      std::snprintf(buf, sizeof buf, "shell(n=%d r=%g R=%g)", dim, inner_radius, radius);
      break;
    case DomainKind::Cylinder:
      std::snprintf(buf, sizeof buf, "cylinder(R=%g L=%g)", radius, length);
      break;
  }
  return buf;
}

double ball_volume(int n, double R) {
  require(n >= 1, "ball_volume: dimension must be >= 1");
  require(R > 0, "ball_volume: radius must be positive");
  return std::pow(kPi, 0.5 * n) * std::pow(R, n) / std::tgamma(0.5 * n + 1.0);
}

double sphere_area(int n, double R) {
  require(n >= 1, "sphere_area: dimension must be >= 1");
  require(R > 0, "sphere_area: radius must be positive");
  return n * ball_volume(n, R) / R;
}

double shell_volume_ratio(int n, double R) {
  require(n >= 1, "shell_volume_ratio: dimension must be >= 1");
  require(R > 0, "shell_volume_ratio: radius must be positive");
  return std::pow(2.0, n) - 1.0;
}

namespace {

// fraction of the cell centered at p inside the domain, estimated at 8^dim
// sub-cell midpoints, together with the centroid of the covered part
struct CellClip {
  double fraction = 0.0;
  Vec centroid = Vec::Zero();
};

CellClip clip_cell(const Domain& d, const Vec& p, double hx, double hy, double hz) {
  const int sub = 8;
  int inside = 0, total = 0;
  Vec centroid = Vec::Zero();
  const int ksub = d.dim == 2 ? 1 : sub;
  for (int i = 0; i < sub; ++i)
    for (int j = 0; j < sub; ++j)
      for (int k = 0; k < ksub; ++k) {
        Vec q = p;
        q.x() += ((i + 0.5) / sub - 0.5) * hx;
        q.y() += ((j + 0.5) / sub - 0.5) * hy;
        if (d.dim == 3) q.z() += ((k + 0.5) / sub - 0.5) * hz;
        ++total;
        if (d.contains(q)) {
          ++inside;
          centroid += q;
        }
      }
  CellClip c;
  c.fraction = static_cast<double>(inside) / total;
  if (inside > 0) c.centroid = centroid / inside;
  return c;
}

DomainGrid volume_grid(const Domain& d, int res) {
  // bounding box half-width
  double half = d.radius;
  double half_z = d.radius;
  if (d.kind == DomainKind::Cylinder) half_z = 0.5 * d.length;
  const double h = 2.0 * half / res;
  const double hz = 2.0 * half_z / res;

  std::vector<Vec> pts;
  std::vector<double> wts;
  if (d.dim == 2) {
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j) {
        Vec p = d.center;
        p.x() += -half + (i + 0.5) * h;
        p.y() += -half + (j + 0.5) * h;
        const CellClip c = clip_cell(d, p, h, h, 0.0);
        if (c.fraction > 0) {
          pts.push_back(c.fraction < 1.0 ? c.centroid : p);
          wts.push_back(c.fraction * h * h);
        }
      }
  } else {
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j)
        for (int k = 0; k < res; ++k) {
          Vec p = d.center;
          p.x() += -half + (i + 0.5) * h;
          p.y() += -half + (j + 0.5) * h;
          p.z() += -half_z + (k + 0.5) * hz;
          const CellClip c = clip_cell(d, p, h, h, hz);
          if (c.fraction > 0) {
            pts.push_back(c.fraction < 1.0 ? c.centroid : p);
            wts.push_back(c.fraction * h * h * hz);
          }
        }
  }

  DomainGrid g;
  g.points.resize(static_cast<int>(pts.size()), 3);
  g.weights.resize(static_cast<int>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    g.points.row(static_cast<int>(i)) = pts[i].transpose();
    g.weights[static_cast<int>(i)] = wts[i];
  }
  g.measure = MeasureKind::Volume;
  g.cell_size = h;
  return g;
}

DomainGrid sphere_surface_grid(const Domain& d, int res) {
  // latitude-longitude bands, sin(theta)-weighted midpoint rule
  const int n_theta = res;
  const int n_phi = 2 * res;
  const double dth = kPi / n_theta;
  const double dph = 2.0 * kPi / n_phi;
  DomainGrid g;
  g.points.resize(n_theta * n_phi, 3);
  g.weights.resize(n_theta * n_phi);
  int idx = 0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = (i + 0.5) * dth;
    for (int j = 0; j < n_phi; ++j) {
      const double ph = (j + 0.5) * dph;
      g.points.row(idx) = (d.center + d.radius * spherical_to_cartesian(1.0, th, ph)).transpose();
      g.weights[idx] = d.radius * d.radius * std::sin(th) * dth * dph;
      ++idx;
    }
  }
  g.measure = MeasureKind::Surface;
  return g;
}

DomainGrid circle_boundary_grid(const Domain& d, int res) {
  const int n = 4 * res;
  const double dth = 2.0 * kPi / n;
  DomainGrid g;
  g.points.resize(n, 3);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double th = (i + 0.5) * dth;
    Vec p = d.center;
    p.x() += d.radius * std::cos(th);
    p.y() += d.radius * std::sin(th);
    g.points.row(i) = p.transpose();
    g.weights[i] = d.radius * dth;
  }
  g.measure = MeasureKind::Curve;
  return g;
}

DomainGrid cylinder_surface_grid(const Domain& d, int res) {
  // lateral surface only (the flow statements live on r = R)
  const int n_phi = 2 * res;
  const int n_z = res;
  const double dph = 2.0 * kPi / n_phi;
  const double dz = d.length / n_z;
  DomainGrid g;
  g.points.resize(n_phi * n_z, 3);
  g.weights.resize(n_phi * n_z);
  int idx = 0;
  for (int i = 0; i < n_phi; ++i) {
    const double ph = (i + 0.5) * dph;
    for (int j = 0; j < n_z; ++j) {
      const double z = -0.5 * d.length + (j + 0.5) * dz;
      g.points.row(idx) = cylindrical_to_cartesian(d.radius, ph, z).transpose();
      g.weights[idx] = d.radius * dph * dz;
      ++idx;
    }
  }
  g.measure = MeasureKind::Surface;
  return g;
}

}  // namespace

DomainGrid build_grid(const Domain& d, MeasureKind measure, int resolution) {
  require(resolution >= 8, "build_grid: resolution must be >= 8");
  DomainGrid g;
  if (measure == MeasureKind::Volume) {
    if (d.kind == DomainKind::Ball && d.dim == 1)
      throw std::invalid_argument("build_grid: unsupported geometry/measure pair");
    g = volume_grid(d, resolution);
    switch (d.kind) {
      case DomainKind::Ball:
        g.exact_measure = ball_volume(d.dim, d.radius);
        break;
      case DomainKind::Disc:
        g.exact_measure = kPi * d.radius * d.radius;
        break;
      case DomainKind::Shell:
        g.exact_measure = ball_volume(d.dim, d.radius) - ball_volume(d.dim, d.inner_radius);
        break;
      case DomainKind::Cylinder:
        g.exact_measure = kPi * d.radius * d.radius * d.length;
        break;
    }
  } else if (measure == MeasureKind::Surface || measure == MeasureKind::Curve) {
    switch (d.kind) {
      case DomainKind::Ball:
        if (d.dim == 3) {
          g = sphere_surface_grid(d, resolution);
          g.exact_measure = sphere_area(3, d.radius);
        } else if (d.dim == 2) {
          g = circle_boundary_grid(d, resolution);
          g.exact_measure = 2.0 * kPi * d.radius;
        } else {
          throw std::invalid_argument("build_grid: unsupported geometry/measure pair");
        }
        break;
      case DomainKind::Disc:
        g = circle_boundary_grid(d, resolution);
        g.exact_measure = 2.0 * kPi * d.radius;
        break;
      case DomainKind::Cylinder:
        g = cylinder_surface_grid(d, resolution);
        g.exact_measure = 2.0 * kPi * d.radius * d.length;
        break;
      default:
        throw std::invalid_argument("build_grid: unsupported geometry/measure pair");
    }
  }
  g.descriptor = d.describe();
  return g;
}

Curve Curve::segment(const Vec& a, const Vec& b, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("curve: need at least 2 samples");
  Curve c;
  c.samples.resize(n_samples, 3);
  for (int i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) / (n_samples - 1);
    c.samples.row(i) = ((1.0 - t) * a + t * b).transpose();
  }
  c.closed = false;
  return c;
}

Curve Curve::circle(double R, const Vec& c0, int n_samples) {
  if (n_samples < 4) throw std::invalid_argument("curve: need at least 4 samples");
  Curve c;
  c.samples.resize(n_samples + 1, 3);
  for (int i = 0; i <= n_samples; ++i) {
    const double th = 2.0 * kPi * i / n_samples;
    Vec p = c0;
    p.x() += R * std::cos(th);
    p.y() += R * std::sin(th);
    c.samples.row(i) = p.transpose();
  }
  c.samples.row(n_samples) = c.samples.row(0);  // closed => endpoints coincide
  c.closed = true;
  return c;
}

Vec spherical_to_cartesian(double r, double theta, double phi) {
  return {r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
          r * std::cos(theta)};
}

Vec cylindrical_to_cartesian(double r, double phi, double z) {
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Vec polar_to_cartesian(double r, double theta) {
  return {r * std::cos(theta), r * std::sin(theta), 0.0};
}

void cartesian_to_spherical(const Vec& x, double& r, double& theta, double& phi) {
  r = x.norm();
  theta = r == 0 ? 0.0 : std::acos(std::clamp(x.z() / r, -1.0, 1.0));
  phi = std::atan2(x.y(), x.x());
}

void cartesian_to_cylindrical(const Vec& x, double& r, double& phi, double& z) {
  r = x.head<2>().norm();
  phi = std::atan2(x.y(), x.x());
  z = x.z();
}

void cartesian_to_polar(const Vec& x, double& r, double& theta) {
  r = x.head<2>().norm();
  theta = std::atan2(x.y(), x.x());
}

void write_csv(const DomainGrid& grid, std::ostream& os) {
  os.precision(17);
  os << "# " << grid.descriptor << "\n";
  os << "x,y,z,weight\n";
  for (int i = 0; i < grid.size(); ++i) {
    os << grid.points(i, 0) << ',' << grid.points(i, 1) << ',' << grid.points(i, 2) << ','
       << grid.weights[i] << '\n';
  }
}

}  // namespace stochpot::geom
