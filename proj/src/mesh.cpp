#include "plate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace plate {

namespace {

int checked_division(double side, double h, const char* side_name) {
  const double ratio = side / h;
  const double n = std::round(ratio);
  if (n < 2.0 || std::abs(side - n * h) > 1e-9 * side) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "spacing h=" << h << " does not divide side " << side_name << "=" << side
        << " into at least two cells";
    throw ConfigError(msg.str());
  }
  return int(n);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

Domain Domain::interval(double length) {
  require_positive(length, "interval length L");
  return {DomainKind::interval, length, 0.0};
}

Domain Domain::rectangle(double width, double height) {
  require_positive(width, "rectangle width Lx");
  require_positive(height, "rectangle height Ly");
  return {DomainKind::rectangle, width, height};
}

Domain Domain::disk(double radius) {
  require_positive(radius, "disk radius R");
  return {DomainKind::disk_radial, radius, 0.0};
}

double Domain::measure() const {
  switch (kind) {
    case DomainKind::interval: return lx;
    case DomainKind::rectangle: return lx * ly;
    case DomainKind::disk_radial: return std::numbers::pi * lx * lx;
  }
  return 0.0;
}

std::string Domain::name() const {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::rectangle: return lx == ly ? "square" : "rect";
    case DomainKind::disk_radial: return "disk";
  }
  return "?";
}

Grid::Grid(Domain domain, double h) : domain_(domain), h_(h) {
  require_positive(h, "spacing h");
  switch (domain_.kind) {
    case DomainKind::interval: nx_ = checked_division(domain_.lx, h, "L"); break;
    case DomainKind::rectangle:
      nx_ = checked_division(domain_.lx, h, "Lx");
      ny_ = checked_division(domain_.ly, h, "Ly");
      break;
    case DomainKind::disk_radial: nx_ = checked_division(domain_.lx, h, "R"); break;
  }

  const Index n = node_count();
  unknown_.assign(std::size_t(n), -1);
  for (Index id = 0; id < n; ++id) {
    const auto [i, j] = node(id);
    bool boundary = false;
    switch (domain_.kind) {
      case DomainKind::interval: boundary = i == 0 || i == nx_; break;
      case DomainKind::rectangle: boundary = i == 0 || i == nx_ || j == 0 || j == ny_; break;
      case DomainKind::disk_radial: boundary = i == nx_; break;
    }
    if (boundary) {
      boundary_.push_back(id);
    } else {
      unknown_[std::size_t(id)] = Index(interior_.size());
      interior_.push_back(id);
    }
  }

  // Two ghost layers outside the boundary.
  if (domain_.is_planar()) {
    for (int j = -2; j <= ny_ + 2; ++j)
      for (int i = -2; i <= nx_ + 2; ++i)
        if (!contains(i, j)) ghosts_.push_back({i, j});
  } else {
    if (domain_.kind == DomainKind::interval) ghosts_ = {{-2, 0}, {-1, 0}};
    ghosts_.push_back({nx_ + 1, 0});
    ghosts_.push_back({nx_ + 2, 0});
  }

  weights_.resize(n);
  const double pi = std::numbers::pi;
  for (Index id = 0; id < n; ++id) {
    const auto [i, j] = node(id);
    double w = 0.0;
    switch (domain_.kind) {
      case DomainKind::interval: w = (i == 0 || i == nx_) ? 0.5 * h : h; break;
      case DomainKind::rectangle:
        w = ((i == 0 || i == nx_) ? 0.5 * h : h) * ((j == 0 || j == ny_) ? 0.5 * h : h);
        break;
      case DomainKind::disk_radial: {
        // Annular control volumes; they tile the disk exactly.
        const double r = i * h;
        if (i == 0) {
          w = pi * 0.25 * h * h;
        } else if (i == nx_) {
          w = pi * (r * r - (r - 0.5 * h) * (r - 0.5 * h));
        } else {
          w = 2.0 * pi * r * h;
        }
        break;
      }
    }
    weights_[id] = w;
  }
}

Eigen::Vector2d Grid::position(Index id) const {
  const auto [i, j] = node(id);
  // Snap the far side exactly onto the side length.
  const double x = i == nx_ ? domain_.lx : i * h_;
  const double y = domain_.is_planar() && j == ny_ ? domain_.ly : j * h_;
  return {x, y};
}

bool Grid::is_corner(Index id) const {
  if (!domain_.is_planar()) return false;
  const auto [i, j] = node(id);
  return (i == 0 || i == nx_) && (j == 0 || j == ny_);
}

GridPtr build_grid(const Domain& domain, double h) { return std::make_shared<const Grid>(domain, h); }

double distance_to_boundary(const Grid& grid, Index node) {
  const Eigen::Vector2d p = grid.position(node);
  const Domain& d = grid.domain();
  switch (d.kind) {
    case DomainKind::interval: return std::max(0.0, std::min(p.x(), d.lx - p.x()));
    case DomainKind::rectangle:
      return std::max(0.0, std::min({p.x(), d.lx - p.x(), p.y(), d.ly - p.y()}));
    case DomainKind::disk_radial: return std::max(0.0, d.lx - p.x());
  }
  return 0.0;
}

Field Field::zeros(GridPtr grid) {
  Field f{std::move(grid), {}};
  f.values = Vector::Zero(f.grid->node_count());
  return f;
}

Field Field::from_unknowns(GridPtr grid, const Vector& unknowns) {
  Field f = zeros(std::move(grid));
  const auto& interior = f.grid->interior();
  if (unknowns.size() != Index(interior.size()))
    throw ConfigError("unknown vector does not match the grid");
  for (std::size_t k = 0; k < interior.size(); ++k) f.values[interior[k]] = unknowns[Index(k)];
  return f;
}

Vector Field::unknowns() const {
  const auto& interior = grid->interior();
  Vector out(Index(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) out[Index(k)] = values[interior[k]];
  return out;
}

double discrete_integral(const Field& u) { return u.grid->quadrature_weights().dot(u.values); }

double h1_seminorm(const Field& u) {
  const Grid& g = *u.grid;
  const double h = g.h();
  double sum = 0.0;
  switch (g.domain().kind) {
    case DomainKind::interval:
      for (int i = 0; i < g.nx(); ++i) {
        const double d = (u.values[i + 1] - u.values[i]) / h;
        sum += d * d * h;
      }
      break;
    case DomainKind::disk_radial:
      for (int i = 0; i < g.nx(); ++i) {
        const double d = (u.values[i + 1] - u.values[i]) / h;
        sum += d * d * 2.0 * std::numbers::pi * (i + 0.5) * h * h;
      }
      break;
    case DomainKind::rectangle:
      for (int j = 0; j <= g.ny(); ++j) {
        const double wy = (j == 0 || j == g.ny()) ? 0.5 * h : h;
        for (int i = 0; i < g.nx(); ++i) {
          const double d = (u.values[g.node_id(i + 1, j)] - u.values[g.node_id(i, j)]) / h;
          sum += d * d * h * wy;
        }
      }
      for (int i = 0; i <= g.nx(); ++i) {
        const double wx = (i == 0 || i == g.nx()) ? 0.5 * h : h;
        for (int j = 0; j < g.ny(); ++j) {
          const double d = (u.values[g.node_id(i, j + 1)] - u.values[g.node_id(i, j)]) / h;
          sum += d * d * h * wx;
        }
      }
      break;
  }
  return std::sqrt(sum);
}

Norms discrete_norms(const Field& u) {
  const Vector& w = u.grid->quadrature_weights();
  Norms n;
  n.l1 = w.dot(u.values.cwiseAbs());
  n.l2 = std::sqrt(w.dot(u.values.cwiseAbs2()));
  n.linf = u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0;
  n.h1_seminorm = h1_seminorm(u);
  return n;
}

void validate_forcing(const Forcing& f) {
  std::visit(
      [](const auto& load) {
        using T = std::decay_t<decltype(load)>;
        if constexpr (std::is_same_v<T, ConstantLoad>) {
          if (!(load.amp >= 0.0)) throw ConfigError("load amplitude must be >= 0");
        } else if constexpr (std::is_same_v<T, BallLoad>) {
          if (!(load.amp >= 0.0)) throw ConfigError("load amplitude must be >= 0");
          if (!(load.radius > 0.0)) throw ConfigError("ball radius must be positive");
        } else if constexpr (std::is_same_v<T, PointLoad>) {
          if (!(load.mass >= 0.0)) throw ConfigError("point mass must be >= 0");
        } else {
          if (!load.samples.grid) throw ConfigError("sampled load has no grid");
          if (!load.samples.all_finite()) throw ConfigError("sampled load is not finite");
          if (load.samples.values.size() && load.samples.values.minCoeff() < 0.0)
            throw ConfigError("sampled load must be >= 0");
        }
      },
      f);
}

Field sample_forcing(const GridPtr& grid, const Forcing& f) {
  validate_forcing(f);
  Field out = Field::zeros(grid);
  std::visit(
      [&](const auto& load) {
        using T = std::decay_t<decltype(load)>;
        if constexpr (std::is_same_v<T, ConstantLoad>) {
          out.values.setConstant(load.amp);
        } else if constexpr (std::is_same_v<T, BallLoad>) {
          Eigen::Vector2d c = load.center;
          if (grid->domain().is_radial()) {
            if (c.norm() != 0.0) throw ConfigError("radial ball load must be centred at the origin");
          }
          if (!grid->domain().is_planar()) c.y() = 0.0;
          // Small tolerance so nodes exactly on the sphere count as inside.
          const double r2 = load.radius * load.radius * (1.0 + 1e-12);
          for (Index k = 0; k < out.values.size(); ++k)
            out.values[k] = (grid->position(k) - c).squaredNorm() <= r2 ? load.amp : 0.0;
        } else if constexpr (std::is_same_v<T, PointLoad>) {
          Index node = 0;
          if (load.node) {
            node = *load.node;
          } else {
            double best = std::numeric_limits<double>::infinity();
            for (Index k = 0; k < grid->node_count(); ++k) {
              const double d = (grid->position(k) - load.position).squaredNorm();
              if (d < best) {
                best = d;
                node = k;
              }
            }
          }
          if (node < 0 || node >= grid->node_count()) throw ConfigError("point load node out of range");
          out.values[node] = load.mass / grid->quadrature_weights()[node];
        } else {
          if (load.samples.grid->node_count() != grid->node_count() ||
              load.samples.grid->h() != grid->h())
            throw ConfigError("sampled load lives on a different grid");
          out.values = load.samples.values;
        }
      },
      f);
  return out;
}

double mass_ratio(const Field& f) {
  const double sup = f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  if (!(sup > 0.0)) throw ConfigError("load vanishes identically; mass ratio tau is undefined");
  return discrete_integral(f) / sup;
}

void write_field_csv(std::ostream& os, const Field& u) {
  const Grid& g = *u.grid;
  const bool planar = g.domain().is_planar();
  os << (planar ? "x,y,u\n" : "x,u\n");
  char buf[96];
  for (Index k = 0; k < u.values.size(); ++k) {
    const Eigen::Vector2d p = g.position(k);
    if (planar) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x(), p.y(), u.values[k]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x(), u.values[k]);
    }
    os << buf;
  }
}

Field read_field_csv(std::istream& is, GridPtr grid) {
  const bool planar = grid->domain().is_planar();
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty field CSV");
  Field out = Field::zeros(grid);
  Index k = 0;
  const double tol = 1e-6 * grid->h();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (k >= grid->node_count()) throw ConfigError("field CSV has more rows than grid nodes");
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
    if (cols.size() != (planar ? 3u : 2u)) throw ConfigError("field CSV row has wrong column count");
    const Eigen::Vector2d p = grid->position(k);
    if (std::abs(cols[0] - p.x()) > tol || (planar && std::abs(cols[1] - p.y()) > tol))
      throw ConfigError("field CSV coordinates do not match the grid");
    out.values[k++] = cols.back();
  }
  if (k != grid->node_count()) throw ConfigError("field CSV has fewer rows than grid nodes");
  return out;
}

}  // namespace plate
