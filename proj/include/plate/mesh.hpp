#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace plate {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

/// Raised for inputs that violate a precondition (bad spacing, negative load, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DomainKind { interval, rectangle, disk_radial };

/// Interval (0, L), rectangle (0, Lx) x (0, Ly), or a disk of radius R on
/// which every quantity is a function of the radius only.
struct Domain {
  DomainKind kind = DomainKind::interval;
  double lx = 1.0;  // interval length, rectangle width or disk radius
  double ly = 0.0;  // rectangle height, unused otherwise

  static Domain interval(double length);
  static Domain rectangle(double width, double height);
  static Domain square(double side) { return rectangle(side, side); }
  static Domain disk(double radius);

  /// Lebesgue measure of the physical domain (length, area, pi R^2).
  [[nodiscard]] double measure() const;
  [[nodiscard]] bool is_radial() const { return kind == DomainKind::disk_radial; }
  [[nodiscard]] bool is_planar() const { return kind == DomainKind::rectangle; }
  [[nodiscard]] std::string name() const;
};

struct NodeIJ {
  int i = 0;
  int j = 0;
};

/// Uniform structured grid. Nodes are numbered j-major: id = j * (nx + 1) + i.
/// For the disk, i indexes the radius r_i = i h and the origin i = 0 is an
/// interior node. Interior nodes carry the unknowns, in increasing node id.
class Grid {
 public:
  Grid(Domain domain, double h);

  [[nodiscard]] const Domain& domain() const { return domain_; }
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] int dimension() const { return domain_.is_planar() ? 2 : 1; }

  [[nodiscard]] Index node_count() const { return Index(nx_ + 1) * (ny_ + 1); }
  [[nodiscard]] Index node_id(int i, int j = 0) const { return Index(j) * (nx_ + 1) + i; }
  [[nodiscard]] NodeIJ node(Index id) const {
    return {int(id % (nx_ + 1)), int(id / (nx_ + 1))};
  }
  [[nodiscard]] bool contains(int i, int j = 0) const {
    return i >= 0 && i <= nx_ && j >= 0 && j <= ny_;
  }
  /// (x, y) for Cartesian grids, (r, 0) for the disk.
  [[nodiscard]] Eigen::Vector2d position(Index id) const;
  [[nodiscard]] bool is_boundary(Index id) const { return unknown_[id] < 0; }
  /// Rectangle corner nodes; never true for the other kinds.
  [[nodiscard]] bool is_corner(Index id) const;

  [[nodiscard]] const std::vector<Index>& interior() const { return interior_; }
  [[nodiscard]] const std::vector<Index>& boundary() const { return boundary_; }
  /// Two-layer ghost ring outside the boundary. Ghost values are never stored:
  /// the clamped closure reflects them onto interior nodes.
  [[nodiscard]] const std::vector<NodeIJ>& ghosts() const { return ghosts_; }
  [[nodiscard]] Index unknowns() const { return Index(interior_.size()); }
  /// Position of `node` in the unknown vector, or -1 for boundary nodes.
  [[nodiscard]] Index unknown_of(Index node) const { return unknown_[node]; }

  /// Trapezoid weights per node (with the 2 pi r Jacobian for the disk).
  [[nodiscard]] const Vector& quadrature_weights() const { return weights_; }

 private:
  Domain domain_;
  double h_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<Index> interior_;
  std::vector<Index> boundary_;
  std::vector<NodeIJ> ghosts_;
  std::vector<Index> unknown_;
  Vector weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws ConfigError naming the side that h does not divide.
GridPtr build_grid(const Domain& domain, double h);

/// Exact Euclidean distance from a node to the boundary.
double distance_to_boundary(const Grid& grid, Index node);

/// Real-valued grid function stored at every node (boundary included).
struct Field {
  GridPtr grid;
  Vector values;

  static Field zeros(GridPtr grid);
  /// Scatter an unknown vector onto the nodes; boundary nodes are set to 0.
  static Field from_unknowns(GridPtr grid, const Vector& unknowns);
  template <typename Fn>
  static Field sample(GridPtr grid, Fn&& fn) {
    Field f = zeros(grid);
    for (Index k = 0; k < f.values.size(); ++k) f.values[k] = fn(grid->position(k));
    return f;
  }

  [[nodiscard]] Vector unknowns() const;
  [[nodiscard]] bool all_finite() const { return values.allFinite(); }
  [[nodiscard]] const Grid& mesh() const { return *grid; }
};

double discrete_integral(const Field& u);

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double h1_seminorm = 0.0;
};

Norms discrete_norms(const Field& u);

/// Forward-difference H1 seminorm, trapezoid-weighted across the edge direction.
double h1_seminorm(const Field& u);

// Loads. Amplitudes must be non-negative.
struct ConstantLoad {
  double amp = 1.0;
};
struct BallLoad {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // 1D uses x only, disk requires 0
  double radius = 0.1;
  double amp = 1.0;
};
/// Mass concentrated on a single node: value mass / (cell measure) there.
/// Without an explicit node id the node nearest `position` is used.
struct PointLoad {
  std::optional<Index> node;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double mass = 1.0;
};
struct SampledLoad {
  Field samples;
};

using Forcing = std::variant<ConstantLoad, BallLoad, PointLoad, SampledLoad>;

void validate_forcing(const Forcing& f);
/// Nodal samples of the load at every node.
Field sample_forcing(const GridPtr& grid, const Forcing& f);
/// tau = (integral of f) / sup |f|. Throws ConfigError when f vanishes identically.
double mass_ratio(const Field& f);

/// CSV with header `x[,y],u`, j-major rows, 17 significant digits.
void write_field_csv(std::ostream& os, const Field& u);
Field read_field_csv(std::istream& is, GridPtr grid);

}  // namespace plate
