#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class BoundaryKind { dirichlet, neumann, wall, periodic };

/// Predicate rule classifying boundary facets by their midpoint.
struct BoundaryTagRule {
  std::string name;
  BoundaryKind kind = BoundaryKind::dirichlet;
  std::function<bool(const Vec2&)> matches;
};

/// Identification of two boundary tags as one periodic facet set.
/// Facets of `tag_a` translated by `period` must land on facets of `tag_b`.
struct PeriodicRule {
  std::string tag_a;
  std::string tag_b;
  Vec2 period;
};

/// A facet of the triangulation. Boundary facets have one incident cell
/// side, interior facets two. Periodically paired boundary facets are stored
/// as a single logical facet with two (translated) physical sides.
struct Facet {
  std::array<int, 2> cell{-1, -1};
  std::array<int, 2> local{-1, -1};       // local edge index within each cell
  std::array<bool, 2> forward{true, true}; // local traversal matches canonical direction
  int tag = -1;                            // index into Mesh::tag_names, -1 if interior
  bool periodic = false;
  bool interior() const { return cell[1] >= 0; }
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> cells;
  std::vector<Facet> facets;
  std::vector<std::array<int, 3>> cell_facets; // per cell: facet id per local edge
  std::vector<std::string> tag_names;
  std::map<std::string, BoundaryKind> tags;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_facets() const { return static_cast<int>(facets.size()); }
  int n_boundary_facets() const;
  int n_interior_facets() const { return n_facets() - n_boundary_facets(); }

  int tag_index(const std::string& name) const;

  // geometry
  double cell_area(int cell) const;
  Vec2 cell_centroid(int cell) const;
  double cell_perimeter(int cell) const;
  /// Area/Perimeter; the incircle-related scale used by the penalty terms.
  double element_length_scale(int cell) const;
  /// (unit outward normal, length, endpoints in local traversal order)
  struct FacetGeometry {
    Vec2 normal;
    double length;
    Vec2 a, b;
  };
  FacetGeometry facet_geometry(int cell, int local_facet) const;
  double domain_diameter() const;
  /// Which side of facet f is cell c on (0 or 1)?
  int facet_side(int f, int cell) const;
};

/// Build the facet tables and classify the boundary. Cells are reoriented to
/// positive signed area. Throws on dangling node references, duplicate cells,
/// non-manifold facets, and unclassifiable boundary facets.
Mesh build_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> cells,
                const std::vector<BoundaryTagRule>& rules,
                const std::vector<PeriodicRule>& periodic = {});

/// Structured rectangle [x0,x1]x[y0,y1], nx-by-ny quads split into triangles.
/// grade_y > 1 geometrically stretches row heights away from y0.
enum class SplitPattern { diagonal, crossed };
Mesh structured_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                          const std::vector<BoundaryTagRule>& rules,
                          SplitPattern split = SplitPattern::diagonal,
                          double grade_y = 1.0,
                          const std::vector<PeriodicRule>& periodic = {});

/// Axis-aligned boundary rules for a rectangle, tags left/right/bottom/top.
std::vector<BoundaryTagRule> box_rules(double x0, double y0, double x1, double y1,
                                       BoundaryKind left, BoundaryKind right,
                                       BoundaryKind bottom, BoundaryKind top);

/// Rules tagging every side of [x0,x1]x[y0,y1] as Dirichlet.
std::vector<BoundaryTagRule> all_dirichlet_box(double x0, double y0, double x1, double y1);

// plain ASCII mesh file: "nodes N cells M bfacets K", then N "x y" lines,
// M "i j k" lines, K "cell localfacet tagname" lines
Mesh read_mesh_file(const std::string& path,
                    const std::map<std::string, BoundaryKind>& tag_kinds,
                    const std::vector<PeriodicRule>& periodic = {});
void write_mesh_file(const Mesh& mesh, const std::string& path);

} // namespace hdg
