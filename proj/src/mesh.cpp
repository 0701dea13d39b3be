#include "hdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hdg {

namespace {

// local edge i of a cell runs from vertex i to vertex (i+1)%3
std::array<int, 2> edge_nodes(const std::array<int, 3>& cell, int local) {
  return {cell[local], cell[(local + 1) % 3]};
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Vec2 facet_midpoint(const Mesh& m, int cell, int local) {
  auto en = edge_nodes(m.cells[cell], local);
  return 0.5 * (m.nodes[en[0]] + m.nodes[en[1]]);
}

} // namespace

int Mesh::n_boundary_facets() const {
  int n = 0;
  for (const auto& f : facets)
    if (!f.interior()) ++n;
  return n;
}

int Mesh::tag_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(tag_names.size()); ++i)
    if (tag_names[i] == name) return i;
  throw std::runtime_error("mesh: unknown boundary tag '" + name + "'");
}

double Mesh::cell_area(int cell) const {
  const auto& c = cells[cell];
  return signed_area(nodes[c[0]], nodes[c[1]], nodes[c[2]]);
}

Vec2 Mesh::cell_centroid(int cell) const {
  const auto& c = cells[cell];
  return (nodes[c[0]] + nodes[c[1]] + nodes[c[2]]) / 3.0;
}

double Mesh::cell_perimeter(int cell) const {
  double p = 0;
  for (int i = 0; i < 3; ++i) {
    auto en = edge_nodes(cells[cell], i);
    p += (nodes[en[1]] - nodes[en[0]]).norm();
  }
  return p;
}

double Mesh::element_length_scale(int cell) const {
  return cell_area(cell) / cell_perimeter(cell);
}

Mesh::FacetGeometry Mesh::facet_geometry(int cell, int local_facet) const {
  auto en = edge_nodes(cells[cell], local_facet);
  FacetGeometry g;
  g.a = nodes[en[0]];
  g.b = nodes[en[1]];
  Vec2 e = g.b - g.a;
  g.length = e.norm();
  // cells are CCW, so (e.y, -e.x) points outward
  g.normal = Vec2(e.y(), -e.x()) / g.length;
  return g;
}

double Mesh::domain_diameter() const {
  Vec2 lo = nodes.front(), hi = nodes.front();
  for (const auto& p : nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

int Mesh::facet_side(int f, int cell) const {
  const Facet& fa = facets[f];
  if (fa.cell[0] == cell) return 0;
  if (fa.cell[1] == cell) return 1;
  throw std::runtime_error("mesh: cell not incident to facet");
}

namespace {

// Shared topology construction; boundary facet tags are resolved by `classify`,
// which returns the tag index for a (cell, local) boundary side.
Mesh build_mesh_impl(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> cells,
                     std::vector<std::string> tag_names,
                     std::map<std::string, BoundaryKind> tag_kinds,
                     const std::function<int(const Mesh&, int, int)>& classify,
                     const std::vector<PeriodicRule>& periodic,
                     std::vector<char>* flipped_out = nullptr) {
  Mesh m;
  m.nodes = std::move(nodes);
  m.cells = std::move(cells);
  m.tag_names = std::move(tag_names);
  m.tags = std::move(tag_kinds);

  const int nn = static_cast<int>(m.nodes.size());
  std::set<std::array<int, 3>> seen;
  std::vector<char> flipped(m.cells.size(), 0);
  for (size_t e = 0; e < m.cells.size(); ++e) {
    auto& c = m.cells[e];
    for (int v : c)
      if (v < 0 || v >= nn) throw std::runtime_error("mesh: dangling node reference");
    auto key = c;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) throw std::runtime_error("mesh: duplicate cell");
    if (signed_area(m.nodes[c[0]], m.nodes[c[1]], m.nodes[c[2]]) < 0) {
      std::swap(c[1], c[2]);
      flipped[e] = 1;
    }
    if (signed_area(m.nodes[c[0]], m.nodes[c[1]], m.nodes[c[2]]) <= 0)
      throw std::runtime_error("mesh: degenerate cell");
  }
  if (flipped_out) *flipped_out = flipped;

  // facet table keyed by sorted node pair
  std::map<std::array<int, 2>, int> facet_of;
  m.cell_facets.assign(m.cells.size(), {-1, -1, -1});
  for (int e = 0; e < m.n_cells(); ++e) {
    for (int i = 0; i < 3; ++i) {
      auto en = edge_nodes(m.cells[e], i);
      std::array<int, 2> key{std::min(en[0], en[1]), std::max(en[0], en[1])};
      auto it = facet_of.find(key);
      if (it == facet_of.end()) {
        Facet f;
        f.cell[0] = e;
        f.local[0] = i;
        f.forward[0] = (en[0] == key[0]); // canonical: low node id -> high node id
        m.facets.push_back(f);
        facet_of[key] = m.n_facets() - 1;
        m.cell_facets[e][i] = m.n_facets() - 1;
      } else {
        Facet& f = m.facets[it->second];
        if (f.cell[1] >= 0) throw std::runtime_error("mesh: non-manifold facet (shared by >2 cells)");
        f.cell[1] = e;
        f.local[1] = i;
        f.forward[1] = (en[0] == key[0]);
        m.cell_facets[e][i] = it->second;
      }
    }
  }

  for (int f = 0; f < m.n_facets(); ++f) {
    Facet& fa = m.facets[f];
    if (!fa.interior()) fa.tag = classify(m, fa.cell[0], fa.local[0]);
  }

  // periodic identification: merge paired boundary facets into one logical facet
  for (const auto& rule : periodic) {
    const int ta = m.tag_index(rule.tag_a), tb = m.tag_index(rule.tag_b);
    const double tol = 1e-9 * rule.period.norm();
    std::vector<int> a_set, b_set;
    for (int f = 0; f < m.n_facets(); ++f) {
      if (m.facets[f].interior()) continue;
      if (m.facets[f].tag == ta) a_set.push_back(f);
      if (m.facets[f].tag == tb) b_set.push_back(f);
    }
    if (a_set.size() != b_set.size())
      throw std::runtime_error("mesh: periodic tag sets differ in size");
    std::vector<int> dead;
    for (int fa : a_set) {
      Vec2 mid_a = facet_midpoint(m, m.facets[fa].cell[0], m.facets[fa].local[0]);
      int match = -1;
      for (int fb : b_set) {
        Vec2 mid_b = facet_midpoint(m, m.facets[fb].cell[0], m.facets[fb].local[0]);
        if ((mid_a + rule.period - mid_b).norm() < tol) {
          match = fb;
          break;
        }
      }
      if (match < 0) throw std::runtime_error("mesh: unmatched periodic facet");
      Facet& A = m.facets[fa];
      const Facet& B = m.facets[match];
      auto ga = m.facet_geometry(A.cell[0], A.local[0]);
      auto gb = m.facet_geometry(B.cell[0], B.local[0]);
      if (std::abs(ga.length - gb.length) > 1e-12 * std::max(ga.length, 1.0))
        throw std::runtime_error("mesh: periodic facet pair has mismatched length");
      A.cell[1] = B.cell[0];
      A.local[1] = B.local[0];
      // canonical direction on side 1: local traversal start must map to the
      // canonical start of side 0 under translation by `period`
      Vec2 start_a = A.forward[0] ? ga.a : ga.b;
      A.forward[1] = ((start_a + rule.period) - gb.a).norm() < tol;
      A.periodic = true;
      A.tag = -1;
      dead.push_back(match);
    }
    // remove absorbed facets
    std::sort(dead.begin(), dead.end());
    std::vector<int> remap(m.n_facets());
    int keep = 0;
    for (int f = 0; f < m.n_facets(); ++f) {
      if (std::binary_search(dead.begin(), dead.end(), f)) {
        remap[f] = -1;
        continue;
      }
      remap[f] = keep;
      if (keep != f) m.facets[keep] = m.facets[f];
      ++keep;
    }
    m.facets.resize(keep);
    for (int e = 0; e < m.n_cells(); ++e)
      for (int i = 0; i < 3; ++i) {
        int& cf = m.cell_facets[e][i];
        if (remap[cf] < 0) {
          // this side was absorbed; find the surviving logical facet
          for (int f = 0; f < m.n_facets(); ++f)
            if ((m.facets[f].cell[0] == e && m.facets[f].local[0] == i) ||
                (m.facets[f].cell[1] == e && m.facets[f].local[1] == i)) {
              cf = f;
              break;
            }
        } else {
          cf = remap[cf];
        }
      }
  }

  return m;
}

} // namespace

Mesh build_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> cells,
                const std::vector<BoundaryTagRule>& rules,
                const std::vector<PeriodicRule>& periodic) {
  std::vector<std::string> names;
  std::map<std::string, BoundaryKind> kinds;
  for (const auto& r : rules) {
    names.push_back(r.name);
    kinds[r.name] = r.kind;
  }
  auto classify = [&rules](const Mesh& m, int cell, int local) -> int {
    auto en = edge_nodes(m.cells[cell], local);
    Vec2 mid = 0.5 * (m.nodes[en[0]] + m.nodes[en[1]]);
    for (int i = 0; i < static_cast<int>(rules.size()); ++i)
      if (rules[i].matches(mid)) return i;
    std::ostringstream os;
    os << "mesh: boundary facet at (" << mid.x() << ", " << mid.y() << ") matches no tag rule";
    throw std::runtime_error(os.str());
  };
  return build_mesh_impl(std::move(nodes), std::move(cells), std::move(names), std::move(kinds),
                         classify, periodic);
}

Mesh structured_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                          const std::vector<BoundaryTagRule>& rules, SplitPattern split,
                          double grade_y, const std::vector<PeriodicRule>& periodic) {
  if (nx < 1 || ny < 1) throw std::runtime_error("mesh: nx, ny must be >= 1");
  // row heights: geometric progression with ratio grade_y, smallest at y0
  std::vector<double> yc(ny + 1);
  yc[0] = y0;
  if (std::abs(grade_y - 1.0) < 1e-14) {
    for (int j = 1; j <= ny; ++j) yc[j] = y0 + (y1 - y0) * j / ny;
  } else {
    const double h0 = (y1 - y0) * (grade_y - 1.0) / (std::pow(grade_y, ny) - 1.0);
    double h = h0;
    for (int j = 1; j <= ny; ++j) {
      yc[j] = yc[j - 1] + h;
      h *= grade_y;
    }
    yc[ny] = y1;
  }

  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> cells;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.emplace_back(x0 + (x1 - x0) * i / nx, yc[j]);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (split == SplitPattern::diagonal) {
        cells.push_back({a, b, c});
        cells.push_back({a, c, d});
      } else {
        int ctr = static_cast<int>(nodes.size());
        nodes.push_back(0.25 * (nodes[a] + nodes[b] + nodes[c] + nodes[d]));
        cells.push_back({a, b, ctr});
        cells.push_back({b, c, ctr});
        cells.push_back({c, d, ctr});
        cells.push_back({d, a, ctr});
      }
    }
  return build_mesh(std::move(nodes), std::move(cells), rules, periodic);
}

std::vector<BoundaryTagRule> box_rules(double x0, double y0, double x1, double y1,
                                       BoundaryKind left, BoundaryKind right, BoundaryKind bottom,
                                       BoundaryKind top) {
  const double tx = 1e-10 * (x1 - x0), ty = 1e-10 * (y1 - y0);
  return {
      {"left", left, [x0, tx](const Vec2& p) { return std::abs(p.x() - x0) < tx; }},
      {"right", right, [x1, tx](const Vec2& p) { return std::abs(p.x() - x1) < tx; }},
      {"bottom", bottom, [y0, ty](const Vec2& p) { return std::abs(p.y() - y0) < ty; }},
      {"top", top, [y1, ty](const Vec2& p) { return std::abs(p.y() - y1) < ty; }},
  };
}

std::vector<BoundaryTagRule> all_dirichlet_box(double x0, double y0, double x1, double y1) {
  return box_rules(x0, y0, x1, y1, BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                   BoundaryKind::dirichlet, BoundaryKind::dirichlet);
}

Mesh read_mesh_file(const std::string& path, const std::map<std::string, BoundaryKind>& tag_kinds,
                    const std::vector<PeriodicRule>& periodic) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open '" + path + "'");
  std::string kw;
  int nn, nc, nb;
  std::string kw2, kw3;
  in >> kw >> nn >> kw2 >> nc >> kw3 >> nb;
  if (kw != "nodes" || kw2 != "cells" || kw3 != "bfacets")
    throw std::runtime_error("mesh: bad header in '" + path + "'");
  std::vector<Vec2> nodes(nn);
  for (auto& p : nodes) in >> p.x() >> p.y();
  std::vector<std::array<int, 3>> cells(nc);
  for (auto& c : cells) in >> c[0] >> c[1] >> c[2];
  struct BTag {
    int cell, local;
    std::string name;
  };
  std::vector<BTag> btags(nb);
  std::vector<std::string> names;
  for (auto& b : btags) {
    in >> b.cell >> b.local >> b.name;
    if (std::find(names.begin(), names.end(), b.name) == names.end()) names.push_back(b.name);
  }
  if (!in) throw std::runtime_error("mesh: truncated file '" + path + "'");
  std::map<std::string, BoundaryKind> kinds;
  for (const auto& n : names) {
    auto it = tag_kinds.find(n);
    if (it == tag_kinds.end()) throw std::runtime_error("mesh: no kind declared for tag '" + n + "'");
    kinds[n] = it->second;
  }
  // local edge indices in the file refer to the ordering as written; if a
  // cell is reoriented, post-flip edge i corresponds to pre-flip edge 2-i
  std::vector<char> flipped;
  auto classify = [&btags, &names, &flipped](const Mesh& m, int cell, int local) -> int {
    int file_local = flipped[cell] ? 2 - local : local;
    for (const auto& b : btags) {
      if (b.cell == cell && b.local == file_local)
        return static_cast<int>(std::find(names.begin(), names.end(), b.name) - names.begin());
    }
    (void)m;
    throw std::runtime_error("mesh: boundary facet missing from bfacets list");
  };
  return build_mesh_impl(std::move(nodes), std::move(cells), names, std::move(kinds), classify,
                         periodic, &flipped);
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("mesh: cannot write '" + path + "'");
  out.precision(17);
  out << "nodes " << mesh.nodes.size() << " cells " << mesh.cells.size() << " bfacets "
      << mesh.n_boundary_facets() << "\n";
  for (const auto& p : mesh.nodes) out << p.x() << " " << p.y() << "\n";
  for (const auto& c : mesh.cells) out << c[0] << " " << c[1] << " " << c[2] << "\n";
  for (const auto& f : mesh.facets)
    if (!f.interior()) out << f.cell[0] << " " << f.local[0] << " " << mesh.tag_names[f.tag] << "\n";
}

} // namespace hdg
