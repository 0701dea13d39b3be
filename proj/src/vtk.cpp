#include "hdg/vtk.hpp"

#include <fstream>
#include <stdexcept>

namespace hdg {

void write_vtk(const std::string& path, const SpaceLayout& sp, const FlowState& flow,
               const ScalarState* scalar, double nu, const SAConstants& sa) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  const Mesh& mesh = sp.mesh();
  const int nc = sp.n_cells(), nv = sp.nv();

  Eigen::Matrix<double, 3, 2> corners;
  corners << 0, 0, 1, 0, 0, 1;
  const Basis& bv = sp.cell_basis(FieldKind::velocity);
  const MatrixXd Vv = bv.values(corners);
  const MatrixXd Gv = bv.gradients(corners);
  const MatrixXd Vp = sp.cell_basis(FieldKind::pressure).values(corners);
  const MatrixXd Vw = sp.cell_basis(FieldKind::viscosity).values(corners);

  out.precision(12);
  out << "# vtk DataFile Version 3.0\nhdgrans fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * nc << " double\n";
  for (int c = 0; c < nc; ++c)
    for (int v = 0; v < 3; ++v) {
      const Vec2& x = mesh.nodes[mesh.cells[c][v]];
      out << x.x() << " " << x.y() << " 0\n";
    }
  out << "CELLS " << nc << " " << 4 * nc << "\n";
  for (int c = 0; c < nc; ++c) out << "3 " << 3 * c << " " << 3 * c + 1 << " " << 3 * c + 2 << "\n";
  out << "CELL_TYPES " << nc << "\n";
  for (int c = 0; c < nc; ++c) out << "5\n";

  out << "POINT_DATA " << 3 * nc << "\n";
  out << "VECTORS velocity double\n";
  for (int c = 0; c < nc; ++c) {
    const auto Ux = flow.u.segment(c * 2 * nv, nv), Uy = flow.u.segment(c * 2 * nv + nv, nv);
    for (int v = 0; v < 3; ++v)
      out << Vv.row(v).dot(Ux) << " " << Vv.row(v).dot(Uy) << " 0\n";
  }
  out << "SCALARS pressure double\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nc; ++c)
    for (int v = 0; v < 3; ++v)
      out << Vp.row(v).dot(flow.p.segment(c * sp.np(), sp.np())) << "\n";
  out << "SCALARS divergence double\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nc; ++c) {
    const auto Ux = flow.u.segment(c * 2 * nv, nv), Uy = flow.u.segment(c * 2 * nv + nv, nv);
    const Mat2 jit = sp.geom(c).jac_inv.transpose();
    for (int v = 0; v < 3; ++v) {
      double div = 0;
      for (int i = 0; i < nv; ++i) {
        const Vec2 g = jit * Vec2(Gv(2 * v, i), Gv(2 * v + 1, i));
        div += Ux[i] * g.x() + Uy[i] * g.y();
      }
      out << div << "\n";
    }
  }
  if (scalar) {
    out << "SCALARS nu_tilde double\nLOOKUP_TABLE default\n";
    for (int c = 0; c < nc; ++c)
      for (int v = 0; v < 3; ++v)
        out << Vw.row(v).dot(scalar->phi.segment(c * sp.nw(), sp.nw())) << "\n";
    out << "SCALARS nu_t_ratio double\nLOOKUP_TABLE default\n";
    for (int c = 0; c < nc; ++c)
      for (int v = 0; v < 3; ++v) {
        const double nt = Vw.row(v).dot(scalar->phi.segment(c * sp.nw(), sp.nw()));
        out << sa_eddy_viscosity(Jet1(nt), nu, sa).v / nu << "\n";
      }
  }
}

} // namespace hdg
