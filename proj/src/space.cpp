#include "piolafe/space.hpp"
#include "piolafe/errors.hpp"

#include <algorithm>

namespace piolafe
{

//-----------------------------------------------------------------------------
GlobalSpace::GlobalSpace(std::shared_ptr<const Mesh> mesh,
                         std::shared_ptr<const ReferenceElement> element,
                         bool scaled)
    : _mesh(std::move(mesh)), _element(std::move(element)), _scaled(scaled)
{
  const Mesh& m = *_mesh;
  const auto& ed = _element->entity_dofs;
  const int nv = m.num_vertices(), ne = m.num_edges(), nc = m.num_cells();
  const int voff = 0;
  const int eoff = ed[0] * nv;
  const int coff = eoff + ed[1] * ne;
  _ndofs = coff + ed[2] * nc;

  _dof_entity.resize(_ndofs);
  _dof_scaling.assign(_ndofs, 1.0);
  _dof_boundary.assign(_ndofs, 0);
  const std::vector<char> bv = m.boundary_vertices();
  for (int v = 0; v < nv; ++v)
    for (int i = 0; i < ed[0]; ++i)
    {
      _dof_entity[voff + v * ed[0] + i] = {0, v};
      _dof_boundary[voff + v * ed[0] + i] = bv[v];
    }
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < ed[1]; ++i)
    {
      const int d = eoff + e * ed[1] + i;
      _dof_entity[d] = {1, e};
      _dof_boundary[d] = m.is_boundary_edge(e);
      if (scaled)
        _dof_scaling[d] = m.edge_length(e);
    }
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i < ed[2]; ++i)
    {
      const int d = coff + c * ed[2] + i;
      _dof_entity[d] = {2, c};
      if (scaled && _element->mapping != MappingKind::identity)
        _dof_scaling[d] = m.cell_triangle(c).area();
    }

  const int ld = _element->dim();
  _cell_dofs.resize(static_cast<std::size_t>(nc) * ld);
  for (int c = 0; c < nc; ++c)
  {
    int* cd = _cell_dofs.data() + static_cast<std::size_t>(c) * ld;
    int l = 0;
    for (int v = 0; v < 3; ++v)
      for (int i = 0; i < ed[0]; ++i)
        cd[l++] = voff + m.cells()[c][v] * ed[0] + i;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < ed[1]; ++i)
        cd[l++] = eoff + m.cell_edge(c, k) * ed[1] + i;
    for (int i = 0; i < ed[2]; ++i)
      cd[l++] = coff + c * ed[2] + i;
  }
}
//-----------------------------------------------------------------------------
AffineCellMap GlobalSpace::cell_map(int c) const
{
  return affine_map(_mesh->cell_triangle(c));
}
//-----------------------------------------------------------------------------
TransformMatrix GlobalSpace::cell_transform(int c) const
{
  return cell_transform(c, cell_map(c));
}
//-----------------------------------------------------------------------------
TransformMatrix GlobalSpace::cell_transform(int c, const AffineCellMap& map) const
{
  const auto dofs = cell_dofs(c);
  std::vector<double> s(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i)
    s[i] = _dof_scaling[dofs[i]];
  return transform_matrix(_element->family, map, s);
}
//-----------------------------------------------------------------------------
Tabulation GlobalSpace::cell_basis(int c, std::span<const Point> ref_points,
                                   int nderiv) const
{
  const AffineCellMap map = cell_map(c);
  const Tabulation ref = tabulate(*_element, ref_points, nderiv);
  return push_forward(*_element, map, cell_transform(c, map), ref);
}
//-----------------------------------------------------------------------------
Tabulation GlobalSpace::cell_basis(int c, const Tabulation& ref) const
{
  const AffineCellMap map = cell_map(c);
  return push_forward(*_element, map, cell_transform(c, map), ref);
}
//-----------------------------------------------------------------------------
void GlobalSpace::evaluate(const Eigen::VectorXd& coeffs, int c,
                           std::span<const Point> ref_points,
                           Eigen::MatrixXd& values,
                           Eigen::MatrixXd* gradients) const
{
  const Tabulation t = cell_basis(c, ref_points, gradients ? 1 : 0);
  const int np = t.num_points(), vs = t.value_size();
  const auto dofs = cell_dofs(c);
  values = Eigen::MatrixXd::Zero(np, vs);
  if (gradients)
    *gradients = Eigen::MatrixXd::Zero(np, 2 * vs);
  for (int f = 0; f < t.num_functions(); ++f)
  {
    const double a = coeffs[dofs[f]];
    for (int p = 0; p < np; ++p)
      for (int k = 0; k < vs; ++k)
      {
        values(p, k) += a * t.value(f, p, k);
        if (gradients)
          for (int d = 0; d < 2; ++d)
            (*gradients)(p, 2 * k + d) += a * t.gradient(f, p, k, d);
      }
  }
}
//-----------------------------------------------------------------------------
std::vector<int> GlobalSpace::boundary_dofs(std::span<const int> tags) const
{
  const Mesh& m = *_mesh;
  const auto& ed = _element->entity_dofs;
  std::vector<char> mark(_ndofs, 0);
  for (int e = 0; e < m.num_edges(); ++e)
  {
    if (!m.is_boundary_edge(e)
        || std::find(tags.begin(), tags.end(), m.edge_tag(e)) == tags.end())
      continue;
    for (int v : m.edges()[e])
      for (int i = 0; i < ed[0]; ++i)
        mark[v * ed[0] + i] = 1;
    for (int i = 0; i < ed[1]; ++i)
      mark[ed[0] * m.num_vertices() + e * ed[1] + i] = 1;
  }
  std::vector<int> out;
  for (int i = 0; i < _ndofs; ++i)
    if (mark[i])
      out.push_back(i);
  return out;
}
//-----------------------------------------------------------------------------
std::shared_ptr<GlobalSpace> build_global_space(std::shared_ptr<const Mesh> mesh,
                                                Family family, bool scaled)
{
  return std::make_shared<GlobalSpace>(std::move(mesh), reference_element(family),
                                       scaled);
}
//-----------------------------------------------------------------------------

} // namespace piolafe
