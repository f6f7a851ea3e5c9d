#pragma once

#include "piolafe/elements.hpp"
#include "piolafe/mesh.hpp"
#include "piolafe/transforms.hpp"

#include <memory>
#include <span>
#include <vector>

namespace piolafe
{

struct EntityRef
{
  int dim;
  int index;
};

class GlobalSpace
{
public:
  /// scaled: multiply edge DOFs by the edge length and interior DOFs by
  /// the cell area (vertex DOFs unscaled).
  GlobalSpace(std::shared_ptr<const Mesh> mesh,
              std::shared_ptr<const ReferenceElement> element, bool scaled = true);

  const Mesh& mesh() const { return *_mesh; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return _mesh; }
  const ReferenceElement& element() const { return *_element; }
  std::shared_ptr<const ReferenceElement> element_ptr() const { return _element; }
  bool scaled() const { return _scaled; }

  int num_dofs() const { return _ndofs; }
  int local_dim() const { return _element->dim(); }
  std::span<const int> cell_dofs(int c) const
  {
    return {_cell_dofs.data() + static_cast<std::size_t>(c) * local_dim(),
            static_cast<std::size_t>(local_dim())};
  }
  const EntityRef& dof_entity(int i) const { return _dof_entity[i]; }
  double dof_scaling(int i) const { return _dof_scaling[i]; }
  bool dof_on_boundary(int i) const { return _dof_boundary[i]; }

  AffineCellMap cell_map(int c) const;
  TransformMatrix cell_transform(int c) const;
  TransformMatrix cell_transform(int c, const AffineCellMap& map) const;

  /// Physical basis of cell c at the images of reference points.
  Tabulation cell_basis(int c, std::span<const Point> ref_points,
                        int nderiv) const;
  /// Same, reusing a reference tabulation of the element.
  Tabulation cell_basis(int c, const Tabulation& ref) const;

  /// Evaluate a global field at the images of reference points in cell c.
  /// Returns npts x vs values (and npts x (vs*2) gradients if requested).
  void evaluate(const Eigen::VectorXd& coeffs, int c,
                std::span<const Point> ref_points, Eigen::MatrixXd& values,
                Eigen::MatrixXd* gradients = nullptr) const;

  /// DOFs lying on the closure of boundary edges with the given tags.
  std::vector<int> boundary_dofs(std::span<const int> tags) const;

private:
  std::shared_ptr<const Mesh> _mesh;
  std::shared_ptr<const ReferenceElement> _element;
  bool _scaled;
  int _ndofs = 0;
  std::vector<int> _cell_dofs;
  std::vector<EntityRef> _dof_entity;
  std::vector<double> _dof_scaling;
  std::vector<char> _dof_boundary;
};

std::shared_ptr<GlobalSpace> build_global_space(std::shared_ptr<const Mesh> mesh,
                                                Family family, bool scaled = true);

} // namespace piolafe
