#pragma once

#include "piolafe/polyset.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace piolafe
{

enum class Family
{
  BDM1,
  MTW,
  AWc,
  AWnc,
  DG0, ///< scalar, piecewise constant
  DG1  ///< vector, piecewise linear
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

enum class MappingKind
{
  identity,
  contravariant_piola,
  double_contravariant_piola
};

enum class DofKind
{
  vertex_component,
  edge_normal_moment,
  edge_tangential_moment,
  edge_nn_moment,
  edge_nt_moment,
  interior_moment,
  point_value
};

struct DofDescriptor
{
  DofKind kind;
  int entity_dim;   ///< 0 vertex, 1 edge, 2 cell
  int entity_index; ///< local index of the entity
  int order;        ///< moment degree (edge moments), else 0
  int component;    ///< stored value component (vertex/interior/point), else 0
};

/// A linear functional f -> sum_q sum_c weights(q, c) f(points[q])_c.
struct Functional
{
  std::vector<Point> points;
  Eigen::MatrixXd weights;
};

double apply(const Functional& l, const std::function<void(const Point&, double*)>& f);

struct ReferenceElement
{
  Family family;
  int degree;
  ValueShape shape;
  MappingKind mapping;
  PolynomialBasis embedding;
  /// Rows: orthonormal basis of the element space in the embedding basis.
  Eigen::MatrixXd space;
  /// Rows: nodal basis functions in the embedding basis.
  Eigen::MatrixXd coefficients;
  std::vector<DofDescriptor> dofs;
  std::vector<Functional> functionals;
  /// DOFs per vertex, per edge, per cell.
  std::array<int, 3> entity_dofs;

  int dim() const { return static_cast<int>(dofs.size()); }
  int value_size() const { return piolafe::value_size(shape); }
  /// Local DOF index of the first DOF on an entity.
  int entity_offset(int dim, int index) const;
};

/// Orthonormal basis of the element's polynomial space (rows, in the
/// orthonormal embedding basis). Throws RankDeficiency if the dimension
/// is wrong.
Eigen::MatrixXd constrained_space(Family family);

/// Reference DOF functionals and descriptors of a family.
void reference_dofs(Family family, std::vector<DofDescriptor>& dofs,
                    std::vector<Functional>& functionals);

/// D(i, k) = l_i(phi_k) for the embedding basis.
Eigen::MatrixXd dual_matrix(const std::vector<Functional>& functionals,
                            const PolynomialBasis& embedding);

ReferenceElement build_reference_element(Family family);

/// Shared, lazily built element.
std::shared_ptr<const ReferenceElement> reference_element(Family family);

/// Basis values (and gradients if nderiv > 0) on the reference cell.
Tabulation tabulate(const ReferenceElement& element,
                    std::span<const Point> points, int nderiv);

} // namespace piolafe
