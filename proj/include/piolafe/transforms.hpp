#pragma once

#include "piolafe/elements.hpp"
#include "piolafe/geometry.hpp"

#include <random>
#include <span>
#include <vector>

namespace piolafe
{

/// v = (1/detJ) J vhat
Point piola_contravariant(const Mat2& J, const Point& vhat);

/// tau = (1/detJ^2) J tauhat J^T, symmetric, stored (11, 12, 22)
Eigen::Vector3d piola_double_contravariant(const Mat2& J,
                                           const Eigen::Vector3d& tauhat);

/// Action X -> J X J^T on stored symmetric components.
Eigen::Matrix3d w_tilde(const Mat2& J);
/// Interior block, w_tilde / |detJ|.
Eigen::Matrix3d w_check(const Mat2& J);
/// Vertex block, w_tilde / detJ^2.
Eigen::Matrix3d w_breve(const Mat2& J);

/// F_*(N^k) = W^k Nhat^k for (n0, t0, n1).
Eigen::Matrix3d mtw_edge_block(const EdgeFrame& f);
Eigen::Matrix3d mtw_edge_block_inverse(const EdgeFrame& f);
/// F_*(N^k) = W^k Nhat^k for (nn0, nt0, nn1, nt1).
Eigen::Matrix4d aw_edge_block(const EdgeFrame& f);
Eigen::Matrix4d aw_edge_block_inverse(const EdgeFrame& f);

/// Block diagonal M = P^T, with P^{-1} the push-forward of the nodes,
/// followed by the row scaling diag(s).
struct TransformMatrix
{
  struct Block
  {
    int offset;
    Eigen::MatrixXd pushforward; ///< block of P^{-1}
    Eigen::MatrixXd M;           ///< block of diag(s) P^T
  };
  Family family;
  int size = 0;
  std::vector<Block> blocks;

  Eigen::MatrixXd dense() const;
  Eigen::MatrixXd dense_pushforward() const;
  /// out = M * in, in/out with one row per local DOF
  Eigen::MatrixXd apply(const Eigen::MatrixXd& in) const;
};

/// scaling: one factor per local DOF (empty means all ones).
TransformMatrix mtw_transform(const AffineCellMap& map,
                              std::span<const double> scaling = {});
TransformMatrix awnc_transform(const AffineCellMap& map,
                               std::span<const double> scaling = {});
TransformMatrix awc_transform(const AffineCellMap& map,
                              std::span<const double> scaling = {});
TransformMatrix transform_matrix(Family family, const AffineCellMap& map,
                                 std::span<const double> scaling = {});

/// Apply the family's Piola map to a reference tabulation, values and
/// gradients now with respect to physical coordinates.
Tabulation piola_map(const ReferenceElement& element, const AffineCellMap& map,
                     const Tabulation& ref);

/// Physical basis at the images of reference points: M * Piola(ref).
Tabulation push_forward(const ReferenceElement& element,
                        const AffineCellMap& map, const TransformMatrix& M,
                        const Tabulation& ref);

struct FeecReport
{
  double gradient = 0.0;
  double curl = 0.0;
  double airy = 0.0;
  double div = 0.0;
  double tensor_div = 0.0;
  double max() const;
};

/// Pullback identities on random cubic potentials and fields, evaluated
/// at quadrature points of the mapped cell. Residuals are relative.
FeecReport feec_identity_checks(const Mat2& J, std::mt19937_64& rng,
                                int samples = 4);

} // namespace piolafe
