#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

namespace rgp {

enum class ManifoldKind { euclidean, sphere, spd, so3quat };

std::string_view to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(std::string_view name);

// Which manifold, its intrinsic dimension d and embedding dimension q.
// Points and tangent vectors are both stored as length-q vectors in the
// ambient coordinates; SPD matrices are flattened column-major (q = r*r).
struct Manifold {
  ManifoldKind kind = ManifoldKind::euclidean;
  int d = 0;
  int q = 0;

  static Manifold euclidean(int d);
  static Manifold sphere(int d);
  // Symmetric positive definite r x r matrices with the affine-invariant metric.
  static Manifold spd(int r);
  // Unit quaternions restricted to a hemisphere of S^3.
  static Manifold so3quat();

  // Build from a (kind, d, q) triple, checking the dimension relations.
  static Manifold from_dims(ManifoldKind kind, int d, int q);

  // Side length of the matrices for spd; 0 otherwise.
  int matrix_size() const;
  bool is_spherical() const { return kind == ManifoldKind::sphere || kind == ManifoldKind::so3quat; }

  bool operator==(const Manifold&) const = default;
};

using Point = Eigen::VectorXd;

// A tangent vector together with the point it is attached to.
struct Tangent {
  Point base;
  Eigen::VectorXd vec;
};

// Largest distance at which log maps are accepted on spherical manifolds.
inline constexpr double kSphereCutLocusMargin = 1e-6;

Point exp_map(const Manifold& m, const Tangent& t);
Tangent log_map(const Manifold& m, const Point& p, const Point& x);
double distance(const Manifold& m, const Point& p, const Point& x);

// Parallel transport along the minimizing geodesic from p to p2.
Tangent transport(const Manifold& m, const Point& p, const Point& p2, const Tangent& t);
// Same as transport, applied to every column of `vecs` (each tangent at p).
Eigen::MatrixXd transport_columns(const Manifold& m, const Point& p, const Point& p2,
                                  const Eigen::MatrixXd& vecs);

// Riemannian inner product and norm at p.
double inner(const Manifold& m, const Point& p, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double norm(const Manifold& m, const Point& p, const Eigen::VectorXd& v);

// Orthonormal (in the metric at b) basis of T_bM as a q x d matrix.
Eigen::MatrixXd frame_at(const Manifold& m, const Point& b);

// Coordinates <frame_i, v>_b of a tangent vector at b in the given frame.
Eigen::VectorXd frame_coords(const Manifold& m, const Point& b, const Eigen::MatrixXd& frame,
                             const Eigen::VectorXd& v);

// Gram matrix of the frame columns under the metric at b.
Eigen::MatrixXd frame_gram(const Manifold& m, const Point& b, const Eigen::MatrixXd& frame);

// Orthogonal projection of an ambient vector onto T_pM.
Eigen::VectorXd project_tangent(const Manifold& m, const Point& p, const Eigen::VectorXd& v);

// Throws std::invalid_argument when p violates the Point invariants by more than tol.
void validate_point(const Manifold& m, const Point& p, double tol = 1e-12);
// Nearest valid point: renormalize spheres, symmetrize SPD matrices.
Point project_point(const Manifold& m, const Point& p);

// The natural origin used when no base point is given: 0, e_1 or the identity.
Point default_base(const Manifold& m);

enum class SymFunc { sqrt, inv_sqrt, log, exp, inverse };

// Function of a symmetric matrix through its eigendecomposition. sqrt, inv_sqrt,
// log and inverse require A to be positive definite.
Eigen::MatrixXd sym_funcm(SymFunc f, const Eigen::MatrixXd& A);

// Affine-invariant distance between SPD matrices, ||log(A^-1/2 B A^-1/2)||_F.
double spd_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Reshape helpers for flattened SPD points.
Eigen::MatrixXd as_matrix(const Eigen::VectorXd& flat, int r);
Eigen::VectorXd as_flat(const Eigen::MatrixXd& mat);

}  // namespace rgp
