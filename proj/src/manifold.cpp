#include "rgp/manifold.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rgp/errors.hpp"

namespace rgp {

namespace {

constexpr double kPi = std::numbers::pi;

// Geodesic angle between unit vectors; accurate for both small and large angles.
double sphere_angle(const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
  const double chord = (x - p).norm();
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

struct SpdRoots {
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;
};

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym_eigen(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S);
}

void require_positive(const Eigen::VectorXd& eig) {
  const double lo = eig.minCoeff();
  const double hi = eig.maxCoeff();
  if (!(hi > 0.0) || lo <= 1e-14 * hi) {
    std::ostringstream msg;
    msg << "matrix is not positive definite (eigenvalue range [" << lo << ", " << hi << "])";
    throw NotPositiveDefiniteError(msg.str());
  }
}

SpdRoots spd_roots(const Eigen::MatrixXd& P) {
  const auto es = sym_eigen(P);
  require_positive(es.eigenvalues());
  const Eigen::MatrixXd& Q = es.eigenvectors();
  const Eigen::VectorXd s = es.eigenvalues().array().sqrt();
  return {Q * s.asDiagonal() * Q.transpose(), Q * s.cwiseInverse().asDiagonal() * Q.transpose()};
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

void require_outside_cut_locus(double angle) {
  if (kPi - angle < 1e-10) {
    throw CutLocusError("points are antipodal on the sphere (inverse exponential undefined)");
  }
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::spd: return "spd";
    case ManifoldKind::so3quat: return "so3quat";
  }
  return "unknown";
}

ManifoldKind manifold_kind_from_string(std::string_view name) {
  if (name == "euclidean") return ManifoldKind::euclidean;
  if (name == "sphere") return ManifoldKind::sphere;
  if (name == "spd") return ManifoldKind::spd;
  if (name == "so3quat") return ManifoldKind::so3quat;
  throw std::invalid_argument("unknown manifold kind '" + std::string(name) + "'");
}

Manifold Manifold::euclidean(int d) {
  if (d < 1) throw std::invalid_argument("euclidean dimension must be positive");
  return {ManifoldKind::euclidean, d, d};
}

Manifold Manifold::sphere(int d) {
  if (d < 1) throw std::invalid_argument("sphere dimension must be positive");
  return {ManifoldKind::sphere, d, d + 1};
}

Manifold Manifold::spd(int r) {
  if (r < 1) throw std::invalid_argument("spd matrix size must be positive");
  return {ManifoldKind::spd, r * (r + 1) / 2, r * r};
}

Manifold Manifold::so3quat() { return {ManifoldKind::so3quat, 3, 4}; }

Manifold Manifold::from_dims(ManifoldKind kind, int d, int q) {
  Manifold m;
  switch (kind) {
    case ManifoldKind::euclidean: m = euclidean(d); break;
    case ManifoldKind::sphere: m = sphere(d); break;
    case ManifoldKind::so3quat: m = so3quat(); break;
    case ManifoldKind::spd: {
      const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(q))));
      m = spd(r);
      break;
    }
  }
  if (m.d != d || m.q != q) {
    throw std::invalid_argument("inconsistent dimensions for manifold " + std::string(to_string(kind)));
  }
  return m;
}

int Manifold::matrix_size() const {
  if (kind != ManifoldKind::spd) return 0;
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(q))));
}

Eigen::MatrixXd as_matrix(const Eigen::VectorXd& flat, int r) {
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), r, r);
}

Eigen::VectorXd as_flat(const Eigen::MatrixXd& mat) {
  return Eigen::Map<const Eigen::VectorXd>(mat.data(), mat.size());
}

Eigen::MatrixXd sym_funcm(SymFunc f, const Eigen::MatrixXd& A) {
  const auto es = sym_eigen(A);
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (f != SymFunc::exp) require_positive(lam);
  Eigen::VectorXd g(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    switch (f) {
      case SymFunc::sqrt: g[i] = std::sqrt(lam[i]); break;
      case SymFunc::inv_sqrt: g[i] = 1.0 / std::sqrt(lam[i]); break;
      case SymFunc::log: g[i] = std::log(lam[i]); break;
      case SymFunc::exp: g[i] = std::exp(lam[i]); break;
      case SymFunc::inverse: g[i] = 1.0 / lam[i]; break;
    }
  }
  const Eigen::MatrixXd& Q = es.eigenvectors();
  return symmetrized(Q * g.asDiagonal() * Q.transpose());
}

double spd_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd Ai = sym_funcm(SymFunc::inv_sqrt, A);
  const auto es = sym_eigen(Ai * B * Ai);
  require_positive(es.eigenvalues());
  return es.eigenvalues().array().log().matrix().norm();
}

Point exp_map(const Manifold& m, const Tangent& t) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return t.base + t.vec;
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: {
      const double n = t.vec.norm();
      if (n < 1e-12) return (t.base + t.vec).normalized();
      const Point x = t.base * std::cos(n) + t.vec * (std::sin(n) / n);
      return x.normalized();
    }
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      const SpdRoots roots = spd_roots(as_matrix(t.base, r));
      const Eigen::MatrixXd inner_arg = roots.inv_sqrt * as_matrix(t.vec, r) * roots.inv_sqrt;
      return as_flat(symmetrized(roots.sqrt * sym_funcm(SymFunc::exp, inner_arg) * roots.sqrt));
    }
  }
  throw std::logic_error("unreachable");
}

Tangent log_map(const Manifold& m, const Point& p, const Point& x) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return {p, x - p};
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: {
      const double angle = sphere_angle(p, x);
      require_outside_cut_locus(angle);
      const Eigen::VectorXd w = x - p.dot(x) * p;
      const double wn = w.norm();
      if (wn < 1e-300) return {p, Eigen::VectorXd::Zero(p.size())};
      return {p, w * (angle / wn)};
    }
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      const SpdRoots roots = spd_roots(as_matrix(p, r));
      const Eigen::MatrixXd inner_arg = roots.inv_sqrt * as_matrix(x, r) * roots.inv_sqrt;
      return {p, as_flat(symmetrized(roots.sqrt * sym_funcm(SymFunc::log, inner_arg) * roots.sqrt))};
    }
  }
  throw std::logic_error("unreachable");
}

double distance(const Manifold& m, const Point& p, const Point& x) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return (x - p).norm();
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: return sphere_angle(p, x);
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      return spd_distance(as_matrix(p, r), as_matrix(x, r));
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::MatrixXd transport_columns(const Manifold& m, const Point& p, const Point& p2,
                                  const Eigen::MatrixXd& vecs) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return vecs;
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: {
      const double angle = sphere_angle(p, p2);
      if (angle < 1e-15) return vecs;
      require_outside_cut_locus(angle);
      Eigen::VectorXd w = p2 - p.dot(p2) * p;
      w.normalize();
      const Eigen::RowVectorXd coef = w.transpose() * vecs;
      return vecs + ((std::cos(angle) - 1.0) * w - std::sin(angle) * p) * coef;
    }
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      const Eigen::MatrixXd P = as_matrix(p, r);
      const Eigen::MatrixXd P2 = as_matrix(p2, r);
      // E = (P2 P^-1)^(1/2) = A (A P^-1 A)^(1/2) A^-1 with A = P2^(1/2).
      const SpdRoots a = spd_roots(P2);
      const Eigen::MatrixXd P_inv = sym_funcm(SymFunc::inverse, P);
      const Eigen::MatrixXd E = a.sqrt * sym_funcm(SymFunc::sqrt, a.sqrt * P_inv * a.sqrt) * a.inv_sqrt;
      Eigen::MatrixXd out(vecs.rows(), vecs.cols());
      for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
        const Eigen::VectorXd col = vecs.col(c);
        out.col(c) = as_flat(symmetrized(E * as_matrix(col, r) * E.transpose()));
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Tangent transport(const Manifold& m, const Point& p, const Point& p2, const Tangent& t) {
  return {p2, transport_columns(m, p, p2, t.vec)};
}

double inner(const Manifold& m, const Point& p, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (m.kind != ManifoldKind::spd) return u.dot(v);
  const int r = m.matrix_size();
  const Eigen::MatrixXd P_inv = sym_funcm(SymFunc::inverse, as_matrix(p, r));
  return (P_inv * as_matrix(u, r) * P_inv * as_matrix(v, r)).trace();
}

double norm(const Manifold& m, const Point& p, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, inner(m, p, v, v)));
}

Eigen::MatrixXd frame_at(const Manifold& m, const Point& b) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return Eigen::MatrixXd::Identity(m.d, m.d);
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: {
      // Left singular vectors of I - b b^T, dropping the null direction b.
      const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(m.q, m.q) - b * b.transpose();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeFullU);
      return svd.matrixU().leftCols(m.d);
    }
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      const Eigen::MatrixXd B_half = sym_funcm(SymFunc::sqrt, as_matrix(b, r));
      Eigen::MatrixXd frame(m.q, m.d);
      int col = 0;
      auto push = [&](const Eigen::MatrixXd& E) {
        frame.col(col++) = as_flat(symmetrized(B_half * E * B_half));
      };
      for (int i = 0; i < r; ++i) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(r, r);
        E(i, i) = 1.0;
        push(E);
      }
      const double s = 1.0 / std::sqrt(2.0);
      for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
          Eigen::MatrixXd E = Eigen::MatrixXd::Zero(r, r);
          E(i, j) = s;
          E(j, i) = s;
          push(E);
        }
      }
      return frame;
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd frame_coords(const Manifold& m, const Point& b, const Eigen::MatrixXd& frame,
                             const Eigen::VectorXd& v) {
  if (m.kind != ManifoldKind::spd) return frame.transpose() * v;
  const int r = m.matrix_size();
  const Eigen::MatrixXd B_inv = sym_funcm(SymFunc::inverse, as_matrix(b, r));
  // <F_i, V>_B = tr(B^-1 F_i B^-1 V) = <F_i, B^-1 V B^-1>_Frobenius.
  return frame.transpose() * as_flat(B_inv * as_matrix(v, r) * B_inv);
}

Eigen::MatrixXd frame_gram(const Manifold& m, const Point& b, const Eigen::MatrixXd& frame) {
  Eigen::MatrixXd gram(frame.cols(), frame.cols());
  for (Eigen::Index i = 0; i < frame.cols(); ++i) {
    gram.col(i) = frame_coords(m, b, frame, frame.col(i));
  }
  return gram;
}

Eigen::VectorXd project_tangent(const Manifold& m, const Point& p, const Eigen::VectorXd& v) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return v;
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: return v - p.dot(v) * p;
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      return as_flat(symmetrized(as_matrix(v, r)));
    }
  }
  throw std::logic_error("unreachable");
}

void validate_point(const Manifold& m, const Point& p, double tol) {
  if (p.size() != m.q) {
    throw std::invalid_argument("point has " + std::to_string(p.size()) + " coordinates, expected " +
                                std::to_string(m.q));
  }
  if (!p.allFinite()) throw std::invalid_argument("point has non-finite coordinates");
  switch (m.kind) {
    case ManifoldKind::euclidean: return;
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat:
      if (std::abs(p.norm() - 1.0) > tol) throw std::invalid_argument("point is not of unit norm");
      return;
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      const Eigen::MatrixXd P = as_matrix(p, r);
      if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("spd point is not symmetric");
      }
      const auto es = sym_eigen(P);
      if (es.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("spd point is not positive definite");
      return;
    }
  }
}

Point project_point(const Manifold& m, const Point& p) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return p;
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: return p.normalized();
    case ManifoldKind::spd: return as_flat(symmetrized(as_matrix(p, m.matrix_size())));
  }
  throw std::logic_error("unreachable");
}

Point default_base(const Manifold& m) {
  switch (m.kind) {
    case ManifoldKind::euclidean: return Point::Zero(m.q);
    case ManifoldKind::sphere:
    case ManifoldKind::so3quat: return Point::Unit(m.q, 0);
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      return as_flat(Eigen::MatrixXd::Identity(r, r));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace rgp
