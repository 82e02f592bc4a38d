#include "rgp/bundle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rgp/errors.hpp"

namespace rgp {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j) {
  if (!j.is_number()) throw std::invalid_argument("expected a number, got " + j.dump());
  return j.get<double>();
}

int integer(const json& j) {
  if (!j.is_number_integer()) throw std::invalid_argument("expected an integer, got " + j.dump());
  return j.get<int>();
}

Manifold manifold_from_json(const json& j) {
  const json& kind = require(j, "kind");
  if (!kind.is_string()) throw std::invalid_argument("manifold kind must be a string");
  return Manifold::from_dims(manifold_kind_from_string(kind.get<std::string>()), integer(require(j, "d")),
                             integer(require(j, "q")));
}

json manifold_to_json(const Manifold& m) {
  return {{"kind", std::string(to_string(m.kind))}, {"d", m.d}, {"q", m.q}};
}

void check_times(const Eigen::VectorXd& times) {
  const Eigen::Index r = times.size();
  if (r < 2) throw std::invalid_argument("a bundle needs at least two time points");
  for (Eigen::Index j = 0; j < r; ++j) {
    const double expected = static_cast<double>(j) / static_cast<double>(r - 1);
    if (std::abs(times[j] - expected) > 1e-12) {
      throw std::invalid_argument("times must be the uniform grid j / (r - 1) on [0, 1]");
    }
  }
}

Point checked_point(const Manifold& m, const Eigen::VectorXd& raw) {
  if (raw.size() != m.q) throw std::invalid_argument("point has the wrong number of coordinates");
  validate_point(m, raw, 1e-8);
  return project_point(m, raw);
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  if (!j.front().is_array()) throw std::invalid_argument("expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix rows have unequal lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) A(i, c) = number(row[static_cast<std::size_t>(c)]);
  }
  return A;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i]);
  return v;
}

json bundle_to_json(const CurveBundle& bundle) {
  json j;
  j["manifold"] = manifold_to_json(bundle.manifold);
  j["times"] = vector_to_json(bundle.times);
  json curves = json::array();
  for (const DiscreteCurve& c : bundle.curves) curves.push_back(matrix_to_json(c.points.transpose()));
  j["curves"] = std::move(curves);
  if (!bundle.labels.empty()) j["labels"] = bundle.labels;
  if (bundle.base) j["base"] = vector_to_json(*bundle.base);
  if (bundle.frame) j["frame"] = matrix_to_json(*bundle.frame);
  return j;
}

CurveBundle bundle_from_json(const json& j) {
  CurveBundle b;
  b.manifold = manifold_from_json(require(j, "manifold"));
  b.times = vector_from_json(require(j, "times"));
  check_times(b.times);
  const auto r = static_cast<int>(b.times.size());

  const json& curves = require(j, "curves");
  if (!curves.is_array()) throw std::invalid_argument("'curves' must be an array");
  for (const json& cj : curves) {
    Eigen::MatrixXd rows = matrix_from_json(cj);
    if (rows.rows() != r || rows.cols() != b.manifold.q) {
      throw std::invalid_argument("every curve must have r rows of q coordinates");
    }
    if (b.manifold.kind == ManifoldKind::so3quat) rows = align_quaternions(rows);
    DiscreteCurve c{b.manifold, Eigen::MatrixXd(b.manifold.q, r)};
    for (int t = 0; t < r; ++t) c.points.col(t) = checked_point(b.manifold, rows.row(t).transpose());
    b.curves.push_back(std::move(c));
  }

  if (j.contains("labels")) {
    const json& labels = j.at("labels");
    if (!labels.is_array() || labels.size() != b.curves.size()) {
      throw std::invalid_argument("'labels' must hold one entry per curve");
    }
    for (const json& l : labels) {
      if (l.is_string()) {
        b.labels.push_back(l.get<std::string>());
      } else if (l.is_number_integer()) {
        b.labels.push_back(std::to_string(l.get<long long>()));
      } else {
        throw std::invalid_argument("labels must be strings or integers");
      }
    }
  }
  if (j.contains("base")) b.base = checked_point(b.manifold, vector_from_json(j.at("base")));
  if (j.contains("frame")) {
    Eigen::MatrixXd frame = matrix_from_json(j.at("frame"));
    if (frame.rows() != b.manifold.q || frame.cols() != b.manifold.d) {
      throw std::invalid_argument("'frame' must be a q x d matrix");
    }
    b.frame = std::move(frame);
  }
  return b;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void save_bundle(const CurveBundle& bundle, const std::string& path) {
  write_text_file(path, bundle_to_json(bundle).dump(1) + "\n");
}

CurveBundle load_bundle(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
  return bundle_from_json(j);
}

CurveBundle make_bundle(const Manifold& m, const std::vector<DiscreteCurve>& curves, int r) {
  CurveBundle b;
  b.manifold = m;
  b.times = TimeGrid::uniform(r).times();
  b.curves = curves;
  return b;
}

json model_to_json(const RGPModel& model) {
  return {{"manifold", manifold_to_json(model.manifold)},
          {"k", model.basis.k},
          {"r", model.grid.r},
          {"M", matrix_to_json(model.params.M)},
          {"U", matrix_to_json(model.params.U)},
          {"V", matrix_to_json(model.params.V)},
          {"base", vector_to_json(model.base)},
          {"frame", matrix_to_json(model.frame)}};
}

RGPModel model_from_json(const json& j) {
  RGPModel model;
  model.manifold = manifold_from_json(require(j, "manifold"));
  model.basis.k = integer(require(j, "k"));
  model.grid = TimeGrid::uniform(integer(require(j, "r")));
  model.params = {matrix_from_json(require(j, "M")), matrix_from_json(require(j, "U")),
                  matrix_from_json(require(j, "V"))};
  model.base = j.contains("base") ? checked_point(model.manifold, vector_from_json(j.at("base")))
                                  : default_base(model.manifold);
  model.frame = j.contains("frame") ? matrix_from_json(j.at("frame")) : frame_at(model.manifold, model.base);
  model.validate();
  return model;
}

Eigen::MatrixXd align_quaternions(const Eigen::MatrixXd& rows) {
  if (rows.cols() != 4) throw std::invalid_argument("quaternion rows must have 4 coordinates");
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double n = rows.row(i).norm();
    if (std::abs(n - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "quaternion at row " << i << " has norm " << n;
      throw NonUnitError(msg.str());
    }
  }
  Eigen::MatrixXd out = rows;
  if (out.rows() == 0) return out;
  Eigen::Index lead = 0;
  out.row(0).cwiseAbs().maxCoeff(&lead);
  if (out(0, lead) < 0.0) out.row(0) *= -1.0;
  for (Eigen::Index i = 1; i < out.rows(); ++i) {
    if (out.row(i).dot(out.row(i - 1)) < 0.0) out.row(i) *= -1.0;
  }
  return out;
}

}  // namespace rgp
