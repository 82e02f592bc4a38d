#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rgp/curves.hpp"
#include "rgp/model.hpp"

namespace rgp {

// A sample of curves on one manifold and time grid, as stored on disk.
struct CurveBundle {
  Manifold manifold;
  Eigen::VectorXd times;
  std::vector<DiscreteCurve> curves;
  std::vector<std::string> labels;  // empty, or one group tag per curve
  std::optional<Point> base;
  std::optional<Eigen::MatrixXd> frame;  // q x d
};

nlohmann::json matrix_to_json(const Eigen::MatrixXd& A);  // array of rows
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json bundle_to_json(const CurveBundle& bundle);
// Validates points to 1e-8, re-projects them and sign-aligns quaternion curves.
// Malformed content throws std::invalid_argument.
CurveBundle bundle_from_json(const nlohmann::json& j);

void save_bundle(const CurveBundle& bundle, const std::string& path);
CurveBundle load_bundle(const std::string& path);

CurveBundle make_bundle(const Manifold& m, const std::vector<DiscreteCurve>& curves, int r);

nlohmann::json model_to_json(const RGPModel& model);
// base and frame are optional; they default to default_base and frame_at.
RGPModel model_from_json(const nlohmann::json& j);

// Sign-fixes an r x 4 path of unit quaternions: the first row's largest-magnitude
// coordinate becomes nonnegative, then each row is flipped if it points away from
// the previous (aligned) row. Rows off unit norm by more than 1e-6 throw NonUnitError.
Eigen::MatrixXd align_quaternions(const Eigen::MatrixXd& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rgp
