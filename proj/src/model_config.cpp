#include <kinopt/model_config.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace kinopt {

namespace {

using nlohmann::json;

class Parser {
 public:
  Parser(std::string source, std::string base_dir)
      : source_{std::move(source)}, base_dir_{std::move(base_dir)} {}

  ModelConfig Parse(const json &root);

 private:
  [[noreturn]] void Fail(const std::string &pointer,
                         const std::string &message) const {
    throw ConfigError(source_ + ": " + (pointer.empty() ? "/" : pointer) +
                      ": " + message);
  }

  const json &Require(const json &object, const std::string &pointer,
                      const char *key) const;
  double Number(const json &value, const std::string &pointer) const;
  Eigen::Vector3d Vector3(const json &value, const std::string &pointer) const;
  Pose ParsePose(const json &value, const std::string &pointer) const;
  AxisMask ParseAxes(const json &value, const std::string &pointer) const;
  int BodyIndex(const ModelConfig &config, const json &value,
                const std::string &pointer) const;
  std::vector<Mesh> ParseMeshes(const json &value,
                                const std::string &pointer) const;
  void ParseBody(ModelConfig &config, const json &body,
                 const std::string &pointer) const;
  void ParseConstraint(ModelConfig &config, const json &constraint,
                       const std::string &pointer) const;

  std::string source_;
  std::string base_dir_;
};

const json &Parser::Require(const json &object, const std::string &pointer,
                            const char *key) const {
  if (!object.is_object()) Fail(pointer, "expected an object");
  const auto it = object.find(key);
  if (it == object.end())
    Fail(pointer, std::string{"missing required field '"} + key + "'");
  return *it;
}

double Parser::Number(const json &value, const std::string &pointer) const {
  if (!value.is_number()) Fail(pointer, "expected a number");
  const double number = value.get<double>();
  if (!std::isfinite(number)) Fail(pointer, "expected a finite number");
  return number;
}

Eigen::Vector3d Parser::Vector3(const json &value,
                                const std::string &pointer) const {
  if (!value.is_array() || value.size() != 3)
    Fail(pointer, "expected an array of 3 numbers");
  Eigen::Vector3d vector;
  for (int i = 0; i < 3; ++i)
    vector(i) = Number(value[i], pointer + "/" + std::to_string(i));
  return vector;
}

Pose Parser::ParsePose(const json &value, const std::string &pointer) const {
  if (!value.is_object()) Fail(pointer, "expected a pose {rotvec, trans}");
  Eigen::Vector3d rotvec = Eigen::Vector3d::Zero();
  Eigen::Vector3d trans = Eigen::Vector3d::Zero();
  for (const auto &[key, field] : value.items()) {
    if (key == "rotvec") {
      rotvec = Vector3(field, pointer + "/rotvec");
    } else if (key == "trans") {
      trans = Vector3(field, pointer + "/trans");
    } else {
      Fail(pointer + "/" + key, "unknown pose field");
    }
  }
  return Pose::FromRotVec(rotvec, trans);
}

AxisMask Parser::ParseAxes(const json &value,
                           const std::string &pointer) const {
  if (value.is_string()) {
    const std::string name = value.get<std::string>();
    if (name == "all") return kAllAxes;
    if (name == "rotation") return kRotationAxes;
    if (name == "translation") return kTranslationAxes;
    Fail(pointer, "expected \"all\", \"rotation\", \"translation\" or a list "
                  "of axis names");
  }
  if (!value.is_array()) Fail(pointer, "expected a list of axis names");
  AxisMask mask{};
  for (size_t i = 0; i < value.size(); ++i) {
    const std::string item_pointer = pointer + "/" + std::to_string(i);
    if (!value[i].is_string()) Fail(item_pointer, "expected an axis name");
    const std::string name = value[i].get<std::string>();
    const auto it = std::find(kAxisNames.begin(), kAxisNames.end(), name);
    if (it == kAxisNames.end())
      Fail(item_pointer, "unknown axis '" + name +
                             "' (rot_x .. rot_z, trans_x .. trans_z)");
    const auto axis = static_cast<size_t>(it - kAxisNames.begin());
    if (mask[axis]) Fail(item_pointer, "duplicate axis '" + name + "'");
    mask[axis] = true;
  }
  return mask;
}

int Parser::BodyIndex(const ModelConfig &config, const json &value,
                      const std::string &pointer) const {
  if (!value.is_string()) Fail(pointer, "expected a body name");
  const auto index = config.structure.FindBody(value.get<std::string>());
  if (!index)
    Fail(pointer, "unknown body '" + value.get<std::string>() +
                      "' (bodies must be declared before use)");
  return *index;
}

std::vector<Mesh> Parser::ParseMeshes(const json &value,
                                      const std::string &pointer) const {
  std::vector<std::pair<std::string, std::string>> paths;
  if (value.is_string()) {
    paths.emplace_back(value.get<std::string>(), pointer);
  } else if (value.is_array()) {
    for (size_t i = 0; i < value.size(); ++i) {
      const std::string item_pointer = pointer + "/" + std::to_string(i);
      if (!value[i].is_string()) Fail(item_pointer, "expected a file path");
      paths.emplace_back(value[i].get<std::string>(), item_pointer);
    }
  } else {
    Fail(pointer, "expected a file path or a list of file paths");
  }
  std::vector<Mesh> meshes;
  for (const auto &[path, item_pointer] : paths) {
    std::filesystem::path resolved{path};
    if (resolved.is_relative()) resolved = std::filesystem::path{base_dir_} / resolved;
    try {
      meshes.push_back(LoadObjVertices(resolved.string()));
    } catch (const std::runtime_error &error) {
      Fail(item_pointer, error.what());
    }
  }
  return meshes;
}

void Parser::ParseBody(ModelConfig &config, const json &body,
                       const std::string &pointer) const {
  const json &name_value = Require(body, pointer, "name");
  if (!name_value.is_string() || name_value.get<std::string>().empty())
    Fail(pointer + "/name", "expected a non-empty string");
  const std::string name = name_value.get<std::string>();
  if (config.structure.FindBody(name))
    Fail(pointer + "/name", "duplicate body name '" + name + "'");

  std::optional<int> parent;
  if (body.contains("parent") && !body["parent"].is_null())
    parent = BodyIndex(config, body["parent"], pointer + "/parent");

  Joint joint;
  bool has_parent_to_joint = false;
  if (body.contains("joint")) {
    const std::string joint_pointer = pointer + "/joint";
    const json &joint_value = body["joint"];
    if (!joint_value.is_object()) Fail(joint_pointer, "expected an object");
    for (const auto &[key, field] : joint_value.items()) {
      const std::string field_pointer = joint_pointer + "/" + key;
      if (key == "axes") {
        joint.free_axes = ParseAxes(field, field_pointer);
      } else if (key == "fixed_side") {
        const std::string side = field.is_string() ? field.get<std::string>() : "";
        if (side == "joint_to_model") {
          joint.fixed_side = FixedSide::kJointToModel;
        } else if (side == "parent_to_joint") {
          joint.fixed_side = FixedSide::kParentToJoint;
        } else {
          Fail(field_pointer,
               "expected \"joint_to_model\" or \"parent_to_joint\"");
        }
      } else if (key == "joint_to_model") {
        joint.joint_to_model = ParsePose(field, field_pointer);
      } else if (key == "parent_to_joint") {
        joint.parent_to_joint = ParsePose(field, field_pointer);
        has_parent_to_joint = true;
      } else {
        Fail(field_pointer, "unknown joint field");
      }
    }
  }
  if (!parent && has_parent_to_joint)
    Fail(pointer + "/joint/parent_to_joint", "a root body has no parent joint");

  if (body.contains("pose")) {
    config.structure.AddBody(name, ParsePose(body["pose"], pointer + "/pose"),
                             parent, joint);
  } else if (parent && has_parent_to_joint) {
    config.structure.AddChild(name, *parent, joint);
  } else {
    Fail(pointer, parent ? "needs 'pose' or 'joint/parent_to_joint'"
                         : "a root body needs 'pose'");
  }

  config.meshes.emplace_back();
  if (body.contains("mesh_path"))
    config.meshes.back() = ParseMeshes(body["mesh_path"], pointer + "/mesh_path");

  Measurement measurement;
  if (body.contains("measurement")) {
    const std::string m_pointer = pointer + "/measurement";
    const json &value = body["measurement"];
    if (!value.is_object()) Fail(m_pointer, "expected an object");
    for (const auto &[key, field] : value.items()) {
      const double number = Number(field, m_pointer + "/" + key);
      if (number < 0.0) Fail(m_pointer + "/" + key, "must be non-negative");
      if (key == "weight_r") {
        measurement.weight_r = number;
      } else if (key == "weight_t") {
        measurement.weight_t = number;
      } else if (key == "noise_r") {
        measurement.noise_r = number;
      } else if (key == "noise_t") {
        measurement.noise_t = number;
      } else {
        Fail(m_pointer + "/" + key, "unknown measurement field");
      }
    }
  }
  config.measurements.push_back(measurement);
}

void Parser::ParseConstraint(ModelConfig &config, const json &value,
                             const std::string &pointer) const {
  Constraint constraint;
  constraint.body_a =
      BodyIndex(config, Require(value, pointer, "body_a"), pointer + "/body_a");
  constraint.body_b =
      BodyIndex(config, Require(value, pointer, "body_b"), pointer + "/body_b");
  if (value.contains("frame_a"))
    constraint.frame_a = ParsePose(value["frame_a"], pointer + "/frame_a");
  if (value.contains("frame_b"))
    constraint.frame_b = ParsePose(value["frame_b"], pointer + "/frame_b");
  if (value.contains("axes"))
    constraint.axes = ParseAxes(value["axes"], pointer + "/axes");
  try {
    config.structure.AddConstraint(constraint);
  } catch (const std::invalid_argument &error) {
    Fail(pointer, error.what());
  }
}

ModelConfig Parser::Parse(const json &root) {
  ModelConfig config;
  const json &bodies = Require(root, "", "bodies");
  if (!bodies.is_array() || bodies.empty())
    Fail("/bodies", "expected a non-empty array");
  for (size_t i = 0; i < bodies.size(); ++i)
    ParseBody(config, bodies[i], "/bodies/" + std::to_string(i));

  if (root.contains("constraints")) {
    const json &constraints = root["constraints"];
    if (!constraints.is_array()) Fail("/constraints", "expected an array");
    for (size_t i = 0; i < constraints.size(); ++i)
      ParseConstraint(config, constraints[i],
                      "/constraints/" + std::to_string(i));
  }

  if (root.contains("trajectory")) {
    const json &trajectory = root["trajectory"];
    const json &drives = Require(trajectory, "/trajectory", "drives");
    if (!drives.is_array()) Fail("/trajectory/drives", "expected an array");
    for (size_t i = 0; i < drives.size(); ++i) {
      const std::string pointer = "/trajectory/drives/" + std::to_string(i);
      Drive drive;
      drive.body = BodyIndex(config, Require(drives[i], pointer, "body"),
                             pointer + "/body");
      const Joint &joint = config.structure.body(drive.body).joint;
      if (drives[i].contains("coordinate")) {
        const json &coordinate = drives[i]["coordinate"];
        if (!coordinate.is_number_integer())
          Fail(pointer + "/coordinate", "expected an integer");
        drive.coordinate = coordinate.get<int>();
      }
      if (drive.coordinate < 0 || drive.coordinate >= joint.dof())
        Fail(pointer + "/coordinate",
             "joint of body '" + config.structure.body(drive.body).name +
                 "' has " + std::to_string(joint.dof()) + " coordinates");
      if (drives[i].contains("offset"))
        drive.offset = Number(drives[i]["offset"], pointer + "/offset");
      if (drives[i].contains("amplitude"))
        drive.amplitude = Number(drives[i]["amplitude"], pointer + "/amplitude");
      if (drives[i].contains("period"))
        drive.period = Number(drives[i]["period"], pointer + "/period");
      if (!(drive.period > 0.0)) Fail(pointer + "/period", "must be positive");
      config.drives.push_back(drive);
    }
  }

  if (root.contains("solver")) {
    const json &solver = root["solver"];
    if (!solver.is_object()) Fail("/solver", "expected an object");
    if (solver.contains("iterations")) {
      const json &iterations = solver["iterations"];
      if (!iterations.is_number_integer() || iterations.get<int>() < 1)
        Fail("/solver/iterations", "expected a positive integer");
      config.iterations = iterations.get<int>();
    }
    if (solver.contains("lambda_r"))
      config.regularization.rotational =
          Number(solver["lambda_r"], "/solver/lambda_r");
    if (solver.contains("lambda_t"))
      config.regularization.translational =
          Number(solver["lambda_t"], "/solver/lambda_t");
    if (config.regularization.rotational < 0.0 ||
        config.regularization.translational < 0.0)
      Fail("/solver", "regularization must be non-negative");
  }

  const json &evaluation = Require(root, "", "evaluation");
  config.error_threshold =
      Number(Require(evaluation, "/evaluation", "error_threshold"),
             "/evaluation/error_threshold");
  if (!(config.error_threshold > 0.0))
    Fail("/evaluation/error_threshold", "must be positive");
  return config;
}

}  // namespace

double Drive::ValueAt(int step) const {
  return offset +
         amplitude * std::sin(2.0 * std::numbers::pi * step / period);
}

ModelConfig ParseModelConfig(const std::string &text,
                             const std::string &base_dir,
                             const std::string &source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &error) {
    const size_t end = std::min<size_t>(error.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + end, '\n');
    throw ConfigError(source_name + ":" + std::to_string(line) + ": " +
                      error.what());
  }
  return Parser{source_name, base_dir}.Parse(root);
}

ModelConfig LoadModelConfig(const std::string &path) {
  std::ifstream file(path);
  if (!file) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string base_dir =
      std::filesystem::path{path}.parent_path().string();
  return ParseModelConfig(buffer.str(), base_dir.empty() ? "." : base_dir,
                          path);
}

}  // namespace kinopt
