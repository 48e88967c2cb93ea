#include "doctest.h"

#include <string>

#include <kinopt/model_config.h>

using namespace kinopt;

namespace {

const std::string kDataDir = KINOPT_DATA_DIR;

std::string ErrorOf(const std::string &text) {
  try {
    ParseModelConfig(text, kDataDir, "test.json");
  } catch (const ConfigError &error) {
    return error.what();
  }
  return "";
}

bool Contains(const std::string &haystack, const std::string &needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("model_config") {

TEST_CASE("four-bar linkage config") {
  const ModelConfig config = LoadModelConfig(kDataDir + "/fourbar.json");
  const KinematicStructure &s = config.structure;
  REQUIRE(s.n_bodies() == 4);
  CHECK(s.n_k() == 9);
  CHECK(s.body(2).parent == 1);
  CHECK(s.body(3).parent == 0);
  REQUIRE(s.constraints().size() == 1);
  CHECK(s.constraints()[0].rows() == 2);
  CHECK(config.meshes[1].size() == 1);
  CHECK(config.meshes[1][0].vertices.size() == 12);
  CHECK(config.measurements[3].noise_r == 0.08);
  REQUIRE(config.drives.size() == 1);
  CHECK(config.drives[0].body == 1);
  CHECK(config.iterations == 3);
  CHECK(config.error_threshold == 0.05);
  // The hand-entered angles close the loop up to rounding.
  CHECK(EvaluateConstraint(s.constraints()[0], s).norm() < 1e-4);
}

TEST_CASE("child poses follow from the joint transforms") {
  const ModelConfig config = LoadModelConfig(kDataDir + "/stationary.json");
  const KinematicStructure &s = config.structure;
  const Pose expected = s.body(0).pose * s.body(1).joint.parent_to_joint *
                        s.body(1).joint.joint_to_model;
  CHECK((s.body(1).pose.Matrix() - expected.Matrix()).norm() < 1e-12);
  CHECK(config.iterations == 1);
  CHECK(config.regularization.rotational == 100.0);
}

TEST_CASE("drive script") {
  const Drive drive{0, 0, 0.1, 0.5, 4};
  CHECK(drive.ValueAt(0) == doctest::Approx(0.1));
  CHECK(drive.ValueAt(1) == doctest::Approx(0.6));
  CHECK(drive.ValueAt(3) == doctest::Approx(-0.4));
}

TEST_CASE("syntax errors report the line") {
  const std::string error = ErrorOf("{\n  \"bodies\": [\n    {\"name\": \"a\",,}\n  ]\n}\n");
  CHECK(Contains(error, "test.json:3:"));
}

TEST_CASE("field errors report the JSON pointer") {
  const std::string root =
      R"({"name": "root", "pose": {"rotvec": [0, 0, 0], "trans": [0, 0, 0]}})";
  const std::string evaluation = R"("evaluation": {"error_threshold": 0.1})";

  CHECK(Contains(ErrorOf("{" + evaluation + "}"), "missing required field 'bodies'"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root + "]}"), "'evaluation'"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root +
                         R"(, {"name": "c", "parent": "nope"}], )" + evaluation + "}"),
                 "/bodies/1/parent"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root +
                         R"(, {"name": "c", "parent": "root", "joint": {"axes": ["rot_w"], "parent_to_joint": {}}}], )" +
                         evaluation + "}"),
                 "/bodies/1/joint/axes/0"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root + ", " + root + "], " + evaluation + "}"),
                 "duplicate body name"));
  CHECK(Contains(ErrorOf(R"({"bodies": [{"name": "x", "pose": {"rotvec": [0, 0]}}], )" +
                         evaluation + "}"),
                 "/bodies/0/pose/rotvec"));
  CHECK(Contains(ErrorOf(R"({"bodies": [{"name": "x", "pose": {}, "mesh_path": "missing.obj"}], )" +
                         evaluation + "}"),
                 "/bodies/0/mesh_path"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root +
                         R"(], "constraints": [{"body_a": "root", "body_b": "root"}], )" +
                         evaluation + "}"),
                 "/constraints/0"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root +
                         R"(], "trajectory": {"drives": [{"body": "root", "coordinate": 6}]}, )" +
                         evaluation + "}"),
                 "/trajectory/drives/0/coordinate"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root +
                         R"(], "evaluation": {"error_threshold": -1}})"),
                 "/evaluation/error_threshold"));
  CHECK(Contains(ErrorOf(R"({"bodies": [)" + root +
                         R"(], "solver": {"iterations": 0}, )" + evaluation + "}"),
                 "/solver/iterations"));
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS(LoadModelConfig(kDataDir + "/does_not_exist.json"), ConfigError);
}

}
