#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "causaltwin/csv.hpp"
#include "helpers.hpp"

using namespace causaltwin;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/causaltwin_csv_") + name + "_" + std::to_string(::getpid()) + ".csv";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

Schema two_var_schema() {
  Schema schema;
  schema.variables = {testutil::sensor("LIT101", PhysicalClass::Level),
                      testutil::actuator("P101", PhysicalClass::Pump)};
  return schema;
}

}  // namespace

TEST_CASE("ingest_csv parses values by header order") {
  const std::string path = temp_path("basic");
  write_text(path, "t,P101,LIT101\n0,1,10.5\n1,0,11.25\n2,1,12\n");
  TimeSeriesFrame frame = ingest_csv(path, two_var_schema());
  CHECK(frame.rows() == 3);
  CHECK(frame.cols() == 2);
  // Schema order wins over header order.
  CHECK(frame.meta()[0].name == "LIT101");
  CHECK(frame.at(0, 0) == 10.5);
  CHECK(frame.at(0, 1) == 1.0);
  CHECK(frame.at(2, 0) == 12.0);
  CHECK_FALSE(frame.labeled());
  std::remove(path.c_str());
}

TEST_CASE("ingest_csv reads labels and missing cells") {
  Schema schema = two_var_schema();
  schema.label_column = "attack";
  const std::string path = temp_path("labels");
  write_text(path, "t,LIT101,P101,attack\n0,10.5,1,0\n1,,0,3\n2,12,1,0\n");
  TimeSeriesFrame frame = ingest_csv(path, schema);
  CHECK(frame.labeled());
  CHECK(frame.label(1) == 3);
  CHECK(frame.is_missing(1, 0));
  CHECK_FALSE(frame.is_missing(0, 0));
  std::remove(path.c_str());
}

TEST_CASE("ingest_csv rejects schema violations") {
  Schema schema = two_var_schema();
  const std::string path = temp_path("bad");

  write_text(path, "t,LIT101\n0,10.5\n");  // missing P101
  CHECK_RAISES(ingest_csv(path, schema), Errc::SchemaMismatch);

  write_text(path, "t,LIT101,P101,extra\n0,10.5,1,9\n");
  CHECK_RAISES(ingest_csv(path, schema), Errc::SchemaMismatch);

  write_text(path, "t,LIT101,P101\n0,10.5,1\n0,11,0\n");
  CHECK_RAISES(ingest_csv(path, schema), Errc::NonMonotoneTimestamps);

  write_text(path, "t,LIT101,P101\n0,10.5,0.7\n");
  CHECK_RAISES(ingest_csv(path, schema), Errc::NonBinaryActuatorValue);

  CHECK_RAISES(ingest_csv("/nonexistent/file.csv", schema), Errc::IoError);
  std::remove(path.c_str());
}

TEST_CASE("ingest_csv coerces named actuator states") {
  Schema schema = two_var_schema();
  const std::string path = temp_path("states");
  write_text(path, "t,LIT101,P101\n0,1,open\n1,2,closed\n2,3,true\n3,4,off\n");
  TimeSeriesFrame frame = ingest_csv(path, schema);
  CHECK(frame.at(0, 1) == 1.0);
  CHECK(frame.at(1, 1) == 0.0);
  CHECK(frame.at(2, 1) == 1.0);
  CHECK(frame.at(3, 1) == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("ingest_csv maps active_states to 1 and other numerics to 0") {
  Schema schema = two_var_schema();
  schema.variables[1].active_states = {2.0, 3.0};
  const std::string path = temp_path("active");
  write_text(path, "t,LIT101,P101\n0,1,2\n1,2,3\n2,3,1\n");
  TimeSeriesFrame frame = ingest_csv(path, schema);
  CHECK(frame.at(0, 1) == 1.0);
  CHECK(frame.at(1, 1) == 1.0);
  CHECK(frame.at(2, 1) == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("csv roundtrip reproduces values bit-exactly") {
  auto frame = testutil::noise_frame(3, 50, 7);
  frame.set_missing(10, 1, true);
  std::vector<std::int32_t> labels(50, 0);
  labels[20] = 4;
  frame.set_labels(labels);

  Schema schema = schema_for(frame, true);
  CHECK(schema.label_column == "attack");
  const std::string path = temp_path("roundtrip");
  write_csv(frame, schema, path);
  TimeSeriesFrame back = ingest_csv(path, schema);

  REQUIRE(back.rows() == frame.rows());
  for (std::size_t t = 0; t < frame.rows(); ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) {
      if (frame.is_missing(t, i)) {
        CHECK(back.is_missing(t, i));
        continue;
      }
      CHECK(back.at(t, i) == frame.at(t, i));  // shortest round-trip formatting
    }
    CHECK(back.label(t) == frame.label(t));
  }
  std::remove(path.c_str());
}

TEST_CASE("schema json roundtrip") {
  Schema schema = two_var_schema();
  schema.label_column = "attack";
  schema.variables[1].active_states = {2.0};
  const std::string path = temp_path("schema");
  save_schema(schema, path);
  Schema back = load_schema(path);
  CHECK(back.timestamp_column == schema.timestamp_column);
  CHECK(back.label_column == schema.label_column);
  REQUIRE(back.variables.size() == 2);
  CHECK(back.variables[0].name == "LIT101");
  CHECK(back.variables[0].kind == VariableKind::ContinuousSensor);
  CHECK(back.variables[0].physical_class == PhysicalClass::Level);
  CHECK(back.variables[1].active_states == std::vector<double>{2.0});
  std::remove(path.c_str());
}
