#pragma once

#include <string>
#include <vector>

#include "causaltwin/frame.hpp"
#include "causaltwin/types.hpp"

namespace causaltwin {

// Column layout contract for a CSV stream: timestamp column, declared
// variables, and an optional integer label column (0 = normal, k = attack id).
struct Schema {
  std::string timestamp_column = "t";
  std::string label_column;  // empty = unlabeled
  char delimiter = ',';
  std::vector<VariableMeta> variables;
};

Schema load_schema(const std::string& path);
void save_schema(const Schema& schema, const std::string& path);

// Parses a CSV file against the schema. Header must contain exactly the
// timestamp column, every declared variable, and (when declared) the label
// column; order is taken from the header. Empty cells become missing values.
// Binary actuator columns accept 0/1, true/false, open/closed, on/off, or any
// numeric state listed in active_states (mapped to 1, other numerics to 0).
TimeSeriesFrame ingest_csv(const std::string& path, const Schema& schema);

// Writes a frame in the same layout (timestamp, variables, optional labels).
// Missing cells are written as empty fields.
void write_csv(const TimeSeriesFrame& frame, const Schema& schema, const std::string& path);

Schema schema_for(const TimeSeriesFrame& frame, bool labeled);

}  // namespace causaltwin
