#include "causaltwin/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "causaltwin/error.hpp"

namespace causaltwin {

using nlohmann::json;

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open schema file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    raise(Errc::ParseError, std::string("schema json: ") + e.what());
  }
  Schema schema;
  schema.timestamp_column = doc.value("timestamp_column", std::string("t"));
  schema.label_column = doc.value("label_column", std::string());
  if (doc.contains("delimiter")) {
    const std::string d = doc["delimiter"].get<std::string>();
    require(d.size() == 1, Errc::ParseError, "delimiter must be one character");
    schema.delimiter = d[0];
  }
  require(doc.contains("variables") && doc["variables"].is_array(), Errc::ParseError,
          "schema json needs a variables array");
  for (const auto& v : doc["variables"]) {
    VariableMeta meta;
    meta.name = v.at("name").get<std::string>();
    meta.kind = kind_from_name(v.value("kind", std::string("continuous")));
    meta.physical_class = class_from_name(v.value("class", std::string("Other")));
    meta.stage = v.value("stage", 1);
    if (v.contains("active_states")) {
      for (const auto& s : v["active_states"]) meta.active_states.push_back(s.get<double>());
    }
    schema.variables.push_back(std::move(meta));
  }
  return schema;
}

void save_schema(const Schema& schema, const std::string& path) {
  json doc;
  doc["timestamp_column"] = schema.timestamp_column;
  if (!schema.label_column.empty()) doc["label_column"] = schema.label_column;
  doc["delimiter"] = std::string(1, schema.delimiter);
  json vars = json::array();
  for (const auto& v : schema.variables) {
    json entry;
    entry["name"] = v.name;
    entry["kind"] = kind_name(v.kind);
    entry["class"] = class_name(v.physical_class);
    entry["stage"] = v.stage;
    if (!v.active_states.empty()) entry["active_states"] = v.active_states;
    vars.push_back(std::move(entry));
  }
  doc["variables"] = std::move(vars);
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot write schema file " + path);
  out << doc.dump(2) << "\n";
}

namespace {

void split_line(std::string_view line, char delim, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(std::string_view cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  require(ec == std::errc() && ptr == end, Errc::ParseError,
          "bad numeric cell '" + std::string(cell) + "' in column " + column + " row " +
              std::to_string(row));
  return value;
}

double coerce_binary(std::string_view cell, const VariableMeta& meta, std::size_t row) {
  if (cell == "0" || cell == "false" || cell == "closed" || cell == "off") return 0.0;
  if (cell == "1" || cell == "true" || cell == "open" || cell == "on") return 1.0;
  double raw = 0.0;
  const char* begin = cell.data();
  auto [ptr, ec] = std::from_chars(begin, begin + cell.size(), raw);
  const bool numeric = ec == std::errc() && ptr == begin + cell.size();
  require(numeric, Errc::NonBinaryActuatorValue,
          "variable '" + meta.name + "' holds '" + std::string(cell) + "' at row " +
              std::to_string(row));
  if (!meta.active_states.empty()) {
    const bool active =
        std::find(meta.active_states.begin(), meta.active_states.end(), raw) !=
        meta.active_states.end();
    return active ? 1.0 : 0.0;
  }
  require(raw == 0.0 || raw == 1.0, Errc::NonBinaryActuatorValue,
          "variable '" + meta.name + "' holds " + std::string(cell) + " at row " +
              std::to_string(row) + " and declares no active states");
  return raw;
}

}  // namespace

TimeSeriesFrame ingest_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open csv file " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<std::string_view> lines;
  {
    std::string_view rest(content);
    while (!rest.empty()) {
      std::size_t pos = rest.find('\n');
      std::string_view line = pos == std::string_view::npos ? rest : rest.substr(0, pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) lines.push_back(line);
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  }
  require(!lines.empty(), Errc::ParseError, "csv file " + path + " is empty");

  std::vector<std::string_view> header;
  split_line(lines[0], schema.delimiter, header);

  const std::size_t n = schema.variables.size();
  // Map each declared column to its position in the header.
  int ts_col = -1;
  int label_col = -1;
  std::vector<int> var_col(n, -1);
  std::vector<bool> claimed(header.size(), false);
  for (std::size_t h = 0; h < header.size(); ++h) {
    const std::string name(header[h]);
    if (name == schema.timestamp_column) {
      require(ts_col < 0, Errc::SchemaMismatch, "duplicate timestamp column");
      ts_col = static_cast<int>(h);
      claimed[h] = true;
      continue;
    }
    if (!schema.label_column.empty() && name == schema.label_column) {
      require(label_col < 0, Errc::SchemaMismatch, "duplicate label column");
      label_col = static_cast<int>(h);
      claimed[h] = true;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (schema.variables[i].name == name) {
        require(var_col[i] < 0, Errc::SchemaMismatch, "duplicate column '" + name + "'");
        var_col[i] = static_cast<int>(h);
        claimed[h] = true;
        break;
      }
    }
  }
  require(ts_col >= 0, Errc::SchemaMismatch,
          "timestamp column '" + schema.timestamp_column + "' not found");
  require(schema.label_column.empty() || label_col >= 0, Errc::SchemaMismatch,
          "label column '" + schema.label_column + "' not found");
  for (std::size_t i = 0; i < n; ++i) {
    require(var_col[i] >= 0, Errc::SchemaMismatch,
            "declared variable '" + schema.variables[i].name + "' not found in header");
  }
  for (std::size_t h = 0; h < header.size(); ++h) {
    require(claimed[h], Errc::SchemaMismatch,
            "column '" + std::string(header[h]) + "' is not declared in the schema");
  }

  const std::size_t rows = lines.size() - 1;
  require(rows > 0, Errc::ParseError, "csv file has a header but no rows");

  std::vector<std::int64_t> timestamps(rows);
  std::vector<double> values(rows * n, 0.0);
  std::vector<std::uint8_t> missing;
  std::vector<std::int32_t> labels;
  if (label_col >= 0) labels.resize(rows, 0);

  std::vector<std::string_view> cells;
  for (std::size_t r = 0; r < rows; ++r) {
    split_line(lines[r + 1], schema.delimiter, cells);
    require(cells.size() == header.size(), Errc::ParseError,
            "row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                " cells, expected " + std::to_string(header.size()));

    {
      const std::string_view cell = cells[static_cast<std::size_t>(ts_col)];
      std::int64_t ts = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), ts);
      require(ec == std::errc() && ptr == cell.data() + cell.size(), Errc::ParseError,
              "bad timestamp '" + std::string(cell) + "' at row " + std::to_string(r));
      timestamps[r] = ts;
    }
    if (label_col >= 0) {
      const std::string_view cell = cells[static_cast<std::size_t>(label_col)];
      std::int32_t label = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
      require(ec == std::errc() && ptr == cell.data() + cell.size(), Errc::ParseError,
              "bad label '" + std::string(cell) + "' at row " + std::to_string(r));
      labels[r] = label;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::string_view cell = cells[static_cast<std::size_t>(var_col[i])];
      if (cell.empty()) {
        if (missing.empty()) missing.assign(rows * n, 0);
        missing[r * n + i] = 1;
        continue;
      }
      values[r * n + i] = schema.variables[i].kind == VariableKind::BinaryActuator
                              ? coerce_binary(cell, schema.variables[i], r)
                              : parse_number(cell, r, schema.variables[i].name);
    }
  }

  return TimeSeriesFrame(schema.variables, std::move(timestamps), std::move(values),
                         std::move(missing), std::move(labels));
}

void write_csv(const TimeSeriesFrame& frame, const Schema& schema, const std::string& path) {
  require(schema.variables.size() == frame.cols(), Errc::SchemaMismatch,
          "schema variable count does not match frame");
  std::FILE* out = std::fopen(path.c_str(), "wb");
  require(out != nullptr, Errc::IoError, "cannot write csv file " + path);

  std::string buffer;
  buffer.reserve(1 << 20);
  buffer += schema.timestamp_column;
  for (const auto& v : schema.variables) {
    buffer += schema.delimiter;
    buffer += v.name;
  }
  const bool labeled = !schema.label_column.empty() && frame.labeled();
  if (labeled) {
    buffer += schema.delimiter;
    buffer += schema.label_column;
  }
  buffer += '\n';

  char scratch[64];
  for (std::size_t t = 0; t < frame.rows(); ++t) {
    {
      auto [ptr, ec] = std::to_chars(scratch, scratch + sizeof scratch, frame.timestamps()[t]);
      buffer.append(scratch, ptr);
    }
    for (std::size_t i = 0; i < frame.cols(); ++i) {
      buffer += schema.delimiter;
      if (frame.is_missing(t, i)) continue;
      const double v = frame.at(t, i);
      if (frame.meta()[i].kind == VariableKind::BinaryActuator) {
        buffer += v == 0.0 ? '0' : '1';
      } else {
        auto [ptr, ec] = std::to_chars(scratch, scratch + sizeof scratch, v);
        buffer.append(scratch, ptr);
      }
    }
    if (labeled) {
      buffer += schema.delimiter;
      auto [ptr, ec] = std::to_chars(scratch, scratch + sizeof scratch, frame.label(t));
      buffer.append(scratch, ptr);
    }
    buffer += '\n';
    if (buffer.size() > (1 << 20)) {
      std::fwrite(buffer.data(), 1, buffer.size(), out);
      buffer.clear();
    }
  }
  if (!buffer.empty()) std::fwrite(buffer.data(), 1, buffer.size(), out);
  std::fclose(out);
}

Schema schema_for(const TimeSeriesFrame& frame, bool labeled) {
  Schema schema;
  schema.variables = frame.meta();
  if (labeled) schema.label_column = "attack";
  return schema;
}

}  // namespace causaltwin
