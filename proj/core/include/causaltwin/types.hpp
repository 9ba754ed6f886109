#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace causaltwin {

enum class VariableKind { ContinuousSensor, BinaryActuator };

enum class PhysicalClass { Flow, Level, Pressure, ChemicalAnalyzer, Pump, Valve, Controller, Other };

const char* kind_name(VariableKind kind);
const char* class_name(PhysicalClass cls);
VariableKind kind_from_name(const std::string& name);
PhysicalClass class_from_name(const std::string& name);

struct VariableMeta {
  std::string name;
  VariableKind kind = VariableKind::ContinuousSensor;
  PhysicalClass physical_class = PhysicalClass::Other;
  int stage = 1;
  // Raw source states mapped to 1 when coercing a multi-state actuator
  // column to binary. Empty means the column must already be 0/1-coded.
  std::vector<double> active_states;
};

}  // namespace causaltwin
