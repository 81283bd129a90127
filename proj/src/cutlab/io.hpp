#pragma once

#include <string>

#include "milp.hpp"

namespace cutlab {

// Instance JSON schema:
//   {"name", "sense", "objective":[float], "rows":[{"coeffs":[[idx,val]],
//    "rhs":float}], "lower":[float|null], "upper":[float|null],
//    "integrality":[idx], "family":text}
// plus an optional "generator_version" integer on generated instances.
// JSON rows carry no relation marker; serialized rows must be in "<=" form.
MilpInstance read_json_instance(const std::string& text);
std::string write_json_instance(const MilpInstance& instance);

// Fixed-format MPS subset: NAME, ROWS (N/L/G/E), COLUMNS with INTORG/INTEND
// markers, RHS, RANGES, BOUNDS (UP/LO/FX/FR/MI/PL/BV/UI/LI), ENDATA.
// Anything else raises UnsupportedMpsFeature.
MilpInstance read_mps_instance(const std::string& text);

// File-level helpers; format chosen by extension (.json / .mps) or forced.
MilpInstance load_instance_file(const std::string& path,
                                const std::string& format = "auto");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cutlab
