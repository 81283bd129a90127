#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutlab/common.hpp"
#include "cutlab/milp.hpp"

namespace cutlab {

enum class Family { MaxCut, Packing, BinPacking, Planning };

struct UnknownFamily : CutlabError {
  using CutlabError::CutlabError;
};
struct InvalidGenSpec : CutlabError {
  using CutlabError::CutlabError;
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// What to generate. Per-family size knobs default to the benchmark sizes;
// every instance is derived from an independent child seed, so the list is
// reproducible element-wise.
struct GenSpec {
  Family family = Family::BinPacking;
  uint64_t seed = 0;
  int count = 1;

  int maxcut_vertices = 14;
  int maxcut_edges = 40;
  int packing_rows = 60;
  int packing_vars = 60;
  int binpacking_rows = 66;
  int binpacking_vars = 66;
  int planning_periods = 40;
};

// Normalized, feasible, bounded instances with family_tag, generator_version
// and a deterministic name set. Throws InvalidGenSpec on nonsensical sizes.
std::vector<MilpInstance> generate(const GenSpec& spec);

// Single instance for (spec, index); generate() is a loop over this.
MilpInstance generate_one(const GenSpec& spec, int index);

}  // namespace cutlab
