// Free-format MPS emit/parse, primarily so models can be cross-checked with
// external solvers and so the round trip can be tested. Numerics use %.17g,
// which reproduces doubles exactly.
//
// parse_mps supports the sections this exporter writes (NAME, ROWS, COLUMNS
// with INTORG/INTEND markers, RHS, BOUNDS, ENDATA). RANGES is rejected.
#pragma once

#include <string>

#include "gridflex/lp.hpp"

namespace gridflex {

std::string to_mps(const MilpProblem& prob, const std::string& name = "model");
MilpProblem parse_mps(const std::string& text);

}  // namespace gridflex
