#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "torusflow/field.hpp"

namespace torusflow {

/// Writes `x,y,<c1>,<c2>` rows, row-major over grid points (x slow), with 17
/// significant digits. Lines in `preamble` are emitted first as `# ` comments.
void write_snapshot(std::ostream& os, const VectorField& u, std::string_view c1 = "u1",
                    std::string_view c2 = "u2", std::string_view preamble = {});

/// Reads a snapshot written by write_snapshot; `#` lines are skipped and the
/// grid is inferred from the distinct coordinates. Throws std::runtime_error
/// on malformed input.
VectorField read_snapshot(std::istream& is);

}  // namespace torusflow
