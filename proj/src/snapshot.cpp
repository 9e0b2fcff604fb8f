#include "torusflow/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace torusflow {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_snapshot(std::ostream& os, const VectorField& u, std::string_view c1, std::string_view c2,
                    std::string_view preamble) {
  if (!preamble.empty()) {
    std::istringstream lines{std::string(preamble)};
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  }
  os << "x,y," << c1 << ',' << c2 << '\n';
  const TorusGrid& g = u.grid();
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      os << fmt17(g.x(i)) << ',' << fmt17(g.y(j)) << ',' << fmt17(u[0](i, j)) << ','
         << fmt17(u[1](i, j)) << '\n';
    }
  }
}

VectorField read_snapshot(std::istream& is) {
  std::string line;
  bool header = false;
  std::vector<double> xs, ys, a, b;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("x,y,", 0) != 0) throw std::runtime_error("snapshot: missing x,y header");
      header = true;
      continue;
    }
    std::istringstream row(line);
    double v[4];
    char comma;
    if (!(row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3]))
      throw std::runtime_error("snapshot: malformed row '" + line + "'");
    xs.push_back(v[0]);
    ys.push_back(v[1]);
    a.push_back(v[2]);
    b.push_back(v[3]);
  }
  if (xs.empty()) throw std::runtime_error("snapshot: no data rows");
  // Rows are x-major: ny equals the run length of the first x value.
  std::size_t ny = 0;
  while (ny < xs.size() && xs[ny] == xs[0]) ++ny;
  if (xs.size() % ny != 0) throw std::runtime_error("snapshot: row count is not a grid");
  const TorusGrid grid(static_cast<int>(xs.size() / ny), static_cast<int>(ny));
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const std::size_t k = grid.index(i, j);
      if (std::abs(xs[k] - grid.x(i)) > 1e-12 || std::abs(ys[k] - grid.y(j)) > 1e-12)
        throw std::runtime_error("snapshot: coordinates are not the uniform grid");
    }
  }
  return {ScalarField(grid, std::move(a)), ScalarField(grid, std::move(b))};
}

}  // namespace torusflow
