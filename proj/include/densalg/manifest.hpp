#pragma once

#include "densalg/bv.hpp"
#include "densalg/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace densalg {

struct Diagnostic {
  int line = 0;
  std::string message;
};

/// Line-oriented description of charts, named objects and checks.
/// Declarations keep their order for canonical printing and reporting.
struct Manifest {
  uint64_t seed = 0;
  std::map<std::string, ChartPtr> charts;
  std::map<std::string, GradedScalar> scalars;
  std::map<std::string, DiffOperator> operators;
  std::map<std::string, MomentumPolynomial> momenta;
  std::map<std::string, std::string> momentum_charts;  // name -> base chart name
  std::map<std::string, DensityElement> densities;
  std::map<std::string, CoordinateChange> changes;
  std::map<std::string, ExtendedBracketData> bracket_data;

  struct Check {
    int line = 0;
    std::string kind;
    std::map<std::string, std::string> args;
  };
  std::vector<Check> checks;

  struct Decl {
    std::string kind;  // chart/scalar/operator/momentum/density/change/bracketdata
    std::string name;
  };
  std::vector<Decl> order;

  std::string chart_name(const ChartPtr& chart) const;
};

struct ManifestParse {
  bool ok = false;
  Manifest manifest;
  std::vector<Diagnostic> diagnostics;
};

ManifestParse parse_manifest(std::string_view text);

/// Canonical text; parse(print(m)) reproduces m.
std::string print_manifest(const Manifest& m);

}  // namespace densalg
