#include <CLI11.hpp>
#include <json.hpp>

#include "densalg/checks.hpp"

#include <fstream>
#include <iostream>

using namespace densalg;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string basename_of(const std::string& path) {
  size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

int load_manifest(const std::string& path, Manifest& out) {
  ManifestParse parsed = parse_manifest(read_file(path));
  if (!parsed.ok) {
    for (const auto& d : parsed.diagnostics)
      std::cerr << path << ":" << d.line << ": error: " << d.message << "\n";
    return 2;
  }
  out = std::move(parsed.manifest);
  return 0;
}

const ExtendedBracketData& need_data(const Manifest& m, const std::string& name) {
  auto it = m.bracket_data.find(name);
  if (it == m.bracket_data.end()) throw std::runtime_error("unknown bracketdata: " + name);
  return it->second;
}

const DiffOperator& need_operator(const Manifest& m, const std::string& name) {
  auto it = m.operators.find(name);
  if (it == m.operators.end()) throw std::runtime_error("unknown operator: " + name);
  return it->second;
}

nlohmann::json data_to_json(const ExtendedBracketData& d) {
  nlohmann::json j;
  const ChartPtr& c = d.chart();
  j["parity"] = parity_name(d.parity());
  j["S"] = nlohmann::json::object();
  for (int a = 0; a < c->size(); ++a)
    for (int b = 0; b < c->size(); ++b)
      if (!d.s.at(a, b).is_zero())
        j["S"][c->name(a) + "," + c->name(b)] = print_scalar(d.s.at(a, b));
  j["gamma"] = nlohmann::json::object();
  for (int a = 0; a < c->size(); ++a)
    if (!d.gamma[static_cast<size_t>(a)].is_zero())
      j["gamma"][c->name(a)] = print_scalar(d.gamma[static_cast<size_t>(a)]);
  j["theta"] = print_scalar(d.theta);
  return j;
}

nlohmann::json pencil_to_json(const OperatorPencil& p) {
  nlohmann::json j;
  j["delta0"] = print_operator(p.delta0);
  j["A"] = print_operator(p.a);
  j["B"] = print_operator(p.b);
  return j;
}

void print_expr_ast(const ExprPtr& e, std::ostream& os, int depth) {
  std::string pad(static_cast<size_t>(depth) * 2, ' ');
  using K = ExprNode::Kind;
  switch (e->kind) {
    case K::number: os << pad << "number " << rational_str(e->value) << "\n"; break;
    case K::symbol: os << pad << "symbol " << e->name << "\n"; break;
    case K::deriv: os << pad << "deriv " << e->name << "\n"; break;
    case K::momentum: os << pad << "momentum " << e->name << "\n"; break;
    case K::tvar: os << pad << "t\n"; break;
    case K::neg:
      os << pad << "neg\n";
      print_expr_ast(e->a, os, depth + 1);
      break;
    case K::pow:
      os << pad << "pow " << rational_str(e->value) << "\n";
      print_expr_ast(e->a, os, depth + 1);
      break;
    default: {
      const char* names[] = {"", "", "", "", "", "", "add", "sub", "mul", "div", ""};
      os << pad << names[static_cast<int>(e->kind)] << "\n";
      print_expr_ast(e->a, os, depth + 1);
      print_expr_ast(e->b, os, depth + 1);
    }
  }
}

int repl() {
  ChartPtr chart;
  std::string line;
  std::cout << "densalg repl; ':chart even(x) odd(xi)' to set a chart, ':quit' to leave\n";
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line == ":quit" || line == ":q") break;
    try {
      if (line.rfind(":chart", 0) == 0) {
        ManifestParse p = parse_manifest("chart repl_chart " + line.substr(6));
        if (!p.ok) {
          for (const auto& d : p.diagnostics) std::cout << "error: " << d.message << "\n";
          continue;
        }
        chart = p.manifest.charts.at("repl_chart");
        continue;
      }
      if (!chart) {
        std::cout << "set a chart first\n";
        continue;
      }
      if (line.rfind("op:", 0) == 0)
        std::cout << print_operator(eval_operator(parse_expression(line.substr(3)), chart))
                  << "\n";
      else if (line.rfind("mom:", 0) == 0)
        std::cout << print_momentum(
                         eval_momentum(parse_expression(line.substr(4)), PhaseSpace::of(chart)))
                  << "\n";
      else if (line.rfind("dens:", 0) == 0)
        std::cout << print_density(eval_density(parse_expression(line.substr(5)), chart)) << "\n";
      else
        std::cout << print_scalar(eval_scalar(parse_expression(line), chart)) << "\n";
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact checker for brackets, densities and operator pencils on supercharts"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run the checks of a manifest");
  std::string run_path, json_path;
  uint64_t seed_override = 0;
  bool has_seed = false;
  run->add_option("manifest", run_path, "manifest file")->required();
  auto* seed_opt = run->add_option("--seed", seed_override, "override the manifest seed");
  run->add_option("--json", json_path, "also write a JSON report");

  // parse
  auto* parse = app.add_subcommand("parse", "parse and reprint a manifest");
  std::string parse_path;
  bool dump_ast = false;
  parse->add_option("manifest", parse_path, "manifest file")->required();
  parse->add_flag("--ast", dump_ast, "dump expression trees of checks' objects");

  // repl
  auto* repl_cmd = app.add_subcommand("repl", "interactive expression evaluator");

  // pencil
  auto* pencil_cmd = app.add_subcommand("pencil", "operator pencil operations");
  pencil_cmd->require_subcommand(1);
  std::string p_manifest, p_data, p_op, p_weight = "2";
  auto* p_build = pencil_cmd->add_subcommand("build", "canonical pencil of bracket data");
  p_build->add_option("-m,--manifest", p_manifest)->required();
  p_build->add_option("--data", p_data)->required();
  auto* p_recover = pencil_cmd->add_subcommand("recover", "recover data from an operator");
  p_recover->add_option("-m,--manifest", p_manifest)->required();
  p_recover->add_option("--op", p_op)->required();
  p_recover->add_option("--weight", p_weight, "non-singular weight (default 2)");
  auto* p_check = pencil_cmd->add_subcommand("check-selfadjoint", "pencil self-adjointness");
  p_check->add_option("-m,--manifest", p_manifest)->required();
  p_check->add_option("--data", p_data)->required();

  // bv
  auto* bv_cmd = app.add_subcommand("bv", "odd-bracket geometry checks");
  bv_cmd->require_subcommand(1);
  std::string b_manifest, b_data, b_op, b_action, b_weight = "1/2";
  for (const char* name : {"jacobi", "flatness", "theorem3", "modular", "reduce", "master"}) {
    auto* sub = bv_cmd->add_subcommand(name, name);
    sub->add_option("-m,--manifest", b_manifest)->required();
    if (std::string(name) == "jacobi" || std::string(name) == "flatness")
      sub->add_option("--op", b_op)->required();
    else
      sub->add_option("--data", b_data)->required();
    if (std::string(name) == "master") {
      sub->add_option("--action", b_action)->required();
      sub->add_option("--weight", b_weight);
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Manifest m;
      int rc = load_manifest(run_path, m);
      if (rc) return rc;
      if (*seed_opt) {
        m.seed = seed_override;
        has_seed = true;
        (void)has_seed;
      }
      Report report = run_checks(m, basename_of(run_path));
      std::cout << report.to_text();
      if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        out << report.to_json();
      }
      return report.exit_code();
    }

    if (*parse) {
      Manifest m;
      int rc = load_manifest(parse_path, m);
      if (rc) return rc;
      std::cout << print_manifest(m);
      if (dump_ast) {
        for (const auto& decl : m.order) {
          if (decl.kind == "scalar") {
            std::cout << "ast scalar " << decl.name << "\n";
            print_expr_ast(parse_expression(print_scalar(m.scalars.at(decl.name))), std::cout, 1);
          } else if (decl.kind == "operator") {
            std::cout << "ast operator " << decl.name << "\n";
            print_expr_ast(parse_expression(print_operator(m.operators.at(decl.name))), std::cout,
                           1);
          }
        }
      }
      return 0;
    }

    if (*repl_cmd) return repl();

    if (*pencil_cmd) {
      Manifest m;
      int rc = load_manifest(p_manifest, m);
      if (rc) return rc;
      nlohmann::json j;
      if (*p_build) {
        j["pencil"] = pencil_to_json(canonical_pencil(need_data(m, p_data)));
      } else if (*p_recover) {
        Rational w0 = parse_rational(p_weight);
        ExtendedBracketData d = pencil_from_operator(need_operator(m, p_op), w0);
        j["data"] = data_to_json(d);
        j["weight"] = rational_str(w0);
      } else {
        SelfAdjointCertificate cert = check_selfadjoint(canonical_pencil(need_data(m, p_data)));
        j["pass"] = cert.pass;
        for (size_t i = 0; i < cert.probes.size(); ++i)
          j["defects"][rational_str(cert.probes[i])] = print_operator(cert.defects[i]);
        std::cout << j.dump(2) << "\n";
        return cert.pass ? 0 : 1;
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*bv_cmd) {
      Manifest m;
      int rc = load_manifest(b_manifest, m);
      if (rc) return rc;
      nlohmann::json j;
      int exit_code = 0;
      if (bv_cmd->got_subcommand("jacobi")) {
        JacobiBaseCertificate cert = jacobi_check_base(need_operator(m, b_op));
        if (!cert.agree || !cert.top_symbol_match) return 3;
        j["jacobi"] = cert.schouten_zero;
        j["order_d2"] = cert.order_d2;
        j["schouten"] = print_momentum(cert.schouten);
        exit_code = cert.schouten_zero ? 0 : 1;
      } else if (bv_cmd->got_subcommand("flatness")) {
        FlatnessCertificate cert = flatness_check(need_operator(m, b_op));
        if (!cert.agree) return 3;
        j["flat"] = cert.curvature_zero;
        j["curvature"] = print_momentum(cert.curvature_value);
        exit_code = cert.curvature_zero ? 0 : 1;
      } else if (bv_cmd->got_subcommand("theorem3")) {
        Theorem3Certificate cert = jacobi_check_densities(need_data(m, b_data), 10, m.seed);
        if (!cert.agree) return 3;
        j["jacobi"] = cert.four_hold;
        j["residuals"]["(S,S)"] = print_momentum(cert.r_ss);
        j["residuals"]["(S,gamma)"] = print_momentum(cert.r_sgamma);
        j["residuals"]["(S,theta)+(gamma,gamma)"] = print_momentum(cert.r_stheta_gg);
        j["residuals"]["(gamma,theta)"] = print_momentum(cert.r_gammatheta);
        exit_code = cert.four_hold ? 0 : 1;
      } else if (bv_cmd->got_subcommand("modular")) {
        const ExtendedBracketData& d = need_data(m, b_data);
        ModularFieldResult r = extract_modular_field(d);
        for (int a = 0; a < d.chart()->size(); ++a)
          j["X"][d.chart()->name(a)] = print_scalar(r.x[static_cast<size_t>(a)]);
        j["divergence"] = print_scalar(r.divergence);
        j["poisson_ok"] = r.poisson_ok;
      } else if (bv_cmd->got_subcommand("reduce")) {
        ReductionResult r = nondegenerate_reduction(need_data(m, b_data));
        const ExtendedBracketData& d = need_data(m, b_data);
        for (int a = 0; a < d.chart()->size(); ++a)
          j["gamma_lower"][d.chart()->name(a)] = print_scalar(r.gamma_lower[static_cast<size_t>(a)]);
        j["theta_ok"] = r.theta_ok;
        if (r.action) j["action"] = print_scalar(*r.action);
        exit_code = (r.theta_ok && r.potential_ok) ? 0 : 1;
      } else if (bv_cmd->got_subcommand("master")) {
        const ExtendedBracketData& d = need_data(m, b_data);
        OddPoissonStructure structure(d.s);
        auto it = m.scalars.find(b_action);
        if (it == m.scalars.end()) throw std::runtime_error("unknown scalar: " + b_action);
        MasterCertificate cert =
            master_equation_check(structure, EffectiveAction(it->second), parse_rational(b_weight));
        if (!cert.agree) return 3;
        j["master_equation"] = cert.operator_route;
        j["scalar"] = print_scalar(cert.scalar);
        exit_code = cert.operator_route ? 0 : 1;
      }
      std::cout << j.dump(2) << "\n";
      return exit_code;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Error::Code::internal_inconsistency ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
