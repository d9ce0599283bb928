#include "densalg/checks.hpp"

#include <json.hpp>

#include <sstream>

namespace densalg {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::error: return "ERROR";
    case Verdict::internal: return "INTERNAL";
  }
  return "?";
}

int Report::exit_code() const {
  bool failed = false;
  for (const auto& r : results) {
    if (r.verdict == Verdict::internal) return 3;
    if (r.verdict != Verdict::pass) failed = true;
  }
  return failed ? 1 : 0;
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << "densalg report v1\n";
  os << "manifest: " << manifest_name << "\n";
  os << "seed: " << seed << "\n";
  int passed = 0, failed = 0, errors = 0, internal = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const CheckResult& r = results[i];
    os << "check " << (i + 1) << " " << r.kind;
    if (!r.params.empty()) os << " " << r.params;
    os << ": " << verdict_name(r.verdict) << "\n";
    for (const auto& d : r.details) os << "  " << d << "\n";
    switch (r.verdict) {
      case Verdict::pass: ++passed; break;
      case Verdict::fail: ++failed; break;
      case Verdict::error: ++errors; break;
      case Verdict::internal: ++internal; break;
    }
  }
  os << "summary: " << passed << " passed, " << failed << " failed, " << errors << " errors, "
     << internal << " internal\n";
  return os.str();
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["manifest"] = manifest_name;
  j["seed"] = seed;
  j["exit_code"] = exit_code();
  j["checks"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json c;
    c["kind"] = r.kind;
    c["params"] = r.params;
    c["verdict"] = verdict_name(r.verdict);
    c["details"] = r.details;
    j["checks"].push_back(c);
  }
  return j.dump(2) + "\n";
}

namespace {

struct CheckError {
  std::string message;
};

class Runner {
 public:
  Runner(const Manifest& m, Rng& rng) : m_(m), rng_(rng) {}

  CheckResult run(const Manifest::Check& chk) {
    CheckResult res;
    res.kind = chk.kind;
    {
      std::ostringstream ps;
      bool first = true;
      for (const auto& [k, v] : chk.args) {
        if (!first) ps << " ";
        ps << k << "=" << v;
        first = false;
      }
      res.params = ps.str();
    }
    try {
      dispatch(chk, res);
    } catch (const Error& e) {
      res.verdict = e.code() == Error::Code::internal_inconsistency ? Verdict::internal
                                                                    : Verdict::error;
      res.details.push_back(e.what());
    } catch (const CheckError& e) {
      res.verdict = Verdict::error;
      res.details.push_back(e.message);
    }
    return res;
  }

 private:
  const Manifest& m_;
  Rng& rng_;

  std::string arg(const Manifest::Check& chk, const std::string& key) const {
    auto it = chk.args.find(key);
    if (it == chk.args.end()) throw CheckError{"missing argument: " + key};
    return it->second;
  }

  std::string arg_or(const Manifest::Check& chk, const std::string& key,
                     const std::string& dflt) const {
    auto it = chk.args.find(key);
    return it == chk.args.end() ? dflt : it->second;
  }

  const DiffOperator& op(const Manifest::Check& chk, const std::string& key) const {
    auto it = m_.operators.find(arg(chk, key));
    if (it == m_.operators.end()) throw CheckError{"unknown operator: " + arg(chk, key)};
    return it->second;
  }

  const ExtendedBracketData& data(const Manifest::Check& chk, const std::string& key) const {
    auto it = m_.bracket_data.find(arg(chk, key));
    if (it == m_.bracket_data.end()) throw CheckError{"unknown bracketdata: " + arg(chk, key)};
    return it->second;
  }

  const GradedScalar& scalar(const Manifest::Check& chk, const std::string& key) const {
    auto it = m_.scalars.find(arg(chk, key));
    if (it == m_.scalars.end()) throw CheckError{"unknown scalar: " + arg(chk, key)};
    return it->second;
  }

  const CoordinateChange& change(const Manifest::Check& chk, const std::string& key) const {
    auto it = m_.changes.find(arg(chk, key));
    if (it == m_.changes.end()) throw CheckError{"unknown change: " + arg(chk, key)};
    return it->second;
  }

  void dispatch(const Manifest::Check& chk, CheckResult& res) {
    const std::string& kind = chk.kind;
    if (kind == "equal")
      check_equal(chk, res);
    else if (kind == "selfadjoint")
      check_selfadjoint_data(chk, res);
    else if (kind == "selfadjoint-suite")
      check_selfadjoint_suite(chk, res);
    else if (kind == "pencil-roundtrip")
      check_roundtrip(chk, res);
    else if (kind == "pencil-singular")
      check_singular(chk, res);
    else if (kind == "pencil-ambiguity")
      check_ambiguity(chk, res);
    else if (kind == "pencil-pullback")
      check_pencil_pullback(chk, res);
    else if (kind == "connection-law")
      check_connection_law(chk, res);
    else if (kind == "jacobi")
      check_jacobi(chk, res);
    else if (kind == "flatness")
      check_flatness(chk, res);
    else if (kind == "theorem3")
      check_theorem3(chk, res);
    else if (kind == "modular")
      check_modular(chk, res);
    else if (kind == "reduce")
      check_reduce(chk, res);
    else if (kind == "master")
      check_master(chk, res);
    else if (kind == "adjoint-certificate")
      check_adjoint_certificate(chk, res);
    else if (kind == "berezin-adjoint")
      check_berezin_adjoint(chk, res);
    else
      throw CheckError{"unknown check kind: " + kind};
  }

  void check_equal(const Manifest::Check& chk, CheckResult& res) {
    std::string le = arg(chk, "lhs"), ri = arg(chk, "rhs");
    bool equal = false;
    std::string ls, rs;
    if (m_.scalars.count(le) && m_.scalars.count(ri)) {
      equal = m_.scalars.at(le) == m_.scalars.at(ri);
      ls = print_scalar(m_.scalars.at(le));
      rs = print_scalar(m_.scalars.at(ri));
    } else if (m_.operators.count(le) && m_.operators.count(ri)) {
      equal = m_.operators.at(le) == m_.operators.at(ri);
      ls = print_operator(m_.operators.at(le));
      rs = print_operator(m_.operators.at(ri));
    } else if (m_.momenta.count(le) && m_.momenta.count(ri)) {
      equal = m_.momenta.at(le) == m_.momenta.at(ri);
      ls = print_momentum(m_.momenta.at(le));
      rs = print_momentum(m_.momenta.at(ri));
    } else if (m_.densities.count(le) && m_.densities.count(ri)) {
      equal = m_.densities.at(le) == m_.densities.at(ri);
      ls = print_density(m_.densities.at(le));
      rs = print_density(m_.densities.at(ri));
    } else {
      throw CheckError{"equal needs two objects of the same kind"};
    }
    res.verdict = equal ? Verdict::pass : Verdict::fail;
    if (!equal) {
      res.details.push_back("lhs = " + ls);
      res.details.push_back("rhs = " + rs);
    }
  }

  void check_selfadjoint_data(const Manifest::Check& chk, CheckResult& res) {
    OperatorPencil p = canonical_pencil(data(chk, "data"));
    SelfAdjointCertificate cert = check_selfadjoint(p);
    res.verdict = cert.pass ? Verdict::pass : Verdict::fail;
    if (!cert.pass)
      for (size_t i = 0; i < cert.probes.size(); ++i)
        if (!cert.defects[i].is_zero())
          res.details.push_back("defect at w=" + rational_str(cert.probes[i]) + ": " +
                                print_operator(cert.defects[i]));
  }

  void check_selfadjoint_suite(const Manifest::Check& chk, CheckResult& res) {
    auto it = m_.charts.find(arg(chk, "chart"));
    if (it == m_.charts.end()) throw CheckError{"unknown chart: " + arg(chk, "chart")};
    Parity parity = arg_or(chk, "parity", "even") == "odd" ? Parity::odd : Parity::even;
    int count = std::stoi(arg_or(chk, "count", "10"));
    int degree = std::stoi(arg_or(chk, "degree", "2"));
    res.verdict = Verdict::pass;
    for (int i = 0; i < count; ++i) {
      ExtendedBracketData d = random_bracket_data(rng_, it->second, parity, degree);
      SelfAdjointCertificate cert = check_selfadjoint(canonical_pencil(d));
      if (!cert.pass) {
        res.verdict = Verdict::fail;
        res.details.push_back("instance " + std::to_string(i) + " failed");
      }
    }
  }

  void check_roundtrip(const Manifest::Check& chk, CheckResult& res) {
    const ExtendedBracketData& d = data(chk, "data");
    Rational w0 = parse_rational(arg(chk, "weight"));
    OperatorPencil p = canonical_pencil(d);
    ExtendedBracketData back = pencil_from_operator(p.specialize(w0).op, w0);
    res.verdict = back == d ? Verdict::pass : Verdict::fail;
  }

  void check_singular(const Manifest::Check& chk, CheckResult& res) {
    const ExtendedBracketData& d = data(chk, "data");
    Rational w0 = parse_rational(arg(chk, "weight"));
    OperatorPencil p = canonical_pencil(d);
    try {
      pencil_from_operator(p.specialize(w0).op, w0);
      res.verdict = Verdict::fail;
      res.details.push_back("expected the singular-weight error");
    } catch (const Error& e) {
      res.verdict = e.code() == Error::Code::singular_weight ? Verdict::pass : Verdict::fail;
    }
  }

  void check_ambiguity(const Manifest::Check& chk, CheckResult& res) {
    const ExtendedBracketData& d = data(chk, "data");
    const GradedScalar& f = scalar(chk, "shift");
    ExtendedBracketData shifted(d.s, d.gamma, d.theta + f);
    OperatorPencil p1 = canonical_pencil(d);
    OperatorPencil p2 = canonical_pencil(shifted);
    bool same0 = p1.specialize(Rational(0)).op == p2.specialize(Rational(0)).op;
    bool same1 = p1.specialize(Rational(1)).op == p2.specialize(Rational(1)).op;
    bool differ = f.is_zero() || p1.specialize(Rational(2)).op != p2.specialize(Rational(2)).op;
    res.verdict = (same0 && same1 && differ) ? Verdict::pass : Verdict::fail;
  }

  void check_pencil_pullback(const Manifest::Check& chk, CheckResult& res) {
    const ExtendedBracketData& d = data(chk, "data");
    const CoordinateChange& ch = change(chk, "change");
    OperatorPencil p = canonical_pencil(d);
    OperatorPencil moved = pencil_pullback(p, ch);
    res.verdict = Verdict::pass;
    for (Rational w : {Rational(0), Rational(1), Rational(1, 2), Rational(-2), Rational(3)}) {
      DiffOperator direct = weighted_pullback(p.specialize(w).op, w, ch);
      if (!(moved.specialize(w).op == direct)) {
        res.verdict = Verdict::fail;
        res.details.push_back("mismatch at w=" + rational_str(w));
      }
    }
  }

  void check_connection_law(const Manifest::Check& chk, CheckResult& res) {
    ConnectionLawCertificate cert = verify_connection_law(op(chk, "op"), change(chk, "change"));
    res.verdict = cert.equal ? Verdict::pass : Verdict::fail;
    if (!cert.equal)
      for (size_t i = 0; i < cert.difference.size(); ++i)
        if (!cert.difference[i].is_zero())
          res.details.push_back("component " + std::to_string(i) + " difference: " +
                                print_scalar(cert.difference[i]));
  }

  void check_jacobi(const Manifest::Check& chk, CheckResult& res) {
    JacobiBaseCertificate cert = jacobi_check_base(op(chk, "op"));
    if (!cert.agree || !cert.top_symbol_match) {
      res.verdict = Verdict::internal;
      res.details.push_back("order and Schouten predicates disagree");
      return;
    }
    res.verdict = cert.schouten_zero ? Verdict::pass : Verdict::fail;
    if (!cert.schouten_zero)
      res.details.push_back("(S,S) = " + print_momentum(cert.schouten));
  }

  void check_flatness(const Manifest::Check& chk, CheckResult& res) {
    FlatnessCertificate cert = flatness_check(op(chk, "op"));
    if (!cert.agree) {
      res.verdict = Verdict::internal;
      res.details.push_back("three flatness predicates disagree");
      return;
    }
    res.verdict = cert.curvature_zero ? Verdict::pass : Verdict::fail;
    if (!cert.curvature_zero)
      res.details.push_back("curvature = " + print_momentum(cert.curvature_value));
  }

  void check_theorem3(const Manifest::Check& chk, CheckResult& res) {
    bool exhaustive = arg_or(chk, "exhaustive", "0") == "1";
    Theorem3Certificate cert = jacobi_check_densities(data(chk, "data"), 10, m_.seed, exhaustive);
    if (!cert.agree) {
      res.verdict = Verdict::internal;
      res.details.push_back("four-equation verdict disagrees with the direct Jacobi test");
      return;
    }
    res.verdict = cert.four_hold ? Verdict::pass : Verdict::fail;
    if (!cert.four_hold) {
      if (!cert.eq_ss) res.details.push_back("(S,S) = " + print_momentum(cert.r_ss));
      if (!cert.eq_sgamma) res.details.push_back("(S,gamma) = " + print_momentum(cert.r_sgamma));
      if (!cert.eq_stheta_gg)
        res.details.push_back("(S,theta)+(gamma,gamma) = " + print_momentum(cert.r_stheta_gg));
      if (!cert.eq_gammatheta)
        res.details.push_back("(gamma,theta) = " + print_momentum(cert.r_gammatheta));
    }
  }

  void check_modular(const Manifest::Check& chk, CheckResult& res) {
    ModularFieldResult r = extract_modular_field(data(chk, "data"));
    res.verdict = r.poisson_ok && r.divergence_matches_formula ? Verdict::pass : Verdict::internal;
    const ChartPtr& chart = data(chk, "data").chart();
    for (int a = 0; a < chart->size(); ++a)
      res.details.push_back("X^" + chart->name(a) + " = " +
                            print_scalar(r.x[static_cast<size_t>(a)]));
  }

  void check_reduce(const Manifest::Check& chk, CheckResult& res) {
    ReductionResult r = nondegenerate_reduction(data(chk, "data"));
    res.verdict = r.theta_ok && r.potential_ok ? Verdict::pass : Verdict::fail;
    if (r.action) res.details.push_back("action = " + print_scalar(*r.action));
  }

  void check_master(const Manifest::Check& chk, CheckResult& res) {
    const ExtendedBracketData& d = data(chk, "data");
    OddPoissonStructure structure(d.s);
    EffectiveAction action(scalar(chk, "action"));
    Rational w = parse_rational(arg_or(chk, "weight", "1/2"));
    MasterCertificate cert = master_equation_check(structure, action, w);
    if (!cert.agree) {
      res.verdict = Verdict::internal;
      res.details.push_back("operator and conjugation-scalar routes disagree");
      return;
    }
    res.verdict = cert.operator_route ? Verdict::pass : Verdict::fail;
    if (!cert.operator_route)
      res.details.push_back("master scalar = " + print_scalar(cert.scalar));
  }

  void check_adjoint_certificate(const Manifest::Check& chk, CheckResult& res) {
    const DiffOperator& d = op(chk, "op");
    AdjointCertificate cert = adjoint_certificate(d, scalar(chk, "psi"), scalar(chk, "chi"));
    res.verdict = cert.verified ? Verdict::pass : Verdict::fail;
    if (!cert.verified) {
      res.details.push_back("integrand = " + print_scalar(cert.lhs));
      res.details.push_back("divergence = " + print_scalar(cert.divergence));
    }
  }

  void check_berezin_adjoint(const Manifest::Check& chk, CheckResult& res) {
    const DiffOperator& d = op(chk, "op");
    const ChartPtr& chart = d.chart();
    if (chart->n_even() != 0) throw CheckError{"berezin-adjoint needs a purely odd chart"};
    auto parity = d.parity();
    if (!parity) throw CheckError{"berezin-adjoint needs a homogeneous operator"};
    DiffOperator adj = formal_adjoint(WeightedOperator{d, Rational(1, 2)}).op;
    res.verdict = Verdict::pass;
    int eps = parity_bit(*parity);
    for (uint32_t a = 0; a < (1u << chart->n_odd()); ++a) {
      GradedScalar psi =
          GradedScalar::term(chart, a, RationalFunction::constant(0, Rational(1)));
      int psip = parity_bit(*psi.parity());
      for (uint32_t b = 0; b < (1u << chart->n_odd()); ++b) {
        GradedScalar chi =
            GradedScalar::term(chart, b, RationalFunction::constant(0, Rational(1)));
        Rational lhs = berezin_integral(d.apply(psi) * chi);
        Rational rhs = berezin_integral(psi * adj.apply(chi));
        if (eps && psip) rhs = -rhs;
        if (lhs != rhs) res.verdict = Verdict::fail;
      }
    }
  }
};

}  // namespace

Report run_checks(const Manifest& m, const std::string& manifest_name) {
  Report report;
  report.manifest_name = manifest_name;
  report.seed = m.seed;
  Rng rng(m.seed);
  Runner runner(m, rng);
  for (const auto& chk : m.checks) report.results.push_back(runner.run(chk));
  return report;
}

}  // namespace densalg
