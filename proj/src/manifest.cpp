#include "densalg/manifest.hpp"

#include <algorithm>
#include <sstream>

namespace densalg {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct LineParser {
  ManifestParse& out;
  int line;

  void error(const std::string& msg) { out.diagnostics.push_back({line, msg}); }

  ChartPtr find_chart(const std::string& name) {
    auto it = out.manifest.charts.find(name);
    if (it == out.manifest.charts.end()) {
      error("unknown chart: " + name);
      return nullptr;
    }
    return it->second;
  }

  bool name_taken(const std::string& name) {
    const Manifest& m = out.manifest;
    bool taken = m.charts.count(name) || m.scalars.count(name) || m.operators.count(name) ||
                 m.momenta.count(name) || m.densities.count(name) || m.changes.count(name) ||
                 m.bracket_data.count(name);
    if (taken) error("name already declared: " + name);
    return taken;
  }
};

// "even(x, y)" -> list of names
bool parse_coord_group(const std::string& text, const std::string& keyword,
                       std::vector<std::string>& names, std::string& err) {
  std::string t = trim(text);
  if (t.substr(0, keyword.size()) != keyword) {
    err = "expected '" + keyword + "(...)'";
    return false;
  }
  t = trim(t.substr(keyword.size()));
  if (t.empty() || t.front() != '(' || t.back() != ')') {
    err = "expected '(' names ')' after " + keyword;
    return false;
  }
  std::string inner = trim(t.substr(1, t.size() - 2));
  if (inner.empty()) return true;
  for (const auto& n : split(inner, ',')) {
    if (!valid_name(n)) {
      err = "bad coordinate name: '" + n + "'";
      return false;
    }
    names.push_back(n);
  }
  return true;
}

}  // namespace

std::string Manifest::chart_name(const ChartPtr& chart) const {
  for (const auto& [name, c] : charts)
    if (c == chart) return name;
  return "?";
}

ManifestParse parse_manifest(std::string_view text) {
  ManifestParse result;
  Manifest& m = result.manifest;

  // bracketdata assembly state, applied at end of each declaration
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    lines.push_back(cur);
  }

  for (int ln = 0; ln < static_cast<int>(lines.size()); ++ln) {
    LineParser lp{result, ln + 1};
    std::string raw = lines[static_cast<size_t>(ln)];
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    std::istringstream is(line);
    std::string kw;
    is >> kw;
    std::string rest = trim(line.substr(kw.size()));

    try {
      if (kw == "seed") {
        m.seed = std::stoull(rest);
      } else if (kw == "chart") {
        std::istringstream rs(rest);
        std::string name;
        rs >> name;
        if (!valid_name(name)) {
          lp.error("bad chart name: '" + name + "'");
          continue;
        }
        if (lp.name_taken(name)) continue;
        std::string tail = trim(rest.substr(name.size()));
        size_t odd_pos = tail.find("odd");
        if (odd_pos == std::string::npos) {
          lp.error("chart needs 'even(...) odd(...)'");
          continue;
        }
        std::vector<std::string> evens, odds;
        std::string err;
        if (!parse_coord_group(tail.substr(0, odd_pos), "even", evens, err) ||
            !parse_coord_group(tail.substr(odd_pos), "odd", odds, err)) {
          lp.error(err);
          continue;
        }
        if (static_cast<int>(odds.size()) > 8) {
          lp.error("odd dimension exceeds the supported cap of 8");
          continue;
        }
        std::vector<std::pair<std::string, Parity>> coords;
        for (const auto& n : evens) coords.push_back({n, Parity::even});
        for (const auto& n : odds) coords.push_back({n, Parity::odd});
        m.charts.emplace(name, Chart::make(coords));
        m.order.push_back({"chart", name});
      } else if (kw == "scalar" || kw == "operator" || kw == "momentum" || kw == "density") {
        std::istringstream rs(rest);
        std::string name, on, chart_name;
        rs >> name >> on >> chart_name;
        if (!valid_name(name) || on != "on") {
          lp.error("expected '" + kw + " <name> on <chart> = <expr>'");
          continue;
        }
        if (lp.name_taken(name)) continue;
        ChartPtr chart = lp.find_chart(chart_name);
        if (!chart) continue;
        size_t eq = rest.find('=');
        if (eq == std::string::npos) {
          lp.error("missing '=' in declaration");
          continue;
        }
        std::string expr_text = rest.substr(eq + 1);
        ExprPtr ast = parse_expression(expr_text);
        if (kw == "scalar")
          m.scalars.emplace(name, eval_scalar(ast, chart));
        else if (kw == "operator")
          m.operators.emplace(name, eval_operator(ast, chart));
        else if (kw == "momentum") {
          PhaseSpace ps = PhaseSpace::of(chart);
          MomentumPolynomial v = eval_momentum(ast, ps);
          ps.validate(v);
          m.momenta.emplace(name, v);
          m.momentum_charts.emplace(name, chart_name);
        } else {
          m.densities.emplace(name, eval_density(ast, chart));
        }
        m.order.push_back({kw, name});
      } else if (kw == "change") {
        // change NAME from A to B : y1 = e1 ; ... [ inverse x1 = e1' ; ... ]
        std::istringstream rs(rest);
        std::string name, from_kw, src_name, to_kw, tgt_name;
        rs >> name >> from_kw >> src_name >> to_kw >> tgt_name;
        if (!valid_name(name) || from_kw != "from" || to_kw != "to") {
          lp.error("expected 'change <name> from <chart> to <chart> : ...'");
          continue;
        }
        if (lp.name_taken(name)) continue;
        ChartPtr src = lp.find_chart(src_name);
        ChartPtr tgt = lp.find_chart(tgt_name);
        if (!src || !tgt) continue;
        size_t colon = rest.find(':');
        if (colon == std::string::npos) {
          lp.error("missing ':' in change declaration");
          continue;
        }
        std::string body = rest.substr(colon + 1);
        std::optional<std::string> inverse_body;
        size_t invpos = body.find("inverse");
        if (invpos != std::string::npos) {
          inverse_body = trim(body.substr(invpos + 7));
          body = trim(body.substr(0, invpos));
        }
        auto parse_assignments = [&](const std::string& txt, const ChartPtr& to_chart,
                                     const ChartPtr& over) -> std::optional<std::vector<GradedScalar>> {
          std::vector<GradedScalar> images(static_cast<size_t>(to_chart->size()),
                                           GradedScalar(over));
          std::vector<bool> seen(static_cast<size_t>(to_chart->size()), false);
          for (const auto& part : split(txt, ';')) {
            if (part.empty()) continue;
            size_t eq = part.find('=');
            if (eq == std::string::npos) {
              lp.error("missing '=' in change assignment '" + part + "'");
              return std::nullopt;
            }
            std::string coord = trim(part.substr(0, eq));
            int idx = to_chart->index_of(coord);
            if (idx < 0) {
              lp.error("unknown coordinate in change: " + coord);
              return std::nullopt;
            }
            images[static_cast<size_t>(idx)] = eval_scalar(parse_expression(part.substr(eq + 1)), over);
            seen[static_cast<size_t>(idx)] = true;
          }
          for (int i = 0; i < to_chart->size(); ++i)
            if (!seen[static_cast<size_t>(i)]) {
              lp.error("change misses an image for " + to_chart->name(i));
              return std::nullopt;
            }
          return images;
        };
        auto fwd = parse_assignments(body, tgt, src);
        if (!fwd) continue;
        std::optional<std::vector<GradedScalar>> inv;
        if (inverse_body) {
          auto iv = parse_assignments(*inverse_body, src, tgt);
          if (!iv) continue;
          inv = std::move(*iv);
        }
        m.changes.emplace(name, CoordinateChange(src, tgt, std::move(*fwd), std::move(inv)));
        m.order.push_back({"change", name});
      } else if (kw == "bracketdata") {
        // bracketdata NAME on C parity odd : S[a][b] = e ; gamma[a] = e ; theta = e
        std::istringstream rs(rest);
        std::string name, on, chart_name, parity_kw, parity_val;
        rs >> name >> on >> chart_name >> parity_kw >> parity_val;
        if (!valid_name(name) || on != "on" || parity_kw != "parity" ||
            (parity_val != "even" && parity_val != "odd")) {
          lp.error("expected 'bracketdata <name> on <chart> parity <even|odd> : ...'");
          continue;
        }
        if (lp.name_taken(name)) continue;
        ChartPtr chart = lp.find_chart(chart_name);
        if (!chart) continue;
        Parity eps = parity_val == "odd" ? Parity::odd : Parity::even;
        size_t colon = rest.find(':');
        if (colon == std::string::npos) {
          lp.error("missing ':' in bracketdata declaration");
          continue;
        }
        Bracket s = Bracket::zero(chart, eps);
        std::vector<std::vector<bool>> assigned(
            static_cast<size_t>(chart->size()),
            std::vector<bool>(static_cast<size_t>(chart->size()), false));
        std::vector<GradedScalar> gamma(static_cast<size_t>(chart->size()), GradedScalar(chart));
        GradedScalar theta(chart);
        bool bad = false;
        for (const auto& part : split(rest.substr(colon + 1), ';')) {
          if (part.empty()) continue;
          size_t eq = part.find('=');
          if (eq == std::string::npos) {
            lp.error("missing '=' in bracketdata entry '" + part + "'");
            bad = true;
            break;
          }
          std::string key = trim(part.substr(0, eq));
          GradedScalar value = eval_scalar(parse_expression(part.substr(eq + 1)), chart);
          if (key == "theta") {
            theta = value;
          } else if (key.rfind("gamma[", 0) == 0 && key.back() == ']') {
            std::string cn = key.substr(6, key.size() - 7);
            int idx = chart->index_of(trim(cn));
            if (idx < 0) {
              lp.error("unknown coordinate in gamma component: " + cn);
              bad = true;
              break;
            }
            gamma[static_cast<size_t>(idx)] = value;
          } else if (key.rfind("S[", 0) == 0 && key.back() == ']') {
            size_t mid = key.find("][");
            if (mid == std::string::npos) {
              lp.error("bad S component key: " + key);
              bad = true;
              break;
            }
            std::string an = trim(key.substr(2, mid - 2));
            std::string bn = trim(key.substr(mid + 2, key.size() - mid - 3));
            int ia = chart->index_of(an), ib = chart->index_of(bn);
            if (ia < 0 || ib < 0) {
              lp.error("unknown coordinate in S component: " + key);
              bad = true;
              break;
            }
            s.at(ia, ib) = value;
            assigned[static_cast<size_t>(ia)][static_cast<size_t>(ib)] = true;
          } else {
            lp.error("unknown bracketdata entry: '" + key + "'");
            bad = true;
            break;
          }
        }
        if (bad) continue;
        // fill unassigned mirror components by graded symmetry
        for (int a = 0; a < chart->size(); ++a)
          for (int b = 0; b < chart->size(); ++b)
            if (assigned[static_cast<size_t>(a)][static_cast<size_t>(b)] &&
                !assigned[static_cast<size_t>(b)][static_cast<size_t>(a)] && a != b) {
              int ab = parity_bit(chart->parity(a)) & parity_bit(chart->parity(b));
              s.at(b, a) = ab ? -s.at(a, b) : s.at(a, b);
              assigned[static_cast<size_t>(b)][static_cast<size_t>(a)] = true;
            }
        ExtendedBracketData data(std::move(s), std::move(gamma), std::move(theta));
        data.validate();
        m.bracket_data.emplace(name, std::move(data));
        m.order.push_back({"bracketdata", name});
      } else if (kw == "check") {
        std::istringstream rs(rest);
        std::string kind;
        rs >> kind;
        Manifest::Check chk;
        chk.line = ln + 1;
        chk.kind = kind;
        std::string kv;
        while (rs >> kv) {
          size_t eq = kv.find('=');
          if (eq == std::string::npos) {
            lp.error("check argument must be key=value: '" + kv + "'");
            chk.kind.clear();
            break;
          }
          chk.args[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        if (!chk.kind.empty()) m.checks.push_back(std::move(chk));
      } else {
        lp.error("unknown keyword: '" + kw + "'");
      }
    } catch (const Error& e) {
      lp.error(e.what());
    } catch (const std::exception& e) {
      lp.error(std::string("invalid input: ") + e.what());
    }
  }

  result.ok = result.diagnostics.empty();
  return result;
}

std::string print_manifest(const Manifest& m) {
  std::ostringstream os;
  os << "seed " << m.seed << "\n";
  for (const auto& decl : m.order) {
    if (decl.kind == "chart") {
      const ChartPtr& c = m.charts.at(decl.name);
      os << "chart " << decl.name << " even(";
      bool first = true;
      for (int i = 0; i < c->size(); ++i)
        if (c->parity(i) == Parity::even) {
          if (!first) os << ", ";
          os << c->name(i);
          first = false;
        }
      os << ") odd(";
      first = true;
      for (int i = 0; i < c->size(); ++i)
        if (c->parity(i) == Parity::odd) {
          if (!first) os << ", ";
          os << c->name(i);
          first = false;
        }
      os << ")\n";
    } else if (decl.kind == "scalar") {
      const GradedScalar& v = m.scalars.at(decl.name);
      os << "scalar " << decl.name << " on " << m.chart_name(v.chart()) << " = "
         << print_scalar(v) << "\n";
    } else if (decl.kind == "operator") {
      const DiffOperator& v = m.operators.at(decl.name);
      os << "operator " << decl.name << " on " << m.chart_name(v.chart()) << " = "
         << print_operator(v) << "\n";
    } else if (decl.kind == "momentum") {
      os << "momentum " << decl.name << " on " << m.momentum_charts.at(decl.name) << " = "
         << print_momentum(m.momenta.at(decl.name)) << "\n";
    } else if (decl.kind == "density") {
      const DensityElement& v = m.densities.at(decl.name);
      os << "density " << decl.name << " on " << m.chart_name(v.chart()) << " = "
         << print_density(v) << "\n";
    } else if (decl.kind == "change") {
      const CoordinateChange& ch = m.changes.at(decl.name);
      os << "change " << decl.name << " from " << m.chart_name(ch.source()) << " to "
         << m.chart_name(ch.target()) << " : ";
      for (int t = 0; t < ch.target()->size(); ++t) {
        if (t) os << " ; ";
        os << ch.target()->name(t) << " = "
           << print_scalar(ch.forward()[static_cast<size_t>(t)]);
      }
      if (ch.inverse()) {
        os << " inverse ";
        for (int ssi = 0; ssi < ch.source()->size(); ++ssi) {
          if (ssi) os << " ; ";
          os << ch.source()->name(ssi) << " = "
             << print_scalar((*ch.inverse())[static_cast<size_t>(ssi)]);
        }
      }
      os << "\n";
    } else if (decl.kind == "bracketdata") {
      const ExtendedBracketData& d = m.bracket_data.at(decl.name);
      const ChartPtr& c = d.chart();
      os << "bracketdata " << decl.name << " on " << m.chart_name(c) << " parity "
         << parity_name(d.parity()) << " :";
      bool first = true;
      auto emit = [&](const std::string& k, const std::string& v) {
        os << (first ? " " : " ; ") << k << " = " << v;
        first = false;
      };
      for (int a = 0; a < c->size(); ++a)
        for (int b = a; b < c->size(); ++b)
          if (!d.s.at(a, b).is_zero())
            emit("S[" + c->name(a) + "][" + c->name(b) + "]", print_scalar(d.s.at(a, b)));
      for (int a = 0; a < c->size(); ++a)
        if (!d.gamma[static_cast<size_t>(a)].is_zero())
          emit("gamma[" + c->name(a) + "]", print_scalar(d.gamma[static_cast<size_t>(a)]));
      emit("theta", print_scalar(d.theta));
      os << "\n";
    }
  }
  for (const auto& chk : m.checks) {
    os << "check " << chk.kind;
    for (const auto& [k, v] : chk.args) os << " " << k << "=" << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace densalg
