#include "cvp/io.h"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace cvp {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

Rational parse_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float())
    fail(path, "decimal literals are not exact; write the value as \"p/q\"");
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  fail(path, "expected an integer or a \"p/q\" string");
}

struct SymbolTable {
  std::unordered_map<std::string, int> fluents, state_vars, control_vars;

  static int lookup(const std::unordered_map<std::string, int>& table, const std::string& name,
                    const char* what, const std::string& path) {
    auto it = table.find(name);
    if (it == table.end())
      fail(path, std::string("undeclared ") + what + " '" + name + "'");
    return it->second;
  }
};

std::vector<std::string> parse_names(const Json& j, const std::string& path,
                                     std::unordered_map<std::string, int>& table) {
  if (!j.is_array()) fail(path, "expected an array of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& entry = j[i];
    if (!entry.is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a name");
    const auto name = entry.get<std::string>();
    if (!table.emplace(name, static_cast<int>(out.size())).second)
      fail(path + "[" + std::to_string(i) + "]", "duplicate name '" + name + "'");
    out.push_back(name);
  }
  return out;
}

ControlExprPtr parse_expr(const Json& j, const SymbolTable& symbols, const std::string& path) {
  if (j.is_number() || j.is_string())  // shorthand for a constant
    return ControlExpr::constant(parse_rational(j, path));
  if (!j.is_object()) fail(path, "expected a control expression object");
  const auto op = field(j, "op", path).get<std::string>();
  if (op == "const") return ControlExpr::constant(parse_rational(field(j, "value", path), path + ".value"));
  if (op == "var") {
    const auto name = field(j, "name", path).get<std::string>();
    return ControlExpr::var(
        SymbolTable::lookup(symbols.control_vars, name, "control variable", path));
  }
  if (op == "add" || op == "sub" || op == "mul") {
    const auto& args = field(j, "args", path);
    if (!args.is_array() || args.size() != 2) fail(path + ".args", "expected exactly two operands");
    auto a = parse_expr(args[0], symbols, path + ".args[0]");
    auto b = parse_expr(args[1], symbols, path + ".args[1]");
    if (op == "add") return ControlExpr::sum(std::move(a), std::move(b));
    if (op == "sub") return ControlExpr::difference(std::move(a), std::move(b));
    return ControlExpr::product(std::move(a), std::move(b));
  }
  if (op == "div") fail(path, "division is not part of the expression language");
  if (op == "or" || op == "and")
    fail(path, "logical operators are not allowed; conditions are arrays of atoms");
  fail(path, "unknown expression op '" + op + "'");
}

LinExprX parse_linexpr(const Json& j, const SymbolTable& symbols, const std::string& path) {
  if (!j.is_object()) fail(path, "expected {coeffs, constant}");
  LinExprX out;
  if (j.contains("constant")) out.constant = parse_rational(j["constant"], path + ".constant");
  if (j.contains("coeffs")) {
    const auto& coeffs = j["coeffs"];
    if (!coeffs.is_object()) fail(path + ".coeffs", "expected an object of name -> rational");
    for (auto it = coeffs.begin(); it != coeffs.end(); ++it) {
      const int var =
          SymbolTable::lookup(symbols.state_vars, it.key(), "state variable", path + ".coeffs");
      out.add_term(var, parse_rational(it.value(), path + ".coeffs." + it.key()));
    }
  }
  return out;
}

RawOp parse_op(const Json& j, const std::string& path) {
  const auto s = j.get<std::string>();
  if (s == ">") return RawOp::GT;
  if (s == ">=") return RawOp::GEQ;
  if (s == "<") return RawOp::LT;
  if (s == "<=") return RawOp::LEQ;
  if (s == "=") return RawOp::EQ;
  fail(path, "unknown comparator '" + s + "' (expected >, >=, <, <= or =)");
}

AtomCondition parse_condition(const Json& j, const SymbolTable& symbols, const std::string& path) {
  if (!j.is_object()) fail(path, "expected {lhs, op, rhs}");
  LinExprX lhs = parse_linexpr(field(j, "lhs", path), symbols, path + ".lhs");
  RawOp op = parse_op(field(j, "op", path), path + ".op");
  ControlExprPtr rhs = parse_expr(field(j, "rhs", path), symbols, path + ".rhs");
  return make_condition(std::move(lhs), op, std::move(rhs));
}

Literal parse_literal(const Json& j, const SymbolTable& symbols, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a fluent literal string, e.g. \"p\" or \"!p\"");
  auto s = j.get<std::string>();
  Literal lit;
  if (!s.empty() && s[0] == '!') {
    lit.value = false;
    s.erase(0, 1);
  }
  lit.fluent = SymbolTable::lookup(symbols.fluents, s, "fluent", path);
  return lit;
}

std::vector<FluentId> parse_fluent_list(const Json& j, const SymbolTable& symbols,
                                        const std::string& path) {
  std::vector<FluentId> out;
  if (!j.is_array()) fail(path, "expected an array of fluent names");
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(SymbolTable::lookup(symbols.fluents, j[i].get<std::string>(), "fluent",
                                      path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

ParseResult parse_problem(const Json& doc) {
  if (!doc.is_object()) throw ParseError("problem document must be a JSON object");
  ParseResult result;
  ControlProblem& p = result.problem;
  SymbolTable symbols;

  if (doc.contains("meta")) {
    const auto& meta = doc["meta"];
    if (meta.contains("name")) p.name = meta["name"].get<std::string>();
    if (meta.contains("domain")) p.domain_tag = meta["domain"].get<std::string>();
  }

  p.fluents = parse_names(doc.value("fluents", Json::array()), "fluents", symbols.fluents);
  p.state_vars = parse_names(field(doc, "state_vars", "$"), "state_vars", symbols.state_vars);

  const auto& cvars = doc.value("control_vars", Json::array());
  for (std::size_t i = 0; i < cvars.size(); ++i) {
    const std::string path = "control_vars[" + std::to_string(i) + "]";
    const auto& cj = cvars[i];
    ControlVarDecl decl;
    decl.name = field(cj, "name", path).get<std::string>();
    if (!symbols.control_vars.emplace(decl.name, static_cast<int>(p.control_vars.size())).second)
      fail(path, "duplicate control variable '" + decl.name + "'");
    const Rational lo = parse_rational(field(cj, "lo", path), path + ".lo");
    const Rational hi = parse_rational(field(cj, "hi", path), path + ".hi");
    if (hi < lo) fail(path, "lo > hi");
    decl.domain = Interval(lo, hi);
    const auto kind = field(cj, "kind", path).get<std::string>();
    if (kind == "continuous") {
      decl.kind = DomainKind::Continuous;
    } else if (kind == "discrete") {
      decl.kind = DomainKind::Discrete;
      decl.step = parse_rational(field(cj, "step", path), path + ".step");
    } else {
      fail(path + ".kind", "expected 'continuous' or 'discrete'");
    }
    p.control_vars.push_back(std::move(decl));
  }

  const auto& actions = field(doc, "actions", "$");
  if (!actions.is_array()) throw ParseError("actions: expected an array");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string path = "actions[" + std::to_string(i) + "]";
    const auto& aj = actions[i];
    Action a;
    a.name = field(aj, "name", path).get<std::string>();
    if (aj.contains("cost")) a.cost = parse_rational(aj["cost"], path + ".cost");
    for (std::size_t k = 0; k < aj.value("pre_b", Json::array()).size(); ++k)
      a.pre_b.push_back(
          parse_literal(aj["pre_b"][k], symbols, path + ".pre_b[" + std::to_string(k) + "]"));
    for (std::size_t k = 0; k < aj.value("pre_q", Json::array()).size(); ++k)
      a.pre_q.push_back(
          parse_condition(aj["pre_q"][k], symbols, path + ".pre_q[" + std::to_string(k) + "]"));
    if (aj.contains("eff_b_add"))
      a.eff_add = parse_fluent_list(aj["eff_b_add"], symbols, path + ".eff_b_add");
    if (aj.contains("eff_b_del"))
      a.eff_del = parse_fluent_list(aj["eff_b_del"], symbols, path + ".eff_b_del");
    for (std::size_t k = 0; k < aj.value("eff_q", Json::array()).size(); ++k) {
      const std::string epath = path + ".eff_q[" + std::to_string(k) + "]";
      const auto& ej = aj["eff_q"][k];
      const auto var = SymbolTable::lookup(
          symbols.state_vars, field(ej, "var", epath).get<std::string>(), "state variable", epath);
      if (ej.contains("add")) {
        a.eff_q.push_back(
            NumericEffect::additive(var, parse_expr(ej["add"], symbols, epath + ".add")));
      } else if (ej.contains("assign")) {
        NumericEffect e;
        e.var = var;
        e.lin = parse_linexpr(field(ej["assign"], "lin", epath), symbols, epath + ".assign.lin");
        e.addend = parse_expr(field(ej["assign"], "ctrl", epath), symbols, epath + ".assign.ctrl");
        a.eff_q.push_back(std::move(e));
      } else {
        fail(epath, "expected 'add' (additive control expression) or 'assign'");
      }
    }
    p.actions.push_back(std::move(a));
  }

  const auto& init = field(doc, "init", "$");
  p.init.props.assign(p.fluents.size(), false);
  for (const auto& prop : init.value("props", Json::array()))
    p.init.props[static_cast<std::size_t>(SymbolTable::lookup(
        symbols.fluents, prop.get<std::string>(), "fluent", "init.props"))] = true;
  p.init.nums.assign(p.state_vars.size(), Rational(0));
  std::vector<bool> assigned(p.state_vars.size(), false);
  const auto& nums = field(init, "nums", "init");
  for (auto it = nums.begin(); it != nums.end(); ++it) {
    const int var = SymbolTable::lookup(symbols.state_vars, it.key(), "state variable", "init.nums");
    p.init.nums[static_cast<std::size_t>(var)] = parse_rational(it.value(), "init.nums." + it.key());
    assigned[static_cast<std::size_t>(var)] = true;
  }
  for (std::size_t v = 0; v < assigned.size(); ++v)
    if (!assigned[v]) fail("init.nums", "missing value for state variable '" + p.state_vars[v] + "'");

  const auto& goal = field(doc, "goal", "$");
  for (std::size_t k = 0; k < goal.value("props", Json::array()).size(); ++k)
    p.goal.props.push_back(
        parse_literal(goal["props"][k], symbols, "goal.props[" + std::to_string(k) + "]"));
  for (std::size_t k = 0; k < goal.value("nums", Json::array()).size(); ++k)
    p.goal.nums.push_back(
        parse_condition(goal["nums"][k], symbols, "goal.nums[" + std::to_string(k) + "]"));

  try {
    p.finalize();
  } catch (const ModelError& e) {
    throw ParseError(std::string("invalid problem: ") + e.what());
  }
  result.fragment = check_controllable_simple(p);
  return result;
}

ParseResult parse_problem_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

ParseResult parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_text(buffer.str());
}

namespace {

Json rational_json(const Rational& r) {
  if (r.is_integer()) {
    const auto num = r.numerator();
    if (num >= -((Rational::BigInt(1) << 53)) && num <= (Rational::BigInt(1) << 53))
      return Json(num.convert_to<long long>());
  }
  return Json(r.str());
}

Json expr_json(const ControlExpr& e, const std::vector<ControlVarDecl>& decls) {
  switch (e.kind()) {
    case ControlExpr::Kind::Constant:
      return Json{{"op", "const"}, {"value", rational_json(e.value())}};
    case ControlExpr::Kind::Var:
      return Json{{"op", "var"}, {"name", decls[static_cast<std::size_t>(e.var_id())].name}};
    case ControlExpr::Kind::Sum:
      return Json{{"op", "add"},
                  {"args", Json::array({expr_json(*e.left(), decls), expr_json(*e.right(), decls)})}};
    case ControlExpr::Kind::Difference:
      return Json{{"op", "sub"},
                  {"args", Json::array({expr_json(*e.left(), decls), expr_json(*e.right(), decls)})}};
    case ControlExpr::Kind::Product:
      return Json{{"op", "mul"},
                  {"args", Json::array({expr_json(*e.left(), decls), expr_json(*e.right(), decls)})}};
  }
  return Json();
}

Json linexpr_json(const LinExprX& lin, const std::vector<std::string>& var_names) {
  Json coeffs = Json::object();
  for (const auto& [var, c] : lin.coeffs) coeffs[var_names[static_cast<std::size_t>(var)]] = rational_json(c);
  return Json{{"coeffs", std::move(coeffs)}, {"constant", rational_json(lin.constant)}};
}

std::string literal_json(const Literal& lit, const std::vector<std::string>& fluents) {
  return (lit.value ? "" : "!") + fluents[static_cast<std::size_t>(lit.fluent)];
}

Json condition_json(const AtomCondition& cond, const ControlProblem& p) {
  return Json{{"lhs", linexpr_json(cond.lhs, p.state_vars)},
              {"op", cmp_str(cond.op)},
              {"rhs", expr_json(*cond.rhs, p.control_vars)}};
}

}  // namespace

Json serialize_problem(const ControlProblem& p) {
  Json doc;
  if (!p.name.empty() || !p.domain_tag.empty()) {
    Json meta = Json::object();
    if (!p.name.empty()) meta["name"] = p.name;
    if (!p.domain_tag.empty()) meta["domain"] = p.domain_tag;
    doc["meta"] = std::move(meta);
  }
  doc["fluents"] = p.fluents;
  doc["state_vars"] = p.state_vars;
  Json cvars = Json::array();
  for (const auto& decl : p.control_vars) {
    Json cj{{"name", decl.name},
            {"lo", rational_json(decl.domain.lo)},
            {"hi", rational_json(decl.domain.hi)},
            {"kind", decl.kind == DomainKind::Discrete ? "discrete" : "continuous"}};
    if (decl.kind == DomainKind::Discrete) cj["step"] = rational_json(decl.step);
    cvars.push_back(std::move(cj));
  }
  doc["control_vars"] = std::move(cvars);

  Json actions = Json::array();
  for (const auto& a : p.actions) {
    Json aj;
    aj["name"] = a.name;
    aj["cost"] = rational_json(a.cost);
    Json pre_b = Json::array();
    for (const auto& lit : a.pre_b) pre_b.push_back(literal_json(lit, p.fluents));
    aj["pre_b"] = std::move(pre_b);
    Json pre_q = Json::array();
    for (const auto& cond : a.pre_q) pre_q.push_back(condition_json(cond, p));
    aj["pre_q"] = std::move(pre_q);
    Json add = Json::array(), del = Json::array();
    for (FluentId f : a.eff_add) add.push_back(p.fluents[static_cast<std::size_t>(f)]);
    for (FluentId f : a.eff_del) del.push_back(p.fluents[static_cast<std::size_t>(f)]);
    aj["eff_b_add"] = std::move(add);
    aj["eff_b_del"] = std::move(del);
    Json eff_q = Json::array();
    for (const auto& e : a.eff_q) {
      Json ej{{"var", p.state_vars[static_cast<std::size_t>(e.var)]}};
      if (e.is_additive())
        ej["add"] = expr_json(*e.addend, p.control_vars);
      else
        ej["assign"] = Json{{"lin", linexpr_json(e.lin, p.state_vars)},
                            {"ctrl", expr_json(*e.addend, p.control_vars)}};
      eff_q.push_back(std::move(ej));
    }
    aj["eff_q"] = std::move(eff_q);
    actions.push_back(std::move(aj));
  }
  doc["actions"] = std::move(actions);

  Json props = Json::array();
  for (std::size_t f = 0; f < p.fluents.size(); ++f)
    if (p.init.props[f]) props.push_back(p.fluents[f]);
  Json nums = Json::object();
  for (std::size_t v = 0; v < p.state_vars.size(); ++v)
    nums[p.state_vars[v]] = rational_json(p.init.nums[v]);
  doc["init"] = Json{{"props", std::move(props)}, {"nums", std::move(nums)}};

  Json goal_props = Json::array();
  for (const auto& lit : p.goal.props) goal_props.push_back(literal_json(lit, p.fluents));
  Json goal_nums = Json::array();
  for (const auto& cond : p.goal.nums) goal_nums.push_back(condition_json(cond, p));
  doc["goal"] = Json{{"props", std::move(goal_props)}, {"nums", std::move(goal_nums)}};
  return doc;
}

Plan parse_plan(const Json& doc) {
  if (!doc.is_object() || !doc.contains("steps"))
    throw ParseError("plan document must be an object with a 'steps' array");
  Plan plan;
  const auto& steps = doc["steps"];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string path = "steps[" + std::to_string(i) + "]";
    const auto& sj = steps[i];
    Plan::Step step;
    step.action = field(sj, "action", path).get<std::string>();
    if (sj.contains("mu")) {
      for (auto it = sj["mu"].begin(); it != sj["mu"].end(); ++it)
        step.mu.emplace(it.key(), parse_rational(it.value(), path + ".mu." + it.key()));
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

Plan parse_plan_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_plan(doc);
}

Plan parse_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_plan_text(buffer.str());
}

Json serialize_plan(const Plan& plan) {
  Json steps = Json::array();
  for (const auto& step : plan.steps) {
    Json mu = Json::object();
    for (const auto& [name, value] : step.mu) mu[name] = rational_json(value);
    steps.push_back(Json{{"action", step.action}, {"mu", std::move(mu)}});
  }
  return Json{{"steps", std::move(steps)}};
}

Json serialize_report(const ValidationReport& report, const ControlProblem& problem) {
  Json j;
  j["valid"] = report.valid;
  j["solution"] = report.solution;
  if (report.failing_step) j["failing_step"] = *report.failing_step;
  switch (report.reason) {
    case ValidationReport::Reason::None: break;
    case ValidationReport::Reason::DomainViolation: j["reason"] = "DomainViolation"; break;
    case ValidationReport::Reason::NotApplicable: j["reason"] = "NotApplicable"; break;
    case ValidationReport::Reason::UnboundControlVariable:
      j["reason"] = "UnboundControlVariable";
      break;
  }
  if (!report.message.empty()) j["message"] = report.message;
  Json props = Json::array();
  for (std::size_t f = 0; f < problem.fluents.size(); ++f)
    if (f < report.final_state.props.size() && report.final_state.props[f])
      props.push_back(problem.fluents[f]);
  Json nums = Json::object();
  for (std::size_t v = 0; v < problem.state_vars.size() && v < report.final_state.nums.size(); ++v)
    nums[problem.state_vars[v]] = rational_json(report.final_state.nums[v]);
  j["final_state"] = Json{{"props", std::move(props)}, {"nums", std::move(nums)}};
  return j;
}

Json serialize_simple_problem(const SimpleProblem& p) {
  Json doc;
  doc["fluents"] = p.fluents;
  doc["state_vars"] = p.state_vars;
  Json actions = Json::array();
  for (const auto& a : p.actions) {
    Json aj;
    aj["name"] = a.name;
    aj["cost"] = rational_json(a.cost);
    Json pre_b = Json::array();
    for (const auto& lit : a.pre_b) pre_b.push_back(literal_json(lit, p.fluents));
    aj["pre_b"] = std::move(pre_b);
    Json pre_q = Json::array();
    for (const auto& cond : a.pre_q)
      pre_q.push_back(Json{{"lhs", linexpr_json(cond.lhs, p.state_vars)},
                           {"op", cmp_str(cond.op)},
                           {"bound", rational_json(cond.bound)}});
    aj["pre_q"] = std::move(pre_q);
    Json add = Json::array(), del = Json::array();
    for (FluentId f : a.eff_add) add.push_back(p.fluents[static_cast<std::size_t>(f)]);
    for (FluentId f : a.eff_del) del.push_back(p.fluents[static_cast<std::size_t>(f)]);
    aj["eff_b_add"] = std::move(add);
    aj["eff_b_del"] = std::move(del);
    Json eff = Json::array();
    for (const auto& [var, k] : a.eff_q)
      eff.push_back(Json{{"var", p.state_vars[static_cast<std::size_t>(var)]},
                         {"add", rational_json(k)}});
    aj["eff_q"] = std::move(eff);
    actions.push_back(std::move(aj));
  }
  doc["actions"] = std::move(actions);
  Json props = Json::array();
  for (std::size_t f = 0; f < p.fluents.size(); ++f)
    if (p.init.props[f]) props.push_back(p.fluents[f]);
  Json nums = Json::object();
  for (std::size_t v = 0; v < p.state_vars.size(); ++v)
    nums[p.state_vars[v]] = rational_json(p.init.nums[v]);
  doc["init"] = Json{{"props", std::move(props)}, {"nums", std::move(nums)}};
  Json goal_props = Json::array();
  for (const auto& lit : p.goal.props) goal_props.push_back(literal_json(lit, p.fluents));
  Json goal_nums = Json::array();
  for (const auto& cond : p.goal.nums)
    goal_nums.push_back(Json{{"lhs", linexpr_json(cond.lhs, p.state_vars)},
                             {"op", cmp_str(cond.op)},
                             {"bound", rational_json(cond.bound)}});
  doc["goal"] = Json{{"props", std::move(goal_props)}, {"nums", std::move(goal_nums)}};
  return doc;
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace cvp
