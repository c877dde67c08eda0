#pragma once

#include <string>

#include <json.hpp>

#include "cvp/compile.h"
#include "cvp/model.h"

namespace cvp {

using Json = nlohmann::json;

struct ParseResult {
  ControlProblem problem;
  Diagnostics fragment;  // controllable-simple diagnostics, attached at parse
};

/// Parses a problem document. Rationals are integers or "p/q" strings;
/// decimal literals are rejected to keep values exact. Undeclared names
/// and malformed constructs raise ParseError with the offending path.
ParseResult parse_problem(const Json& doc);
ParseResult parse_problem_text(const std::string& text);
ParseResult parse_problem_file(const std::string& path);

Json serialize_problem(const ControlProblem& problem);

Plan parse_plan(const Json& doc);
Plan parse_plan_text(const std::string& text);
Plan parse_plan_file(const std::string& path);

Json serialize_plan(const Plan& plan);

Json serialize_report(const ValidationReport& report, const ControlProblem& problem);

/// Output-only view of a compiled task.
Json serialize_simple_problem(const SimpleProblem& problem);

void write_json_file(const std::string& path, const Json& doc);

}  // namespace cvp
