#pragma once

// PCTL over action atoms: abstract syntax, text grammar, derived-operator
// rewriting and simple structural queries.
//
// Concrete grammar (lowest to highest precedence):
//
//   state   := or ( "=>" state )?
//   or      := and ( "|" and )*
//   and     := unary ( "&" unary )*
//   unary   := "!" unary | primary
//   primary := "true" | IDENT | "(" state ")" | "P" CMP NUMBER "[" path "]"
//   path    := "X" state
//            | ("F" | "G") bound? state
//            | state "U" bound? state
//   bound   := "<=" INTEGER
//   CMP     := "<" | ">" | "<=" | ">="
//
// Identifiers are [A-Za-z_][A-Za-z0-9_]* minus the keywords P X U F G true.

#include <coplan/error.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coplan::pctl {

enum class Comparator { less, greater, less_equal, greater_equal };

/// Step bound of an until/eventually/always operator; empty means unbounded.
using Bound = std::optional<std::uint64_t>;

struct StateNode;
struct PathNode;
using StateFormula = std::shared_ptr<const StateNode>;
using PathFormula = std::shared_ptr<const PathNode>;

struct True {};
struct Atom {
  std::string label;
};
struct Not {
  StateFormula operand;
};
struct And {
  StateFormula lhs, rhs;
};
struct Or {  // sugar
  StateFormula lhs, rhs;
};
struct Implies {  // sugar
  StateFormula lhs, rhs;
};
struct Prob {
  Comparator comparator;
  double threshold;
  PathFormula path;
};

struct StateNode {
  std::variant<True, Atom, Not, And, Or, Implies, Prob> node;
};

struct Next {
  StateFormula operand;
};
struct Until {
  StateFormula lhs;
  Bound bound;
  StateFormula rhs;
};
struct Eventually {  // sugar
  Bound bound;
  StateFormula operand;
};
struct Always {  // sugar
  Bound bound;
  StateFormula operand;
};

struct PathNode {
  std::variant<Next, Until, Eventually, Always> node;
};

StateFormula make_true();
StateFormula make_atom(std::string label);
StateFormula make_not(StateFormula operand);
StateFormula make_and(StateFormula lhs, StateFormula rhs);
StateFormula make_or(StateFormula lhs, StateFormula rhs);
StateFormula make_implies(StateFormula lhs, StateFormula rhs);
StateFormula make_prob(Comparator cmp, double threshold, PathFormula path);
PathFormula make_next(StateFormula operand);
PathFormula make_until(StateFormula lhs, Bound bound, StateFormula rhs);
PathFormula make_eventually(Bound bound, StateFormula operand);
PathFormula make_always(Bound bound, StateFormula operand);

/// Structural equality (thresholds compared exactly).
bool equal(const StateFormula& a, const StateFormula& b);
bool equal(const PathFormula& a, const PathFormula& b);

std::string_view to_string(Comparator cmp);
std::string to_string(const StateFormula& f);
std::string to_string(const PathFormula& f);

/// The comparator of the dual bound: < > <= >= map to > < >= <=.
Comparator flip(Comparator cmp);

/// `value cmp threshold`, where a value within `tolerance` of the threshold
/// is first snapped onto it.
bool compare(double value, Comparator cmp, double threshold, double tolerance);

/// Parses one formula and rewrites all sugar into core operators.
StateFormula parse_formula(std::string_view text);

/// Parses one formula, keeping F/G/|/=> nodes as written.
StateFormula parse_formula_sugared(std::string_view text);

/// One formula per line; `#` starts a comment, blank lines are skipped.
struct FormulaLine {
  std::size_t line = 0;  // 1-based
  std::string text;
  StateFormula formula;
};
std::vector<FormulaLine> parse_formula_list(std::string_view text);

/// Eliminates derived operators:
///   F<=k f           ->  true U<=k f
///   P~p [ G<=k f ]   ->  P~'(1-p) [ true U<=k !f ]   with ~' = flip(~)
///   a | b            ->  !(!a & !b)
///   a => b           ->  !(a & !b)
StateFormula rewrite_derived(const StateFormula& f);

/// True when `f` contains only True/Atom/Not/And/Prob/Next/Until.
bool is_core(const StateFormula& f);

struct FormulaMetrics {
  std::size_t length = 1;       // operator count, at least 1
  std::uint64_t max_bound = 1;  // largest finite until bound, 1 if none
};
FormulaMetrics formula_metrics(const StateFormula& f);

std::set<std::string> atoms_of(const StateFormula& f);

}  // namespace coplan::pctl
