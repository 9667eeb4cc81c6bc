#include <coplan/pctl.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace coplan::pctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_threshold(double p) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
  if (ec != std::errc{}) throw std::runtime_error("cannot format threshold");
  return std::string(buf, end);
}

// 1 - p, rounded to 15 significant digits so that decimal thresholds keep
// a decimal complement (1 - 0.9 prints as 0.1).
double complement_threshold(double p) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, 1.0 - p, std::chars_format::general, 15);
  double out = 1.0 - p;
  if (ec == std::errc{}) std::from_chars(buf, end, out);
  return out;
}

std::string format_bound(const Bound& b) {
  return b ? "<=" + std::to_string(*b) : std::string{};
}

}  // namespace

StateFormula make_true() { return std::make_shared<const StateNode>(StateNode{True{}}); }
StateFormula make_atom(std::string label) {
  return std::make_shared<const StateNode>(StateNode{Atom{std::move(label)}});
}
StateFormula make_not(StateFormula operand) {
  return std::make_shared<const StateNode>(StateNode{Not{std::move(operand)}});
}
StateFormula make_and(StateFormula lhs, StateFormula rhs) {
  return std::make_shared<const StateNode>(StateNode{And{std::move(lhs), std::move(rhs)}});
}
StateFormula make_or(StateFormula lhs, StateFormula rhs) {
  return std::make_shared<const StateNode>(StateNode{Or{std::move(lhs), std::move(rhs)}});
}
StateFormula make_implies(StateFormula lhs, StateFormula rhs) {
  return std::make_shared<const StateNode>(StateNode{Implies{std::move(lhs), std::move(rhs)}});
}
StateFormula make_prob(Comparator cmp, double threshold, PathFormula path) {
  return std::make_shared<const StateNode>(StateNode{Prob{cmp, threshold, std::move(path)}});
}
PathFormula make_next(StateFormula operand) {
  return std::make_shared<const PathNode>(PathNode{Next{std::move(operand)}});
}
PathFormula make_until(StateFormula lhs, Bound bound, StateFormula rhs) {
  return std::make_shared<const PathNode>(PathNode{Until{std::move(lhs), bound, std::move(rhs)}});
}
PathFormula make_eventually(Bound bound, StateFormula operand) {
  return std::make_shared<const PathNode>(PathNode{Eventually{bound, std::move(operand)}});
}
PathFormula make_always(Bound bound, StateFormula operand) {
  return std::make_shared<const PathNode>(PathNode{Always{bound, std::move(operand)}});
}

bool equal(const StateFormula& a, const StateFormula& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [](const True&) { return true; },
          [&](const Atom& x) { return x.label == std::get<Atom>(b->node).label; },
          [&](const Not& x) { return equal(x.operand, std::get<Not>(b->node).operand); },
          [&](const And& x) {
            const auto& y = std::get<And>(b->node);
            return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const Or& x) {
            const auto& y = std::get<Or>(b->node);
            return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const Implies& x) {
            const auto& y = std::get<Implies>(b->node);
            return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const Prob& x) {
            const auto& y = std::get<Prob>(b->node);
            return x.comparator == y.comparator && x.threshold == y.threshold &&
                   equal(x.path, y.path);
          },
      },
      a->node);
}

bool equal(const PathFormula& a, const PathFormula& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Next& x) { return equal(x.operand, std::get<Next>(b->node).operand); },
          [&](const Until& x) {
            const auto& y = std::get<Until>(b->node);
            return x.bound == y.bound && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const Eventually& x) {
            const auto& y = std::get<Eventually>(b->node);
            return x.bound == y.bound && equal(x.operand, y.operand);
          },
          [&](const Always& x) {
            const auto& y = std::get<Always>(b->node);
            return x.bound == y.bound && equal(x.operand, y.operand);
          },
      },
      a->node);
}

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::less: return "<";
    case Comparator::greater: return ">";
    case Comparator::less_equal: return "<=";
    case Comparator::greater_equal: return ">=";
  }
  return "?";
}

std::string to_string(const StateFormula& f) {
  return std::visit(
      overloaded{
          [](const True&) { return std::string("true"); },
          [](const Atom& x) { return x.label; },
          [](const Not& x) { return "!" + to_string(x.operand); },
          [](const And& x) { return "(" + to_string(x.lhs) + " & " + to_string(x.rhs) + ")"; },
          [](const Or& x) { return "(" + to_string(x.lhs) + " | " + to_string(x.rhs) + ")"; },
          [](const Implies& x) {
            return "(" + to_string(x.lhs) + " => " + to_string(x.rhs) + ")";
          },
          [](const Prob& x) {
            return "P" + std::string(to_string(x.comparator)) + format_threshold(x.threshold) +
                   " [ " + to_string(x.path) + " ]";
          },
      },
      f->node);
}

std::string to_string(const PathFormula& f) {
  return std::visit(
      overloaded{
          [](const Next& x) { return "X " + to_string(x.operand); },
          [](const Until& x) {
            return to_string(x.lhs) + " U" + format_bound(x.bound) + " " + to_string(x.rhs);
          },
          [](const Eventually& x) { return "F" + format_bound(x.bound) + " " + to_string(x.operand); },
          [](const Always& x) { return "G" + format_bound(x.bound) + " " + to_string(x.operand); },
      },
      f->node);
}

Comparator flip(Comparator cmp) {
  switch (cmp) {
    case Comparator::less: return Comparator::greater;
    case Comparator::greater: return Comparator::less;
    case Comparator::less_equal: return Comparator::greater_equal;
    case Comparator::greater_equal: return Comparator::less_equal;
  }
  return cmp;
}

bool compare(double value, Comparator cmp, double threshold, double tolerance) {
  if (std::abs(value - threshold) <= tolerance) value = threshold;
  switch (cmp) {
    case Comparator::less: return value < threshold;
    case Comparator::greater: return value > threshold;
    case Comparator::less_equal: return value <= threshold;
    case Comparator::greater_equal: return value >= threshold;
  }
  return false;
}

namespace {

StateFormula rewrite_state(const StateFormula& f);

PathFormula rewrite_path(const PathFormula& f) {
  return std::visit(
      overloaded{
          [&](const Next& x) {
            auto op = rewrite_state(x.operand);
            return op == x.operand ? f : make_next(std::move(op));
          },
          [&](const Until& x) {
            auto l = rewrite_state(x.lhs);
            auto r = rewrite_state(x.rhs);
            return (l == x.lhs && r == x.rhs) ? f : make_until(std::move(l), x.bound, std::move(r));
          },
          [&](const Eventually& x) {
            return make_until(make_true(), x.bound, rewrite_state(x.operand));
          },
          [&](const Always&) -> PathFormula {
            throw std::logic_error("G must appear directly under a probability operator");
          },
      },
      f->node);
}

StateFormula rewrite_state(const StateFormula& f) {
  return std::visit(
      overloaded{
          [&](const True&) { return f; },
          [&](const Atom&) { return f; },
          [&](const Not& x) {
            auto op = rewrite_state(x.operand);
            return op == x.operand ? f : make_not(std::move(op));
          },
          [&](const And& x) {
            auto l = rewrite_state(x.lhs);
            auto r = rewrite_state(x.rhs);
            return (l == x.lhs && r == x.rhs) ? f : make_and(std::move(l), std::move(r));
          },
          [&](const Or& x) {
            return make_not(make_and(make_not(rewrite_state(x.lhs)), make_not(rewrite_state(x.rhs))));
          },
          [&](const Implies& x) {
            return make_not(make_and(rewrite_state(x.lhs), make_not(rewrite_state(x.rhs))));
          },
          [&](const Prob& x) {
            if (const auto* g = std::get_if<Always>(&x.path->node)) {
              auto body = make_until(make_true(), g->bound, make_not(rewrite_state(g->operand)));
              return make_prob(flip(x.comparator), complement_threshold(x.threshold), std::move(body));
            }
            auto p = rewrite_path(x.path);
            return p == x.path ? f : make_prob(x.comparator, x.threshold, std::move(p));
          },
      },
      f->node);
}

bool path_is_core(const PathFormula& f) {
  return std::visit(overloaded{
                        [](const Next& x) { return is_core(x.operand); },
                        [](const Until& x) { return is_core(x.lhs) && is_core(x.rhs); },
                        [](const Eventually&) { return false; },
                        [](const Always&) { return false; },
                    },
                    f->node);
}

void collect_metrics(const StateFormula& f, FormulaMetrics& m, bool& any_bound);

void collect_metrics(const PathFormula& f, FormulaMetrics& m, bool& any_bound) {
  ++m.length;
  auto note = [&](const Bound& b) {
    if (!b) return;
    m.max_bound = any_bound ? std::max(m.max_bound, *b) : *b;
    any_bound = true;
  };
  std::visit(overloaded{
                 [&](const Next& x) { collect_metrics(x.operand, m, any_bound); },
                 [&](const Until& x) {
                   note(x.bound);
                   collect_metrics(x.lhs, m, any_bound);
                   collect_metrics(x.rhs, m, any_bound);
                 },
                 [&](const Eventually& x) {
                   note(x.bound);
                   collect_metrics(x.operand, m, any_bound);
                 },
                 [&](const Always& x) {
                   note(x.bound);
                   collect_metrics(x.operand, m, any_bound);
                 },
             },
             f->node);
}

void collect_metrics(const StateFormula& f, FormulaMetrics& m, bool& any_bound) {
  std::visit(overloaded{
                 [](const True&) {},
                 [](const Atom&) {},
                 [&](const Not& x) {
                   ++m.length;
                   collect_metrics(x.operand, m, any_bound);
                 },
                 [&](const And& x) {
                   ++m.length;
                   collect_metrics(x.lhs, m, any_bound);
                   collect_metrics(x.rhs, m, any_bound);
                 },
                 [&](const Or& x) {
                   ++m.length;
                   collect_metrics(x.lhs, m, any_bound);
                   collect_metrics(x.rhs, m, any_bound);
                 },
                 [&](const Implies& x) {
                   ++m.length;
                   collect_metrics(x.lhs, m, any_bound);
                   collect_metrics(x.rhs, m, any_bound);
                 },
                 [&](const Prob& x) {
                   ++m.length;
                   collect_metrics(x.path, m, any_bound);
                 },
             },
             f->node);
}

void collect_atoms(const StateFormula& f, std::set<std::string>& out);

void collect_atoms(const PathFormula& f, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const Next& x) { collect_atoms(x.operand, out); },
                 [&](const Until& x) {
                   collect_atoms(x.lhs, out);
                   collect_atoms(x.rhs, out);
                 },
                 [&](const Eventually& x) { collect_atoms(x.operand, out); },
                 [&](const Always& x) { collect_atoms(x.operand, out); },
             },
             f->node);
}

void collect_atoms(const StateFormula& f, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const True&) {},
                 [&](const Atom& x) { out.insert(x.label); },
                 [&](const Not& x) { collect_atoms(x.operand, out); },
                 [&](const And& x) {
                   collect_atoms(x.lhs, out);
                   collect_atoms(x.rhs, out);
                 },
                 [&](const Or& x) {
                   collect_atoms(x.lhs, out);
                   collect_atoms(x.rhs, out);
                 },
                 [&](const Implies& x) {
                   collect_atoms(x.lhs, out);
                   collect_atoms(x.rhs, out);
                 },
                 [&](const Prob& x) { collect_atoms(x.path, out); },
             },
             f->node);
}

}  // namespace

StateFormula rewrite_derived(const StateFormula& f) { return rewrite_state(f); }

bool is_core(const StateFormula& f) {
  return std::visit(overloaded{
                        [](const True&) { return true; },
                        [](const Atom&) { return true; },
                        [](const Not& x) { return is_core(x.operand); },
                        [](const And& x) { return is_core(x.lhs) && is_core(x.rhs); },
                        [](const Or&) { return false; },
                        [](const Implies&) { return false; },
                        [](const Prob& x) { return path_is_core(x.path); },
                    },
                    f->node);
}

FormulaMetrics formula_metrics(const StateFormula& f) {
  FormulaMetrics m;
  m.length = 0;
  bool any_bound = false;
  collect_metrics(f, m, any_bound);
  m.length = std::max<std::size_t>(m.length, 1);
  if (!any_bound) m.max_bound = 1;
  return m;
}

std::set<std::string> atoms_of(const StateFormula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

}  // namespace coplan::pctl
