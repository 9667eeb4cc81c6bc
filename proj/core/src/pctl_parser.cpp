#include <coplan/pctl.hpp>

#include <cctype>
#include <charconv>
#include <cmath>

namespace coplan::pctl {

namespace {

enum class Tok {
  end,
  ident,
  number,
  kw_true,
  kw_p,
  kw_x,
  kw_u,
  kw_f,
  kw_g,
  bang,
  amp,
  bar,
  implies,
  lparen,
  rparen,
  lbracket,
  rbracket,
  lt,
  gt,
  le,
  ge,
};

struct Token {
  Tok kind = Tok::end;
  std::string_view text;
  std::size_t pos = 0;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      t.text = src_.substr(pos_, 1);
      ++pos_;
      return t;
    };
    switch (c) {
      case '!': return single(Tok::bang);
      case '&': return single(Tok::amp);
      case '|': return single(Tok::bar);
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case '=':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          t.kind = Tok::implies;
          t.text = src_.substr(pos_, 2);
          pos_ += 2;
          return t;
        }
        throw ParseError("unexpected '='", pos_);
      case '<':
      case '>': {
        bool eq = pos_ + 1 < src_.size() && src_[pos_ + 1] == '=';
        t.kind = c == '<' ? (eq ? Tok::le : Tok::lt) : (eq ? Tok::ge : Tok::gt);
        t.text = src_.substr(pos_, eq ? 2 : 1);
        pos_ += eq ? 2 : 1;
        return t;
      }
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        bool exp_sign = (d == '+' || d == '-') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E');
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' ||
            exp_sign) {
          ++pos_;
        } else {
          break;
        }
      }
      t.kind = Tok::number;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      t.text = src_.substr(start, pos_ - start);
      if (t.text == "true") t.kind = Tok::kw_true;
      else if (t.text == "P") t.kind = Tok::kw_p;
      else if (t.text == "X") t.kind = Tok::kw_x;
      else if (t.text == "U") t.kind = Tok::kw_u;
      else if (t.text == "F") t.kind = Tok::kw_f;
      else if (t.text == "G") t.kind = Tok::kw_g;
      else t.kind = Tok::ident;
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  StateFormula parse() {
    auto f = state();
    if (cur_.kind != Tok::end) throw ParseError("unexpected '" + std::string(cur_.text) + "'", cur_.pos);
    return f;
  }

private:
  void advance() { cur_ = lexer_.next(); }

  Token expect(Tok kind, std::string_view what) {
    if (cur_.kind != kind) {
      std::string found = cur_.kind == Tok::end ? "end of input" : "'" + std::string(cur_.text) + "'";
      throw ParseError("expected " + std::string(what) + ", found " + found, cur_.pos);
    }
    Token t = cur_;
    advance();
    return t;
  }

  StateFormula state() {
    auto lhs = disjunction();
    if (cur_.kind == Tok::implies) {
      advance();
      return make_implies(std::move(lhs), state());
    }
    return lhs;
  }

  StateFormula disjunction() {
    auto f = conjunction();
    while (cur_.kind == Tok::bar) {
      advance();
      f = make_or(std::move(f), conjunction());
    }
    return f;
  }

  StateFormula conjunction() {
    auto f = unary();
    while (cur_.kind == Tok::amp) {
      advance();
      f = make_and(std::move(f), unary());
    }
    return f;
  }

  StateFormula unary() {
    if (cur_.kind == Tok::bang) {
      advance();
      return make_not(unary());
    }
    return primary();
  }

  StateFormula primary() {
    switch (cur_.kind) {
      case Tok::kw_true: advance(); return make_true();
      case Tok::ident: {
        std::string label(cur_.text);
        advance();
        return make_atom(std::move(label));
      }
      case Tok::lparen: {
        advance();
        auto f = state();
        expect(Tok::rparen, "')'");
        return f;
      }
      case Tok::kw_p: return probability();
      case Tok::end: throw ParseError("unexpected end of input", cur_.pos);
      default: throw ParseError("unexpected '" + std::string(cur_.text) + "'", cur_.pos);
    }
  }

  StateFormula probability() {
    advance();  // P
    Comparator cmp;
    switch (cur_.kind) {
      case Tok::lt: cmp = Comparator::less; break;
      case Tok::gt: cmp = Comparator::greater; break;
      case Tok::le: cmp = Comparator::less_equal; break;
      case Tok::ge: cmp = Comparator::greater_equal; break;
      default: throw ParseError("expected comparator after 'P'", cur_.pos);
    }
    advance();
    Token num = expect(Tok::number, "probability threshold");
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), p);
    if (ec != std::errc{} || ptr != num.text.data() + num.text.size() || !std::isfinite(p)) {
      throw ParseError("malformed threshold '" + std::string(num.text) + "'", num.pos);
    }
    if (p < 0.0 || p > 1.0) {
      throw ParseError("threshold " + std::string(num.text) + " outside [0, 1]", num.pos);
    }
    expect(Tok::lbracket, "'['");
    auto body = path();
    expect(Tok::rbracket, "']'");
    return make_prob(cmp, p, std::move(body));
  }

  Bound bound() {
    if (cur_.kind != Tok::le) return std::nullopt;
    advance();
    Token num = expect(Tok::number, "step bound");
    if (!num.text.empty() && num.text.front() == '-') {
      throw ParseError("negative step bound " + std::string(num.text), num.pos);
    }
    std::uint64_t k = 0;
    auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), k);
    if (ec != std::errc{} || ptr != num.text.data() + num.text.size()) {
      throw ParseError("step bound must be a nonnegative integer", num.pos);
    }
    return k;
  }

  PathFormula path() {
    switch (cur_.kind) {
      case Tok::kw_x: advance(); return make_next(state());
      case Tok::kw_f: {
        advance();
        auto b = bound();
        return make_eventually(b, state());
      }
      case Tok::kw_g: {
        advance();
        auto b = bound();
        return make_always(b, state());
      }
      default: break;
    }
    auto lhs = state();
    expect(Tok::kw_u, "'U'");
    auto b = bound();
    return make_until(std::move(lhs), b, state());
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

StateFormula parse_formula_sugared(std::string_view text) { return Parser(text).parse(); }

StateFormula parse_formula(std::string_view text) {
  return rewrite_derived(parse_formula_sugared(text));
}

std::vector<FormulaLine> parse_formula_list(std::string_view text) {
  std::vector<FormulaLine> out;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    auto nl = text.find('\n', offset);
    auto line = text.substr(offset, nl == std::string_view::npos ? std::string_view::npos : nl - offset);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      auto last = line.find_last_not_of(" \t\r");
      auto body = line.substr(first, last - first + 1);
      try {
        out.push_back(FormulaLine{line_no, std::string(body), parse_formula(body)});
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), offset + first + e.position());
      }
    }
    if (nl == std::string_view::npos) break;
    offset = nl + 1;
  }
  return out;
}

}  // namespace coplan::pctl
