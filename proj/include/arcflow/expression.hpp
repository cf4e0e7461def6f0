#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"

namespace arcflow {

/**
 * Prefix expressions over named arc fields:
 *
 *   expr := NAME | sum(expr,expr) | diff(expr,expr) | scale(NUMBER,expr)
 *         | bracket(expr,expr) | ibracket(expr,expr,INT)
 *
 * Whitespace is ignored. Errors raise PARSE_ERROR naming the offending token
 * and its offset.
 */
template <class P>
class ExpressionParser {
 public:
  explicit ExpressionParser(const std::map<std::string, ArcField<P>>& registry) : registry_(registry) {}

  ArcField<P> parse(const std::string& text) {
    tokens_ = tokenize(text);
    pos_ = 0;
    ArcField<P> out = expr();
    if (pos_ != tokens_.size()) fail(tokens_[pos_], "trailing input");
    return out;
  }

 private:
  struct Token {
    std::string text;
    std::size_t offset;
  };

  static std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '(' || c == ')' || c == ',') {
        out.push_back({std::string(1, c), i});
        ++i;
      } else {
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')' &&
               s[i] != ',') {
          ++i;
        }
        out.push_back({s.substr(start, i - start), start});
      }
    }
    return out;
  }

  [[noreturn]] void fail(const Token& tok, const std::string& why) const {
    throw Error(ErrorCode::ParseError, why + " at token '" + tok.text + "' (offset " + std::to_string(tok.offset) + ")",
                tok.offset);
  }

  const Token& next(const char* expecting) {
    if (pos_ >= tokens_.size()) {
      throw Error(ErrorCode::ParseError, std::string("unexpected end of expression, expected ") + expecting);
    }
    return tokens_[pos_++];
  }

  void expect(const char* sym) {
    const Token& t = next(sym);
    if (t.text != sym) fail(t, std::string("expected '") + sym + "'");
  }

  double number() {
    const Token& t = next("a number");
    try {
      std::size_t used = 0;
      const double v = std::stod(t.text, &used);
      if (used != t.text.size()) fail(t, "malformed number");
      return v;
    } catch (const std::logic_error&) {
      fail(t, "malformed number");
    }
  }

  int integer() {
    const Token& t = next("an integer");
    if (t.text.empty() || t.text.find_first_not_of("0123456789") != std::string::npos) fail(t, "expected an integer");
    return std::stoi(t.text);
  }

  ArcField<P> expr() {
    const Token& head = next("an expression");
    const std::string op = head.text;
    if (op == "(" || op == ")" || op == ",") fail(head, "expected a field name or operator");
    const bool call = pos_ < tokens_.size() && tokens_[pos_].text == "(";
    if (!call) {
      auto it = registry_.find(op);
      if (it == registry_.end()) fail(head, "unknown field");
      return it->second;
    }
    if (op == "sum" || op == "diff" || op == "bracket") {
      expect("(");
      ArcField<P> a = expr();
      expect(",");
      ArcField<P> b = expr();
      expect(")");
      if (op == "sum") return sum(a, b);
      if (op == "diff") return difference(a, b);
      return bracket(a, b);
    }
    if (op == "scale") {
      expect("(");
      const double c = number();
      expect(",");
      ArcField<P> a = expr();
      expect(")");
      return scale(c, a);
    }
    if (op == "ibracket") {
      expect("(");
      ArcField<P> a = expr();
      expect(",");
      ArcField<P> b = expr();
      expect(",");
      const int n = integer();
      expect(")");
      return iterated_bracket(a, b, n);
    }
    fail(head, "unknown operator");
  }

  const std::map<std::string, ArcField<P>>& registry_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

template <class P>
ArcField<P> parse_expression(const std::string& text, const std::map<std::string, ArcField<P>>& registry) {
  return ExpressionParser<P>(registry).parse(text);
}

}  // namespace arcflow
