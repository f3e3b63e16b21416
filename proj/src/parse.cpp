#include "rmlkit/parse.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "rmlkit/errors.hpp"

namespace rmlkit {

namespace {

enum class Tok {
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Langle, Rangle, Comma, Amp, Pipe, Tilde, Arrow, DArrow,
  Ident, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Langle: return "'<'";
    case Tok::Rangle: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Tilde: return "'~'";
    case Tok::Arrow: return "'->'";
    case Tok::DArrow: return "'<->'";
    case Tok::Ident: return "identifier";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string t) { out.push_back({k, std::move(t), line, col}); };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') { ++i; ++line; col = 1; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; ++col; continue; }
    if (text.compare(i, 3, "<->") == 0) { push(Tok::DArrow, "<->"); i += 3; col += 3; continue; }
    if (text.compare(i, 2, "->") == 0) { push(Tok::Arrow, "->"); i += 2; col += 2; continue; }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Tok::Ident, text.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '<': k = Tok::Langle; break;
      case '>': k = Tok::Rangle; break;
      case ',': k = Tok::Comma; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Pipe; break;
      case '~': k = Tok::Tilde; break;
      default:
        throw ParseError("unexpected character '" + std::string(1, c) + "' at " +
                             std::to_string(line) + ":" + std::to_string(col),
                         line, col, {});
    }
    push(k, std::string(1, c));
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// Quantifier/cover keywords carry the agent (or variable) after the first
// underscore: "E_a", "forall_a", "nabla_a", "BA_p". Bare "E"/"A"/"exists"/
// "forall" quantify over the whole agent universe.
struct IdentClass {
  enum What { PropName, TopK, BottomK, AllRefK, SomeRefK, CoverK, BisimAllK, BisimSomeK,
              BareAll, BareSome } what;
  std::string suffix;  // agent or variable name for the *_x forms
};

IdentClass classify_ident(const std::string& s) {
  if (s == "top") return {IdentClass::TopK, ""};
  if (s == "bottom") return {IdentClass::BottomK, ""};
  if (s == "A" || s == "forall") return {IdentClass::BareAll, ""};
  if (s == "E" || s == "exists") return {IdentClass::BareSome, ""};
  auto split = [&](const std::string& prefix) -> std::optional<std::string> {
    if (s.size() > prefix.size() + 1 && s.compare(0, prefix.size(), prefix) == 0 &&
        s[prefix.size()] == '_')
      return s.substr(prefix.size() + 1);
    return std::nullopt;
  };
  if (auto a = split("A")) return {IdentClass::AllRefK, *a};
  if (auto a = split("forall")) return {IdentClass::AllRefK, *a};
  if (auto a = split("E")) return {IdentClass::SomeRefK, *a};
  if (auto a = split("exists")) return {IdentClass::SomeRefK, *a};
  if (auto a = split("nabla")) return {IdentClass::CoverK, *a};
  if (auto p = split("BA")) return {IdentClass::BisimAllK, *p};
  if (auto p = split("BE")) return {IdentClass::BisimSomeK, *p};
  return {IdentClass::PropName, ""};
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::set<Agent> universe)
      : toks_(std::move(toks)), universe_(std::move(universe)) {}

  Formula run() {
    Formula f = parse_iff();
    expect(Tok::End);
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::set<Agent> universe_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::vector<std::string>& expected) {
    const Token& t = peek();
    std::string msg = "syntax error at " + std::to_string(t.line) + ":" +
                      std::to_string(t.column) + ": unexpected " + tok_name(t.kind);
    if (t.kind == Tok::Ident) msg += " '" + t.text + "'";
    if (!expected.empty()) {
      msg += "; expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += ", ";
        msg += expected[i];
      }
    }
    throw ParseError(msg, t.line, t.column, expected);
  }

  Token expect(Tok k) {
    if (!at(k)) fail({tok_name(k)});
    return take();
  }

  std::string expect_name() {
    if (!at(Tok::Ident)) fail({"name"});
    return take().text;
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (at(Tok::DArrow)) {
      take();
      return Formula::iff(lhs, parse_iff());
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (at(Tok::Arrow)) {
      take();
      return Formula::implies(lhs, parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (at(Tok::Pipe)) {
      take();
      lhs = Formula::disj(lhs, parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (at(Tok::Amp)) {
      take();
      lhs = Formula::conj(lhs, parse_unary());
    }
    return lhs;
  }

  Formula quantifier_stack(bool existential, const Token& kw) {
    if (universe_.empty())
      throw ParseError("bare quantifier '" + kw.text + "' at " + std::to_string(kw.line) +
                           ":" + std::to_string(kw.column) +
                           " but no agent is mentioned anywhere",
                       kw.line, kw.column, {});
    Formula body = parse_unary();
    for (auto it = universe_.rbegin(); it != universe_.rend(); ++it)
      body = existential ? Formula::some_ref(*it, body) : Formula::all_ref(*it, body);
    return body;
  }

  Formula parse_unary() {
    switch (peek().kind) {
      case Tok::Tilde:
        take();
        return Formula::negation(parse_unary());
      case Tok::LBracket: {
        take();
        Agent a{expect_name()};
        expect(Tok::RBracket);
        return Formula::box(a, parse_unary());
      }
      case Tok::Langle: {
        take();
        Agent a{expect_name()};
        expect(Tok::Rangle);
        return Formula::diamond(a, parse_unary());
      }
      case Tok::LParen: {
        take();
        Formula f = parse_iff();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Ident: {
        Token t = take();
        IdentClass c = classify_ident(t.text);
        switch (c.what) {
          case IdentClass::TopK: return Formula::top();
          case IdentClass::BottomK: return Formula::bottom();
          case IdentClass::PropName: return Formula::prop(t.text);
          case IdentClass::AllRefK: return Formula::all_ref(Agent{c.suffix}, parse_unary());
          case IdentClass::SomeRefK: return Formula::some_ref(Agent{c.suffix}, parse_unary());
          case IdentClass::BisimAllK: return Formula::bisim_all(Prop{c.suffix}, parse_unary());
          case IdentClass::BisimSomeK: return Formula::bisim_some(Prop{c.suffix}, parse_unary());
          case IdentClass::BareAll: return quantifier_stack(false, t);
          case IdentClass::BareSome: return quantifier_stack(true, t);
          case IdentClass::CoverK: {
            expect(Tok::LBrace);
            std::vector<Formula> members;
            if (!at(Tok::RBrace)) {
              members.push_back(parse_iff());
              while (at(Tok::Comma)) {
                take();
                members.push_back(parse_iff());
              }
            }
            expect(Tok::RBrace);
            return Formula::cover(Agent{c.suffix}, std::move(members));
          }
        }
        fail({"formula"});
      }
      default:
        fail({"'~'", "'['", "'<'", "'('", "identifier"});
    }
  }
};

// Agents named anywhere in the token stream; used as the universe for bare
// quantifiers before the real parse runs.
std::set<Agent> mentioned_agents(const std::vector<Token>& toks) {
  std::set<Agent> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if ((t.kind == Tok::LBracket || t.kind == Tok::Langle) && i + 2 < toks.size() &&
        toks[i + 1].kind == Tok::Ident) {
      Tok closer = t.kind == Tok::LBracket ? Tok::RBracket : Tok::Rangle;
      if (toks[i + 2].kind == closer) out.insert(Agent{toks[i + 1].text});
    }
    if (t.kind == Tok::Ident) {
      IdentClass c = classify_ident(t.text);
      if (c.what == IdentClass::AllRefK || c.what == IdentClass::SomeRefK ||
          c.what == IdentClass::CoverK)
        out.insert(Agent{c.suffix});
    }
  }
  return out;
}

}  // namespace

Formula parse(const std::string& text, const std::set<Agent>& extra_agents) {
  std::vector<Token> toks = lex(text);
  std::set<Agent> universe = mentioned_agents(toks);
  universe.insert(extra_agents.begin(), extra_agents.end());
  return Parser(std::move(toks), std::move(universe)).run();
}

}  // namespace rmlkit
