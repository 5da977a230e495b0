// Copyright 2026 The vqe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <boost/locale/utf.hpp>

#include "vqe/vql.h"

namespace vqe::vql {

namespace {

constexpr int kMaxDepth = 200;
constexpr std::size_t kMaxDiagnostics = 100;

bool IsIdentStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool IsIdentChar(char c) { return IsIdentStart(c) || (c >= '0' && c <= '9'); }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

char Lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  kIdent,
  kNumber,
  kString,
  kParam,
  kComma,
  kDot,
  kLParen,
  kRParen,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0;
  std::optional<std::string> param_default;
  SourceRange range;
};

SourceRange Range(std::size_t b, std::size_t e) {
  return {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(e)};
}

void AddDiag(std::vector<Diagnostic> &diags, SourceRange range, std::string code,
             std::string message, std::string hint = {}) {
  if (diags.size() >= kMaxDiagnostics) return;
  diags.push_back(Diagnostic{Severity::kError, range, std::move(code),
                             std::move(message), std::move(hint)});
}

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<Diagnostic> &diags)
      : s_(text), diags_(diags) {}

  std::vector<Token> Run() {
    CheckUtf8();
    std::vector<Token> out;
    while (true) {
      SkipSpace();
      if (i_ >= s_.size()) break;
      std::size_t start = i_;
      char c = s_[i_];
      if (IsIdentStart(c)) {
        while (i_ < s_.size() && IsIdentChar(s_[i_])) ++i_;
        out.push_back(Make(Tok::kIdent, start, std::string(s_.substr(start, i_ - start))));
      } else if (IsDigit(c) || (c == '-' && i_ + 1 < s_.size() && IsDigit(s_[i_ + 1]))) {
        LexNumber(out);
      } else if (c == '\'') {
        LexString(out);
      } else if (c == '$' && i_ + 1 < s_.size() && s_[i_ + 1] == '{') {
        LexParam(out);
      } else {
        LexPunct(out);
      }
    }
    Token end;
    end.kind = Tok::kEnd;
    end.range = Range(s_.size(), s_.size());
    out.push_back(end);
    return out;
  }

 private:
  Token Make(Tok kind, std::size_t start, std::string text = {}) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.range = Range(start, i_);
    return t;
  }

  void CheckUtf8() {
    namespace utf = boost::locale::utf;
    const char *p = s_.data(), *e = s_.data() + s_.size();
    while (p != e) {
      const char *at = p;
      utf::code_point cp = utf::utf_traits<char>::decode(p, e);
      if (cp == utf::illegal || cp == utf::incomplete) {
        std::size_t off = static_cast<std::size_t>(at - s_.data());
        AddDiag(diags_, Range(off, off + 1), "Encoding", "invalid UTF-8 byte");
        p = at + 1;
      }
    }
  }

  void SkipSpace() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        ++i_;
      } else if (c == '-' && i_ + 1 < s_.size() && s_[i_ + 1] == '-') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  void LexNumber(std::vector<Token> &out) {
    std::size_t start = i_;
    if (s_[i_] == '-') ++i_;
    while (i_ < s_.size() && IsDigit(s_[i_])) ++i_;
    if (i_ + 1 < s_.size() && s_[i_] == '.' && IsDigit(s_[i_ + 1])) {
      ++i_;
      while (i_ < s_.size() && IsDigit(s_[i_])) ++i_;
    }
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
      if (j < s_.size() && IsDigit(s_[j])) {
        i_ = j;
        while (i_ < s_.size() && IsDigit(s_[i_])) ++i_;
      }
    }
    Token t = Make(Tok::kNumber, start, std::string(s_.substr(start, i_ - start)));
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + i_, t.number);
    if (ec != std::errc() || !std::isfinite(t.number)) {
      AddDiag(diags_, t.range, "Syntax", "number '" + t.text + "' is out of range");
      t.number = 0;
    }
    if (i_ < s_.size() && IsIdentChar(s_[i_])) {
      std::size_t bad = i_;
      while (i_ < s_.size() && IsIdentChar(s_[i_])) ++i_;
      AddDiag(diags_, Range(start, i_), "Syntax",
              "malformed number '" + std::string(s_.substr(start, i_ - start)) + "'",
              "separate '" + std::string(s_.substr(bad, i_ - bad)) +
                  "' from the number");
      t.range = Range(start, i_);
    }
    out.push_back(std::move(t));
  }

  void LexString(std::vector<Token> &out) {
    std::size_t start = i_++;
    std::string value;
    while (true) {
      if (i_ >= s_.size()) {
        AddDiag(diags_, Range(start, s_.size()), "Syntax", "unterminated string literal",
                "close it with a single quote");
        break;
      }
      char c = s_[i_++];
      if (c == '\'') {
        if (i_ < s_.size() && s_[i_] == '\'') {
          value += '\'';
          ++i_;
          continue;
        }
        break;
      }
      value += c;
    }
    out.push_back(Make(Tok::kString, start, std::move(value)));
  }

  void LexParam(std::vector<Token> &out) {
    std::size_t start = i_;
    i_ += 2;
    std::size_t name_begin = i_;
    while (i_ < s_.size() && IsIdentChar(s_[i_])) ++i_;
    std::string name(s_.substr(name_begin, i_ - name_begin));
    std::optional<std::string> def;
    if (i_ < s_.size() && s_[i_] == ':') {
      std::size_t d = ++i_;
      while (i_ < s_.size() && s_[i_] != '}' && s_[i_] != '\n') ++i_;
      def = std::string(s_.substr(d, i_ - d));
    }
    bool closed = i_ < s_.size() && s_[i_] == '}';
    if (closed) ++i_;
    if (name.empty() || !IsIdentStart(name[0]) || !closed) {
      AddDiag(diags_, Range(start, i_), "Syntax", "malformed parameter placeholder",
              "write ${name} or ${name:default}");
    }
    Token t = Make(Tok::kParam, start, std::move(name));
    t.param_default = std::move(def);
    out.push_back(std::move(t));
  }

  void LexPunct(std::vector<Token> &out) {
    std::size_t start = i_;
    char c = s_[i_++];
    auto two = [&](char next) {
      if (i_ < s_.size() && s_[i_] == next) {
        ++i_;
        return true;
      }
      return false;
    };
    switch (c) {
      case ',': out.push_back(Make(Tok::kComma, start)); return;
      case '.': out.push_back(Make(Tok::kDot, start)); return;
      case '(': out.push_back(Make(Tok::kLParen, start)); return;
      case ')': out.push_back(Make(Tok::kRParen, start)); return;
      case '=': two('='); out.push_back(Make(Tok::kEq, start)); return;
      case '!':
        if (two('=')) {
          out.push_back(Make(Tok::kNe, start));
          return;
        }
        break;
      case '<':
        if (two('=')) out.push_back(Make(Tok::kLe, start));
        else if (two('>')) out.push_back(Make(Tok::kNe, start));
        else out.push_back(Make(Tok::kLt, start));
        return;
      case '>':
        out.push_back(Make(two('=') ? Tok::kGe : Tok::kGt, start));
        return;
      default:
        break;
    }
    // Skip the rest of a multi-byte character.
    while (i_ < s_.size() && (static_cast<unsigned char>(s_[i_]) & 0xC0) == 0x80) ++i_;
    AddDiag(diags_, Range(start, i_), "Syntax",
            "unexpected character '" + std::string(s_.substr(start, i_ - start)) + "'");
  }

  std::string_view s_;
  std::vector<Diagnostic> &diags_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

struct ParseAbort {};

const char *const kClauseKeywords[] = {"from", "where", "group", "having", "union",
                                       "intersect"};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic> &diags)
      : t_(std::move(tokens)), diags_(diags) {}

  std::optional<Query> Run() {
    std::optional<Query> q;
    try {
      q = ParseQuery(/*recover=*/true);
      if (Cur().kind != Tok::kEnd) {
        Fail("unexpected " + Describe(Cur()) + " after the end of the query");
      }
    } catch (const ParseAbort &) {
      q.reset();
    }
    return q;
  }

 private:
  const Token &Cur() const { return t_[p_]; }
  const Token &Peek(std::size_t k = 1) const {
    return t_[std::min(p_ + k, t_.size() - 1)];
  }
  void Advance() {
    if (t_[p_].kind != Tok::kEnd) ++p_;
  }

  bool IsKw(const Token &t, std::string_view kw) const {
    return t.kind == Tok::kIdent && NameIs(t.text, kw);
  }
  bool AtKw(std::string_view kw) const { return IsKw(Cur(), kw); }
  bool AcceptKw(std::string_view kw) {
    if (!AtKw(kw)) return false;
    Advance();
    return true;
  }

  static std::string Describe(const Token &t) {
    switch (t.kind) {
      case Tok::kEnd: return "end of input";
      case Tok::kIdent:
        return IsReserved(t.text) ? "keyword '" + t.text + "'" : "identifier '" + t.text + "'";
      case Tok::kNumber: return "number '" + t.text + "'";
      case Tok::kString: return "string literal";
      case Tok::kParam: return "parameter '${" + t.text + "}'";
      case Tok::kComma: return "','";
      case Tok::kDot: return "'.'";
      case Tok::kLParen: return "'('";
      case Tok::kRParen: return "')'";
      default: return "operator";
    }
  }

  [[noreturn]] void Fail(const std::string &message, const std::string &hint = {}) {
    SourceRange r = Cur().range;
    if (diags_.empty() || diags_.back().range.begin != r.begin ||
        diags_.back().code != "Syntax") {
      AddDiag(diags_, r, "Syntax", message, hint);
    }
    throw ParseAbort{};
  }

  void Expect(Tok kind, const char *what) {
    if (Cur().kind != kind) Fail(std::string("expected ") + what + ", found " + Describe(Cur()));
    Advance();
  }
  void ExpectKw(std::string_view kw) {
    if (!AcceptKw(kw)) {
      Fail("expected '" + std::string(kw) + "', found " + Describe(Cur()));
    }
  }

  std::string ExpectIdent(const char *what, SourceRange *range = nullptr) {
    if (Cur().kind != Tok::kIdent) Fail(std::string("expected ") + what + ", found " + Describe(Cur()));
    if (IsReserved(Cur().text)) {
      Fail(std::string("expected ") + what + ", found " + Describe(Cur()),
           "reserved words cannot be used as names");
    }
    if (range) *range = Cur().range;
    std::string s = Cur().text;
    Advance();
    return s;
  }

  bool AtClauseKeyword() const {
    for (const char *kw : kClauseKeywords) {
      if (AtKw(kw)) return true;
    }
    return false;
  }

  void SkipToClause() {
    while (Cur().kind != Tok::kEnd && !AtClauseKeyword()) Advance();
  }

  template <typename F>
  void Guarded(bool recover, F &&fn) {
    if (!recover) {
      fn();
      return;
    }
    try {
      fn();
    } catch (const ParseAbort &) {
      failed_ = true;
      depth_ = 0;
      SkipToClause();
    }
  }

  Query ParseQuery(bool recover) {
    Query q;
    q.range.begin = Cur().range.begin;
    q.cores.push_back(ParseCore(recover));
    while (AtKw("union") || AtKw("intersect")) {
      q.ops.push_back(AtKw("union") ? SetOp::kUnion : SetOp::kIntersect);
      Advance();
      q.cores.push_back(ParseCore(recover));
    }
    q.range.end = t_[p_ > 0 ? p_ - 1 : 0].range.end;
    if (failed_ && !recover) throw ParseAbort{};
    return q;
  }

  SelectCore ParseCore(bool recover) {
    SelectCore core;
    core.range.begin = Cur().range.begin;
    Guarded(recover, [&] {
      ExpectKw("select");
      core.select.push_back(ParseExpr());
      while (Cur().kind == Tok::kComma) {
        Advance();
        core.select.push_back(ParseExpr());
      }
    });
    Guarded(recover, [&] {
      ExpectKw("from");
      core.from.push_back(ParseFromItem());
      while (Cur().kind == Tok::kComma) {
        Advance();
        core.from.push_back(ParseFromItem());
      }
    });
    if (AtKw("where")) {
      Guarded(recover, [&] {
        Advance();
        core.where = ParseExpr();
      });
    }
    if (AtKw("group")) {
      Guarded(recover, [&] { core.group = ParseGroup(); });
    }
    if (AtKw("having")) {
      Guarded(recover, [&] {
        Fail("'having' requires a 'group' clause",
             "add 'group vertically aligned(...) as G' before 'having'");
      });
    }
    if (recover && !AtKw("union") && !AtKw("intersect") && Cur().kind != Tok::kEnd) {
      Guarded(recover, [&] {
        Fail("unexpected " + Describe(Cur()),
             "expected 'where', 'group', 'union', 'intersect' or the end of the query");
      });
      // Recovery may stop on a clause keyword this core already passed.
      while (Cur().kind != Tok::kEnd && !AtKw("union") && !AtKw("intersect")) {
        Advance();
        SkipToClause();
      }
    }
    core.range.end = t_[p_ > 0 ? p_ - 1 : 0].range.end;
    return core;
  }

  FromItem ParseFromItem() {
    FromItem item;
    std::uint32_t begin = Cur().range.begin;
    item.source = ParsePrimary();
    if (item.source.kind != ExprKind::kCall && item.source.kind != ExprKind::kSubquery) {
      diags_.push_back(Diagnostic{Severity::kError, item.source.range, "Syntax",
                                  "expected a source such as R(D), RegEx('...', D), "
                                  "Dict('...', D), A(...) or a subquery",
                                  {}});
      throw ParseAbort{};
    }
    item.source.range.begin = begin;
    ExpectKw("as");
    item.alias = ExpectIdent("an alias", &item.alias_range);
    return item;
  }

  GroupClause ParseGroup() {
    GroupClause g;
    g.range.begin = Cur().range.begin;
    ExpectKw("group");
    if (AcceptKw("vertically")) {
      g.axis = GroupAxis::kVertical;
    } else if (AcceptKw("horizontally")) {
      g.axis = GroupAxis::kHorizontal;
    } else {
      Fail("expected 'vertically' or 'horizontally', found " + Describe(Cur()));
    }
    ExpectKw("aligned");
    Expect(Tok::kLParen, "'('");
    g.input = ExpectIdent("the grouped alias", &g.input_range);
    while (Cur().kind == Tok::kComma) {
      Advance();
      GroupOption opt;
      opt.range.begin = Cur().range.begin;
      opt.name = ExpectIdent("an option name");
      Expect(Tok::kEq, "'='");
      opt.value = ParseOperand();
      opt.range.end = opt.value.range.end;
      g.options.push_back(std::move(opt));
    }
    Expect(Tok::kRParen, "')'");
    ExpectKw("as");
    g.alias = ExpectIdent("a group alias", &g.alias_range);
    if (AcceptKw("using")) {
      g.aggregate = ExpectIdent("an aggregate name", &g.aggregate_range);
    }
    if (AcceptKw("having")) g.having = ParseExpr();
    g.range.end = t_[p_ - 1].range.end;
    return g;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser &p) : p(p) {
      if (++p.depth_ > kMaxDepth) {
        --p.depth_;
        p.Fail("query is nested too deeply");
      }
    }
    ~DepthGuard() { --p.depth_; }
    Parser &p;
  };

  Expr ParseExpr() {
    DepthGuard guard(*this);
    return ParseBinary(ExprKind::kOr, "or");
  }

  Expr ParseBinary(ExprKind kind, std::string_view kw) {
    Expr first = kind == ExprKind::kOr ? ParseBinary(ExprKind::kAnd, "and") : ParseNot();
    if (!AtKw(kw)) return first;
    Expr e;
    e.kind = kind;
    e.range.begin = first.range.begin;
    e.args.push_back(std::move(first));
    while (AcceptKw(kw)) {
      e.args.push_back(kind == ExprKind::kOr ? ParseBinary(ExprKind::kAnd, "and") : ParseNot());
    }
    e.range.end = e.args.back().range.end;
    return e;
  }

  Expr ParseNot() {
    DepthGuard guard(*this);
    if (AtKw("not")) {
      Expr e;
      e.kind = ExprKind::kNot;
      e.range.begin = Cur().range.begin;
      Advance();
      e.args.push_back(ParseNot());
      e.range.end = e.args[0].range.end;
      return e;
    }
    return ParseCompare();
  }

  Expr ParseCompare() {
    Expr lhs = ParseOperand();
    std::optional<CmpOp> op;
    switch (Cur().kind) {
      case Tok::kLt: op = CmpOp::kLt; break;
      case Tok::kLe: op = CmpOp::kLe; break;
      case Tok::kGt: op = CmpOp::kGt; break;
      case Tok::kGe: op = CmpOp::kGe; break;
      case Tok::kEq: op = CmpOp::kEq; break;
      case Tok::kNe: op = CmpOp::kNe; break;
      default: return lhs;
    }
    Advance();
    Expr e;
    e.kind = ExprKind::kCompare;
    e.op = *op;
    e.range.begin = lhs.range.begin;
    e.args.push_back(std::move(lhs));
    e.args.push_back(ParseOperand());
    e.range.end = e.args[1].range.end;
    return e;
  }

  Expr ParseOperand() {
    Expr e = ParsePrimary();
    while (Cur().kind == Tok::kDot) {
      Advance();
      Expr f;
      f.kind = ExprKind::kField;
      f.range.begin = e.range.begin;
      if (Cur().kind != Tok::kIdent) Fail("expected a field name after '.', found " + Describe(Cur()));
      f.text = Cur().text;
      f.range.end = Cur().range.end;
      Advance();
      f.args.push_back(std::move(e));
      e = std::move(f);
    }
    return e;
  }

  Expr ParsePrimary() {
    DepthGuard guard(*this);
    const Token &t = Cur();
    Expr e;
    e.range = t.range;
    switch (t.kind) {
      case Tok::kNumber:
        e.kind = ExprKind::kNumber;
        e.number = t.number;
        Advance();
        return e;
      case Tok::kString:
        e.kind = ExprKind::kString;
        e.text = t.text;
        Advance();
        return e;
      case Tok::kParam:
        e.kind = ExprKind::kParam;
        e.text = t.text;
        e.param_default = t.param_default;
        Advance();
        return e;
      case Tok::kLParen: {
        std::uint32_t begin = t.range.begin;
        Advance();
        if (AtKw("select")) {
          e.kind = ExprKind::kSubquery;
          e.subquery.push_back(ParseQuery(/*recover=*/false));
          Expect(Tok::kRParen, "')' to close the subquery");
          e.range = {begin, t_[p_ - 1].range.end};
          return e;
        }
        Expr inner = ParseExpr();
        Expect(Tok::kRParen, "')'");
        return inner;
      }
      case Tok::kIdent:
        break;
      default:
        Fail("expected an expression, found " + Describe(t));
    }
    if (NameIs(t.text, "inf")) {
      e.kind = ExprKind::kNumber;
      e.number = std::numeric_limits<double>::infinity();
      Advance();
      return e;
    }
    if (NameIs(t.text, "true") || NameIs(t.text, "false")) {
      e.kind = ExprKind::kBool;
      e.flag = NameIs(t.text, "true");
      Advance();
      return e;
    }
    if (IsReserved(t.text)) Fail("expected an expression, found " + Describe(t));
    e.text = t.text;
    Advance();
    if (Cur().kind != Tok::kLParen) {
      e.kind = ExprKind::kName;
      return e;
    }
    e.kind = ExprKind::kCall;
    Advance();
    if (Cur().kind != Tok::kRParen) {
      e.args.push_back(ParseExpr());
      while (Cur().kind == Tok::kComma) {
        Advance();
        e.args.push_back(ParseExpr());
      }
    }
    Expect(Tok::kRParen, "',' or ')'");
    e.range.end = t_[p_ - 1].range.end;
    return e;
  }

  std::vector<Token> t_;
  std::vector<Diagnostic> &diags_;
  std::size_t p_ = 0;
  int depth_ = 0;
  bool failed_ = false;
};

// ---------------------------------------------------------------------------
// Printer

enum Level { kLevelOr = 1, kLevelAnd, kLevelNot, kLevelCompare, kLevelOperand };

int LevelOf(const Expr &e) {
  switch (e.kind) {
    case ExprKind::kOr: return kLevelOr;
    case ExprKind::kAnd: return kLevelAnd;
    case ExprKind::kNot: return kLevelNot;
    case ExprKind::kCompare: return kLevelCompare;
    default: return kLevelOperand;
  }
}

std::string FormatNumber(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

void PrintQuery(const Query &q, std::string &out);

void PrintExpr(const Expr &e, int min_level, std::string &out) {
  bool paren = LevelOf(e) < min_level;
  if (paren) out += '(';
  auto join = [&](std::string_view sep, int level) {
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (i) out += sep;
      PrintExpr(e.args[i], level, out);
    }
  };
  switch (e.kind) {
    case ExprKind::kOr: join(" or ", kLevelAnd); break;
    case ExprKind::kAnd: join(" and ", kLevelNot); break;
    case ExprKind::kNot:
      out += "not ";
      PrintExpr(e.args.at(0), kLevelNot, out);
      break;
    case ExprKind::kCompare:
      PrintExpr(e.args.at(0), kLevelOperand, out);
      out += ' ';
      out += CmpOpText(e.op);
      out += ' ';
      PrintExpr(e.args.at(1), kLevelOperand, out);
      break;
    case ExprKind::kCall:
      out += e.text;
      out += '(';
      join(", ", kLevelOr);
      out += ')';
      break;
    case ExprKind::kName: out += e.text; break;
    case ExprKind::kField:
      PrintExpr(e.args.at(0), kLevelOperand, out);
      out += '.';
      out += e.text;
      break;
    case ExprKind::kNumber: out += FormatNumber(e.number); break;
    case ExprKind::kString: out += Quote(e.text); break;
    case ExprKind::kBool: out += e.flag ? "true" : "false"; break;
    case ExprKind::kParam:
      out += "${" + e.text;
      if (e.param_default) out += ":" + *e.param_default;
      out += '}';
      break;
    case ExprKind::kSubquery:
      out += '(';
      PrintQuery(e.subquery.at(0), out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

void PrintCore(const SelectCore &c, std::string &out) {
  out += "select ";
  for (std::size_t i = 0; i < c.select.size(); ++i) {
    if (i) out += ", ";
    PrintExpr(c.select[i], kLevelOr, out);
  }
  out += " from ";
  for (std::size_t i = 0; i < c.from.size(); ++i) {
    if (i) out += ", ";
    PrintExpr(c.from[i].source, kLevelOperand, out);
    out += " as " + c.from[i].alias;
  }
  if (c.where) {
    out += " where ";
    PrintExpr(*c.where, kLevelOr, out);
  }
  if (c.group) {
    const GroupClause &g = *c.group;
    out += g.axis == GroupAxis::kVertical ? " group vertically aligned("
                                          : " group horizontally aligned(";
    out += g.input;
    for (const auto &opt : g.options) {
      out += ", " + opt.name + "=";
      PrintExpr(opt.value, kLevelOperand, out);
    }
    out += ") as " + g.alias;
    if (g.aggregate) out += " using " + *g.aggregate;
    if (g.having) {
      out += " having ";
      PrintExpr(*g.having, kLevelOr, out);
    }
  }
}

void PrintQuery(const Query &q, std::string &out) {
  for (std::size_t i = 0; i < q.cores.size(); ++i) {
    if (i) out += q.ops.at(i - 1) == SetOp::kUnion ? " union " : " intersect ";
    PrintCore(q.cores[i], out);
  }
}

// ---------------------------------------------------------------------------
// Parameters

Expr ParamValue(const std::string &value, SourceRange range) {
  Expr e;
  e.range = range;
  double d = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
  if (!value.empty() && ec == std::errc() && ptr == value.data() + value.size() &&
      std::isfinite(d)) {
    e.kind = ExprKind::kNumber;
    e.number = d;
  } else if (NameIs(value, "inf")) {
    e.kind = ExprKind::kNumber;
    e.number = std::numeric_limits<double>::infinity();
  } else if (NameIs(value, "true") || NameIs(value, "false")) {
    e.kind = ExprKind::kBool;
    e.flag = NameIs(value, "true");
  } else {
    e.kind = ExprKind::kString;
    e.text = value;
  }
  return e;
}

void Substitute(Query &q, const std::map<std::string, std::string> &params,
                std::vector<Diagnostic> &diags);

void Substitute(Expr &e, const std::map<std::string, std::string> &params,
                std::vector<Diagnostic> &diags) {
  if (e.kind == ExprKind::kParam) {
    auto it = params.find(e.text);
    if (it != params.end()) {
      e = ParamValue(it->second, e.range);
    } else if (e.param_default) {
      e = ParamValue(*e.param_default, e.range);
    } else {
      diags.push_back(Diagnostic{Severity::kError, e.range, "UnboundParameter",
                                 "parameter '${" + e.text + "}' has no value",
                                 "pass --param " + e.text + "=VALUE"});
    }
    return;
  }
  for (auto &a : e.args) Substitute(a, params, diags);
  for (auto &q : e.subquery) Substitute(q, params, diags);
}

void Substitute(Query &q, const std::map<std::string, std::string> &params,
                std::vector<Diagnostic> &diags) {
  for (auto &core : q.cores) {
    for (auto &s : core.select) Substitute(s, params, diags);
    for (auto &f : core.from) Substitute(f.source, params, diags);
    if (core.where) Substitute(*core.where, params, diags);
    if (core.group) {
      for (auto &opt : core.group->options) Substitute(opt.value, params, diags);
      if (core.group->having) Substitute(*core.group->having, params, diags);
    }
  }
}

}  // namespace

bool Expr::operator==(const Expr &o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case ExprKind::kAnd:
    case ExprKind::kOr:
    case ExprKind::kNot: return args == o.args;
    case ExprKind::kCompare: return op == o.op && args == o.args;
    case ExprKind::kCall:
    case ExprKind::kField: return text == o.text && args == o.args;
    case ExprKind::kName:
    case ExprKind::kString: return text == o.text;
    case ExprKind::kNumber: return number == o.number;
    case ExprKind::kBool: return flag == o.flag;
    case ExprKind::kParam: return text == o.text && param_default == o.param_default;
    case ExprKind::kSubquery: return subquery == o.subquery;
  }
  return false;
}

std::string_view CmpOpText(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "!=";
  }
  return "?";
}

bool NameIs(std::string_view name, std::string_view expected) {
  if (name.size() != expected.size()) return false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (Lower(name[i]) != Lower(expected[i])) return false;
  }
  return true;
}

bool IsReserved(std::string_view word) {
  static const char *const kReserved[] = {
      "select", "from", "where", "as",    "and",       "or",    "not",  "group",
      "having", "union", "intersect", "using", "inf", "true", "false"};
  for (const char *r : kReserved) {
    if (NameIs(word, r)) return true;
  }
  return false;
}

ParseResult Parse(std::string_view text) {
  ParseResult result;
  Lexer lexer(text, result.diagnostics);
  std::vector<Token> tokens = lexer.Run();
  std::size_t lex_errors = result.diagnostics.size();
  Parser parser(std::move(tokens), result.diagnostics);
  std::optional<Query> q = parser.Run();
  SortDiagnostics(result.diagnostics);
  if (lex_errors == 0 && !HasErrors(result.diagnostics)) result.query = std::move(q);
  return result;
}

std::string Print(const Query &query) {
  std::string out;
  PrintQuery(query, out);
  return out;
}

std::string Print(const Expr &expr) {
  std::string out;
  PrintExpr(expr, kLevelOr, out);
  return out;
}

std::vector<Diagnostic> SubstituteParams(
    Query &query, const std::map<std::string, std::string> &params) {
  std::vector<Diagnostic> diags;
  Substitute(query, params, diags);
  SortDiagnostics(diags);
  return diags;
}

}  // namespace vqe::vql
