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

#include <cmath>
#include <map>
#include <string>

#include "vqe/algebra.h"
#include "vqe/error.h"
#include "vqe/vql.h"

namespace vqe::vql {

namespace {

constexpr BuiltinInfo kBuiltins[] = {
    {Builtin::kAllSpans, "R", BuiltinRole::kSource, 1},
    {Builtin::kRegex, "RegEx", BuiltinRole::kSource, 2},
    {Builtin::kDict, "Dict", BuiltinRole::kSource, 2},
    {Builtin::kVirtual, "A", BuiltinRole::kSource, 4},
    {Builtin::kConsolidateContained, "ConsolidateContained", BuiltinRole::kSource, 1},
    {Builtin::kConsolidateOverlap, "ConsolidateOverlap", BuiltinRole::kSource, 1},
    {Builtin::kBlockText, "BlockText", BuiltinRole::kSource, 3},
    {Builtin::kBlockRegion, "BlockRegion", BuiltinRole::kSource, 4},
    {Builtin::kNorthOf, "NorthOf", BuiltinRole::kPredicate, 2},
    {Builtin::kSouthOf, "SouthOf", BuiltinRole::kPredicate, 2},
    {Builtin::kEastOf, "EastOf", BuiltinRole::kPredicate, 2},
    {Builtin::kWestOf, "WestOf", BuiltinRole::kPredicate, 2},
    {Builtin::kStrictNorthOf, "StrictNorthOf", BuiltinRole::kPredicate, 2},
    {Builtin::kStrictSouthOf, "StrictSouthOf", BuiltinRole::kPredicate, 2},
    {Builtin::kStrictEastOf, "StrictEastOf", BuiltinRole::kPredicate, 2},
    {Builtin::kStrictWestOf, "StrictWestOf", BuiltinRole::kPredicate, 2},
    {Builtin::kContains, "Contains", BuiltinRole::kPredicate, 2},
    {Builtin::kTouches, "Touches", BuiltinRole::kPredicate, 2},
    {Builtin::kIntersects, "Intersects", BuiltinRole::kPredicate, 2},
    {Builtin::kPrecedes, "Precedes", BuiltinRole::kPredicate, 3},
    {Builtin::kSpanOverlaps, "SpanOverlaps", BuiltinRole::kPredicate, 2},
    {Builtin::kSpanWithin, "SpanWithin", BuiltinRole::kPredicate, 2},
    {Builtin::kSpanEquals, "SpanEquals", BuiltinRole::kPredicate, 2},
    {Builtin::kContainsPhrase, "ContainsPhrase", BuiltinRole::kPredicate, 2},
    {Builtin::kMatchesRegex, "MatchesRegex", BuiltinRole::kPredicate, 2},
    {Builtin::kAncestorOf, "AncestorOf", BuiltinRole::kPredicate, 2},
    {Builtin::kDescendantOf, "DescendantOf", BuiltinRole::kPredicate, 2},
    {Builtin::kCentroid, "Centroid", BuiltinRole::kSpanFunction, 1},
    {Builtin::kMinimalRegion, "MinimalRegion", BuiltinRole::kSpanFunction, 1},
    {Builtin::kMaximalRegion, "MaximalRegion", BuiltinRole::kSpanFunction, 1},
    {Builtin::kArea, "Area", BuiltinRole::kNumberFunction, 1},
    {Builtin::kCount, "count", BuiltinRole::kAggregate, 1},
};

constexpr std::string_view kAttrNames[] = {"VisualSpan", "Span", "Region", "Text"};
constexpr std::string_view kFieldNames[] = {"xl", "yl", "xh", "yh", "begin", "end"};

// Static type of an expression.
struct Type {
  enum Kind { kError, kSpan, kNumber, kString, kBool } kind = kError;
  bool sourced = false;  // spans: always carries a store region id
  bool finite = false;   // spans: never has infinite bounds
  bool group = false;    // spans: the group alias of a grouped query

  static Type Span(bool sourced, bool finite) { return {kSpan, sourced, finite, false}; }
  static Type Of(Kind k) { return {k, false, false, false}; }
};

struct Binding {
  Type type;
  bool is_virtual = false;
};

using Scope = std::map<std::string, Binding>;

enum class Context { kWhere, kHaving, kSelect };

bool IsInteger(double v) { return std::isfinite(v) && v == std::floor(v); }

class Validator {
 public:
  explicit Validator(const Catalog &catalog) : catalog_(catalog) {}

  std::vector<Diagnostic> &diags() { return diags_; }

  // Returns the column types of the query (empty on a fatal error).
  std::vector<Type> CheckQuery(const Query &q) {
    std::vector<Type> first;
    for (std::size_t i = 0; i < q.cores.size(); ++i) {
      std::vector<Type> cols = CheckCore(q.cores[i]);
      if (i == 0) {
        first = cols;
      } else if (cols.size() != first.size()) {
        Error(q.cores[i].range, "WidthMismatch",
              "set operation combines " + std::to_string(first.size()) + " and " +
                  std::to_string(cols.size()) + " columns");
      } else {
        for (std::size_t c = 0; c < cols.size(); ++c) {
          first[c].sourced = first[c].sourced && cols[c].sourced;
          first[c].finite = first[c].finite && cols[c].finite;
        }
      }
    }
    return first;
  }

 private:
  void Error(SourceRange range, std::string code, std::string message,
             std::string hint = {}) {
    diags_.push_back(Diagnostic{Severity::kError, range, std::move(code),
                                std::move(message), std::move(hint)});
  }

  std::vector<Type> CheckCore(const SelectCore &core) {
    Scope scope;
    for (const auto &item : core.from) {
      Binding b;
      b.type = CheckSource(item.source, /*nested=*/false);
      b.is_virtual = IsVirtual(item.source);
      if (NameIs(item.alias, kDocumentVariable)) {
        Error(item.alias_range, "ReservedAlias",
              "'" + item.alias + "' is the document variable and cannot be an alias");
        continue;
      }
      if (!scope.emplace(item.alias, b).second) {
        Error(item.alias_range, "DuplicateAlias", "alias '" + item.alias + "' is bound twice");
      }
    }
    if (core.where) Condition(*core.where, scope, Context::kWhere);

    Scope out_scope = scope;
    if (core.group) out_scope = CheckGroup(core, scope);

    std::vector<Type> cols;
    for (const auto &item : core.select) {
      if (item.kind != ExprKind::kField || !ParseAttr(item.text)) {
        Error(item.range, "UnknownAttribute",
              "select items must be span attributes such as R1.VisualSpan",
              "attributes: VisualSpan, Span, Region, Text");
        cols.push_back(Type{});
        continue;
      }
      Type t = Value(item.args.at(0), out_scope, Context::kSelect);
      if (t.kind != Type::kSpan && t.kind != Type::kError) {
        Error(item.args[0].range, "TypeMismatch", "attributes apply to spans only");
      }
      t.group = false;
      cols.push_back(t);
    }
    return cols;
  }

  Scope CheckGroup(const SelectCore &core, const Scope &scope) {
    const GroupClause &g = *core.group;
    Scope out;
    std::size_t sources = 0;
    for (const auto &item : core.from) {
      auto it = scope.find(item.alias);
      if (it == scope.end()) continue;
      if (it->second.is_virtual) {
        out.emplace(item.alias, it->second);
      } else {
        ++sources;
      }
    }
    auto in = scope.find(g.input);
    if (in == scope.end()) {
      Error(g.input_range, "UnknownAlias", "unknown alias '" + g.input + "'");
    } else if (in->second.is_virtual) {
      Error(g.input_range, "GroupInput", "cannot group the virtual region '" + g.input + "'");
    } else if (sources != 1) {
      Error(g.input_range, "GroupInput",
            "grouped queries take exactly one non-virtual source, found " +
                std::to_string(sources));
    } else if (in->second.type.kind == Type::kSpan && !in->second.type.finite) {
      Error(g.input_range, "InfiniteRegion",
            "alignment needs finite regions; '" + g.input + "' may be infinite");
    }

    std::map<std::string, int> seen;
    for (const auto &opt : g.options) CheckOption(opt, seen);

    bool super = false;
    if (g.aggregate) {
      if (NameIs(*g.aggregate, kAggMinimalSuperRegion)) {
        super = true;
      } else if (!NameIs(*g.aggregate, kAggMinimalBoundingRegion)) {
        Error(g.aggregate_range, "UnknownAggregate",
              "unknown aggregate '" + *g.aggregate + "'",
              "use MinimalBoundingRegion or MinimalSuperRegion");
      }
    }
    if (NameIs(g.alias, kDocumentVariable) || scope.count(g.alias)) {
      Error(g.alias_range, "DuplicateAlias", "alias '" + g.alias + "' is already bound");
    }
    Binding gb;
    gb.type = Type::Span(super, true);
    gb.type.group = true;
    out[g.alias] = gb;
    if (g.having) Condition(*g.having, out, Context::kHaving);
    return out;
  }

  void CheckOption(const GroupOption &opt, std::map<std::string, int> &seen) {
    const Expr &v = opt.value;
    auto bad = [&](const std::string &what) {
      Error(v.range, "BadOption", "option '" + opt.name + "' " + what);
    };
    std::string key;
    for (std::string_view n : {kOptConsecutive, kOptMaxdist, kOptTolerance, kOptMode,
                               kOptScope, kOptMin}) {
      if (NameIs(opt.name, n)) key = n;
    }
    if (key.empty()) {
      Error(opt.range, "UnknownOption", "unknown group option '" + opt.name + "'",
            "options: consecutive, maxdist, tolerance, mode, scope, min");
      return;
    }
    if (seen[key]++) {
      Error(opt.range, "BadOption", "option '" + opt.name + "' is given twice");
      return;
    }
    if (v.kind == ExprKind::kParam) {
      Error(v.range, "UnboundParameter", "parameter '${" + v.text + "}' has no value");
      return;
    }
    auto word = [&]() -> std::optional<std::string> {
      if (v.kind == ExprKind::kString || v.kind == ExprKind::kName) return v.text;
      return std::nullopt;
    };
    if (key == kOptConsecutive) {
      if (v.kind != ExprKind::kBool) bad("expects true or false");
    } else if (key == kOptMaxdist) {
      if (v.kind != ExprKind::kNumber || !(v.number >= 0)) bad("expects a number >= 0 or inf");
    } else if (key == kOptTolerance) {
      if (v.kind != ExprKind::kNumber || !(v.number >= 0) || std::isinf(v.number)) {
        bad("expects a finite number >= 0");
      }
    } else if (key == kOptMin) {
      if (v.kind != ExprKind::kNumber || !IsInteger(v.number) || v.number < 2) {
        bad("expects an integer >= 2");
      }
    } else if (key == kOptMode) {
      auto w = word();
      if (!w || !(NameIs(*w, "leading") || NameIs(*w, "center") || NameIs(*w, "trailing"))) {
        bad("expects leading, center or trailing");
      }
    } else if (key == kOptScope) {
      auto w = word();
      if (!w || !(NameIs(*w, "rows") || NameIs(*w, "store"))) bad("expects rows or store");
    }
  }

  static bool IsVirtual(const Expr &source) {
    if (source.kind != ExprKind::kCall) return false;
    const BuiltinInfo *info = LookupBuiltin(source.text);
    return info && info->id == Builtin::kVirtual;
  }

  void RequireDocument(const Expr &e) {
    if (e.kind != ExprKind::kName || !NameIs(e.text, kDocumentVariable)) {
      Error(e.range, "TypeMismatch", "expected the document variable D");
    }
  }

  std::optional<double> NumberLiteral(const Expr &e, const char *what) {
    if (e.kind == ExprKind::kParam) {
      Error(e.range, "UnboundParameter", "parameter '${" + e.text + "}' has no value");
      return std::nullopt;
    }
    if (e.kind != ExprKind::kNumber) {
      Error(e.range, "TypeMismatch", std::string("expected a number literal for ") + what);
      return std::nullopt;
    }
    return e.number;
  }

  std::optional<std::int64_t> CountLiteral(const Expr &e, const char *what,
                                           double min) {
    auto v = NumberLiteral(e, what);
    if (!v) return std::nullopt;
    if (!IsInteger(*v) || *v < min) {
      Error(e.range, "BadArgument",
            std::string(what) + " must be an integer >= " + std::to_string(int(min)));
      return std::nullopt;
    }
    return static_cast<std::int64_t>(*v);
  }

  std::optional<std::string> StringLiteral(const Expr &e, const char *what) {
    if (e.kind == ExprKind::kParam) {
      Error(e.range, "UnboundParameter", "parameter '${" + e.text + "}' has no value");
      return std::nullopt;
    }
    if (e.kind != ExprKind::kString) {
      Error(e.range, "TypeMismatch", std::string("expected a string literal for ") + what);
      return std::nullopt;
    }
    return e.text;
  }

  bool CheckArity(const Expr &call, const BuiltinInfo &info) {
    if (static_cast<int>(call.args.size()) == info.arity) return true;
    Error(call.range, "Arity",
          std::string(info.name) + " expects " + std::to_string(info.arity) +
              (info.arity == 1 ? " argument" : " arguments") + ", got " +
              std::to_string(call.args.size()));
    return false;
  }

  Type CheckSource(const Expr &e, bool nested) {
    if (e.kind == ExprKind::kSubquery) {
      std::vector<Type> cols = CheckQuery(e.subquery.at(0));
      if (cols.size() != 1) {
        Error(e.range, "WidthMismatch", "a subquery source must select exactly one column");
        return Type{};
      }
      return cols[0];
    }
    const BuiltinInfo *info = e.kind == ExprKind::kCall ? LookupBuiltin(e.text) : nullptr;
    if (!info || info->role != BuiltinRole::kSource) {
      Error(e.range, info ? "NotASource" : "UnknownFunction",
            info ? "'" + e.text + "' is not a source"
                 : "unknown source '" + (e.kind == ExprKind::kCall ? e.text : Print(e)) + "'",
            "sources: R(D), RegEx('...', D), Dict('...', D), A(xl, yl, xh, yh), "
            "ConsolidateContained, ConsolidateOverlap, BlockText, BlockRegion, (select ...)");
      return Type{};
    }
    if (!CheckArity(e, *info)) return Type{};
    const auto &a = e.args;
    switch (info->id) {
      case Builtin::kAllSpans:
        RequireDocument(a[0]);
        return Type::Span(true, true);
      case Builtin::kRegex:
        if (auto p = StringLiteral(a[0], "the pattern")) {
          try {
            CompiledRegex re(*p);
          } catch (const vqe::Error &err) {
            Error(a[0].range, "BadPattern", err.what());
          }
        }
        RequireDocument(a[1]);
        return Type::Span(true, true);
      case Builtin::kDict: {
        if (a[0].kind == ExprKind::kString || a[0].kind == ExprKind::kName) {
          if (!catalog_.dictionaries.count(a[0].text)) {
            Error(a[0].range, "UnknownDictionary",
                  "unknown dictionary \"" + a[0].text + "\"",
                  "register it with ingest --dict " + a[0].text + "=PATH");
          }
        } else {
          Error(a[0].range, "TypeMismatch", "expected a dictionary name");
        }
        RequireDocument(a[1]);
        return Type::Span(true, true);
      }
      case Builtin::kVirtual: {
        if (nested) {
          Error(e.range, "TypeMismatch", "virtual regions cannot be nested in a source");
        }
        double v[4];
        bool ok = true;
        static const char *const kNames[] = {"xl", "yl", "xh", "yh"};
        for (int i = 0; i < 4; ++i) {
          auto n = NumberLiteral(a[i], kNames[i]);
          ok = ok && n.has_value();
          v[i] = n.value_or(0);
          if (n && i < 2 && std::isinf(*n)) {
            Error(a[i].range, "InfiniteRegion", "lower bounds must be finite");
            ok = false;
          }
        }
        if (ok && !Region{v[0], v[1], v[2], v[3]}.IsValid()) {
          Error(e.range, "InvalidRegion", "virtual region needs xl <= xh and yl <= yh");
        }
        return Type::Span(false, std::isfinite(v[2]) && std::isfinite(v[3]));
      }
      case Builtin::kConsolidateContained:
      case Builtin::kConsolidateOverlap:
        return CheckSource(a[0], true);
      case Builtin::kBlockText: {
        CheckSource(a[0], true);
        CountLiteral(a[1], "max_gap", 0);
        CountLiteral(a[2], "min_count", 1);
        return Type::Span(true, true);
      }
      case Builtin::kBlockRegion: {
        Type in = CheckSource(a[0], true);
        if (in.kind == Type::kSpan && !in.finite) {
          Error(a[0].range, "InfiniteRegion", "BlockRegion needs finite regions");
        }
        for (int i = 1; i <= 2; ++i) {
          auto d = NumberLiteral(a[i], i == 1 ? "x_dist" : "y_dist");
          if (d && !(*d >= 0)) Error(a[i].range, "BadArgument", "distances must be >= 0");
        }
        CountLiteral(a[3], "min_count", 1);
        return Type::Span(true, true);
      }
      default:
        return Type{};
    }
  }

  void Condition(const Expr &e, const Scope &scope, Context ctx) {
    Type t = Value(e, scope, ctx);
    if (t.kind != Type::kBool && t.kind != Type::kError) {
      Error(e.range, "TypeMismatch", "expected a condition, found '" + Print(e) + "'");
    }
  }

  // Span argument with optional requirements; returns the span type.
  Type SpanArg(const Expr &e, const Scope &scope, Context ctx, const BuiltinInfo &fn,
               bool need_sourced, bool need_finite) {
    Type t = Value(e, scope, ctx);
    if (t.kind == Type::kError) return t;
    if (t.kind != Type::kSpan) {
      Error(e.range, "TypeMismatch", std::string(fn.name) + " expects a span argument");
      return Type{};
    }
    if (need_finite && !t.finite) {
      Error(e.range, "InfiniteRegion",
            std::string(fn.name) + " needs a finite region; '" + Print(e) +
                "' may have infinite bounds");
    }
    if (need_sourced && !t.sourced) {
      Error(e.range, "NotSourced",
            std::string(fn.name) + " needs a store region; '" + Print(e) +
                "' may be synthesized");
    }
    return t;
  }

  Type Value(const Expr &e, const Scope &scope, Context ctx) {
    switch (e.kind) {
      case ExprKind::kAnd:
      case ExprKind::kOr:
      case ExprKind::kNot:
        for (const auto &a : e.args) Condition(a, scope, ctx);
        return Type::Of(Type::kBool);
      case ExprKind::kCompare: {
        bool ok = true;
        for (const auto &a : e.args) {
          Type t = Value(a, scope, ctx);
          if (t.kind == Type::kError) {
            ok = false;
          } else if (t.kind != Type::kNumber) {
            Error(a.range, "TypeMismatch", "comparisons take numbers, found '" + Print(a) + "'");
            ok = false;
          }
        }
        return ok ? Type::Of(Type::kBool) : Type{};
      }
      case ExprKind::kName: {
        if (NameIs(e.text, kDocumentVariable)) {
          Error(e.range, "TypeMismatch", "the document variable D is only a source argument");
          return Type{};
        }
        auto it = scope.find(e.text);
        if (it == scope.end()) {
          std::string known;
          for (const auto &[name, b] : scope) known += (known.empty() ? "" : ", ") + name;
          Error(e.range, "UnknownAlias", "unknown alias '" + e.text + "'",
                known.empty() ? "" : "in scope: " + known);
          return Type{};
        }
        return it->second.type;
      }
      case ExprKind::kField: {
        Type obj = Value(e.args.at(0), scope, ctx);
        if (!ParseField(e.text)) {
          Error(e.range, "UnknownField", "unknown field '" + e.text + "'",
                ParseAttr(e.text) ? "attributes are only valid in the select list"
                                  : "fields: xl, yl, xh, yh, begin, end");
          return Type{};
        }
        if (obj.kind == Type::kError) return obj;
        if (obj.kind != Type::kSpan) {
          Error(e.args[0].range, "TypeMismatch", "fields apply to spans only");
          return Type{};
        }
        return Type::Of(Type::kNumber);
      }
      case ExprKind::kNumber: return Type::Of(Type::kNumber);
      case ExprKind::kString: return Type::Of(Type::kString);
      case ExprKind::kBool: return Type::Of(Type::kBool);
      case ExprKind::kParam:
        Error(e.range, "UnboundParameter", "parameter '${" + e.text + "}' has no value",
              "pass --param " + e.text + "=VALUE");
        return Type{};
      case ExprKind::kSubquery:
        Error(e.range, "TypeMismatch", "subqueries may only appear in FROM");
        return Type{};
      case ExprKind::kCall:
        return Call(e, scope, ctx);
    }
    return Type{};
  }

  Type Call(const Expr &e, const Scope &scope, Context ctx) {
    const BuiltinInfo *info = LookupBuiltin(e.text);
    if (!info) {
      Error(e.range, "UnknownFunction", "unknown predicate or function '" + e.text + "'");
      for (const auto &a : e.args) Value(a, scope, ctx);
      return Type{};
    }
    if (info->role == BuiltinRole::kSource) {
      Error(e.range, "NotAPredicate",
            "'" + std::string(info->name) + "' is a source and may only appear in FROM");
      return Type{};
    }
    if (!CheckArity(e, *info)) {
      for (const auto &a : e.args) Value(a, scope, ctx);
      return info->role == BuiltinRole::kPredicate ? Type::Of(Type::kBool) : Type{};
    }
    const auto &a = e.args;
    switch (info->id) {
      case Builtin::kPrecedes: {
        SpanArg(a[0], scope, ctx, *info, false, false);
        SpanArg(a[1], scope, ctx, *info, false, false);
        CountLiteral(a[2], "the distance", 0);
        return Type::Of(Type::kBool);
      }
      case Builtin::kContainsPhrase: {
        SpanArg(a[0], scope, ctx, *info, true, false);
        if (auto p = StringLiteral(a[1], "the phrase")) {
          try {
            CompiledPhrase phrase(*p);
          } catch (const vqe::Error &err) {
            Error(a[1].range, "EmptyPhrase", "the phrase has no word characters");
          }
        }
        return Type::Of(Type::kBool);
      }
      case Builtin::kMatchesRegex: {
        SpanArg(a[0], scope, ctx, *info, true, false);
        if (auto p = StringLiteral(a[1], "the pattern")) {
          try {
            CompiledRegex re(*p);
          } catch (const vqe::Error &err) {
            Error(a[1].range, "BadPattern", err.what());
          }
        }
        return Type::Of(Type::kBool);
      }
      case Builtin::kAncestorOf:
      case Builtin::kDescendantOf:
        SpanArg(a[0], scope, ctx, *info, true, false);
        SpanArg(a[1], scope, ctx, *info, true, false);
        return Type::Of(Type::kBool);
      case Builtin::kCentroid:
        SpanArg(a[0], scope, ctx, *info, false, true);
        return Type::Span(false, true);
      case Builtin::kMinimalRegion:
      case Builtin::kMaximalRegion:
        SpanArg(a[0], scope, ctx, *info, true, false);
        return Type::Span(true, true);
      case Builtin::kArea:
        SpanArg(a[0], scope, ctx, *info, false, true);
        return Type::Of(Type::kNumber);
      case Builtin::kCount: {
        if (ctx != Context::kHaving) {
          Error(e.range, "MisplacedAggregate", "count(...) is only allowed in HAVING");
          return Type{};
        }
        Type t = Value(a[0], scope, ctx);
        if (t.kind != Type::kError && !t.group) {
          Error(a[0].range, "TypeMismatch", "count expects the group alias");
          return Type{};
        }
        return Type::Of(Type::kNumber);
      }
      default:  // binary span predicates
        SpanArg(a[0], scope, ctx, *info, false, false);
        SpanArg(a[1], scope, ctx, *info, false, false);
        return Type::Of(Type::kBool);
    }
  }

  const Catalog &catalog_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

const BuiltinInfo *LookupBuiltin(std::string_view name) {
  for (const auto &b : kBuiltins) {
    if (NameIs(name, b.name)) return &b;
  }
  return nullptr;
}

const BuiltinInfo &InfoOf(Builtin id) {
  for (const auto &b : kBuiltins) {
    if (b.id == id) return b;
  }
  throw vqe::Error(ErrorCode::kRuntime, "unknown builtin");
}

std::optional<Attr> ParseAttr(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kAttrNames); ++i) {
    if (NameIs(name, kAttrNames[i])) return static_cast<Attr>(i);
  }
  return std::nullopt;
}

std::string_view AttrName(Attr attr) { return kAttrNames[static_cast<int>(attr)]; }

std::optional<Field> ParseField(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kFieldNames); ++i) {
    if (NameIs(name, kFieldNames[i])) return static_cast<Field>(i);
  }
  return std::nullopt;
}

std::string_view FieldName(Field field) { return kFieldNames[static_cast<int>(field)]; }

ValidationResult Validate(const Query &query, const Catalog &catalog) {
  Validator v(catalog);
  v.CheckQuery(query);
  ValidationResult result;
  result.diagnostics = std::move(v.diags());
  SortDiagnostics(result.diagnostics);
  if (!HasErrors(result.diagnostics)) result.typed = TypedQuery{query};
  return result;
}

}  // namespace vqe::vql
