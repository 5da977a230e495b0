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

// VQL: the SQL-like visual query language. See docs/vql.md for the grammar.

#ifndef VQE_VQL_H_
#define VQE_VQL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vqe::vql {

// Byte range [begin, end) in the query text. Positions do not take part in
// AST equality, so a re-parsed pretty print compares equal to the original.
struct SourceRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  friend bool operator==(const SourceRange &, const SourceRange &) {
    return true;
  }
};

enum class ExprKind {
  kAnd,       // args: >= 2 operands
  kOr,        // args: >= 2 operands
  kNot,       // args: 1 operand
  kCompare,   // args: lhs, rhs
  kCall,      // text: function name; args
  kName,      // text: identifier
  kField,     // text: field name; args: object
  kNumber,    // number (may be +inf)
  kString,    // text
  kBool,      // flag
  kParam,     // text: parameter name; param_default
  kSubquery,  // subquery: exactly one query
};

enum class CmpOp { kLt, kLe, kGt, kGe, kEq, kNe };

std::string_view CmpOpText(CmpOp op);

struct Query;

struct Expr {
  ExprKind kind = ExprKind::kName;
  CmpOp op = CmpOp::kEq;
  std::string text;
  double number = 0;
  bool flag = false;
  std::optional<std::string> param_default;
  std::vector<Expr> args;
  std::vector<Query> subquery;
  SourceRange range;

  bool operator==(const Expr &other) const;
};

struct FromItem {
  Expr source;
  std::string alias;
  SourceRange alias_range;

  bool operator==(const FromItem &) const = default;
};

enum class GroupAxis { kVertical, kHorizontal };

struct GroupOption {
  std::string name;
  Expr value;
  SourceRange range;

  bool operator==(const GroupOption &) const = default;
};

// group vertically aligned(R1, consecutive=false) as G [using Agg] [having c]
struct GroupClause {
  GroupAxis axis = GroupAxis::kVertical;
  std::string input;
  SourceRange input_range;
  std::vector<GroupOption> options;
  std::string alias;
  SourceRange alias_range;
  std::optional<std::string> aggregate;
  SourceRange aggregate_range;
  std::optional<Expr> having;
  SourceRange range;

  bool operator==(const GroupClause &) const = default;
};

struct SelectCore {
  std::vector<Expr> select;
  std::vector<FromItem> from;
  std::optional<Expr> where;
  std::optional<GroupClause> group;
  SourceRange range;

  bool operator==(const SelectCore &) const = default;
};

enum class SetOp { kUnion, kIntersect };

// cores[0] ops[0] cores[1] ...; intersect binds tighter than union.
struct Query {
  std::vector<SelectCore> cores;
  std::vector<SetOp> ops;
  SourceRange range;

  bool operator==(const Query &) const = default;
};

// ---------------------------------------------------------------------------
// Diagnostics

enum class Severity { kError, kWarning, kNote };

struct Diagnostic {
  Severity severity = Severity::kError;
  SourceRange range;
  // Stable machine-readable category, e.g. "Syntax", "UnknownAlias".
  std::string code;
  std::string message;
  std::string hint;
};

// Sorts by position (stable for equal positions).
void SortDiagnostics(std::vector<Diagnostic> &diags);
bool HasErrors(const std::vector<Diagnostic> &diags);

// "line:col: error[Code]: message" plus the source line and a caret marker.
std::string RenderDiagnostics(std::string_view source,
                              const std::vector<Diagnostic> &diags, bool color);
// Honors VQL_COLOR={auto,never,always}; auto colors only a terminal.
bool ColorFromEnvironment(int fd);

// ---------------------------------------------------------------------------
// Parsing and printing

struct ParseResult {
  std::optional<Query> query;  // set only when there are no errors
  std::vector<Diagnostic> diagnostics;
};

// Total: never throws on any input; reports every clause-level error.
ParseResult Parse(std::string_view text);

// Canonical text that parses back to an equal AST.
std::string Print(const Query &query);
std::string Print(const Expr &expr);

// Replaces ${name} placeholders. Values parse as numbers ("inf" included),
// true/false, and otherwise strings; unset parameters fall back to their
// ${name:default}. Unbound parameters are reported and left in place.
std::vector<Diagnostic> SubstituteParams(
    Query &query, const std::map<std::string, std::string> &params);

// ---------------------------------------------------------------------------
// Built-in sources, predicates and functions

enum class BuiltinRole {
  kSource,          // FROM only
  kPredicate,       // boolean, WHERE/HAVING
  kSpanFunction,    // span -> span
  kNumberFunction,  // span -> number
  kAggregate,       // group -> number, HAVING only
};

enum class Builtin {
  kAllSpans,               // R(D)
  kRegex,                  // RegEx('pattern', D)
  kDict,                   // Dict('name', D)
  kVirtual,                // A(xl, yl, xh, yh)
  kConsolidateContained,   // ConsolidateContained(source)
  kConsolidateOverlap,     // ConsolidateOverlap(source)
  kBlockText,              // BlockText(source, max_gap, min_count)
  kBlockRegion,            // BlockRegion(source, x_dist, y_dist, min_count)
  kNorthOf,
  kSouthOf,
  kEastOf,
  kWestOf,
  kStrictNorthOf,
  kStrictSouthOf,
  kStrictEastOf,
  kStrictWestOf,
  kContains,               // Contains(a, b): a lies inside b
  kTouches,
  kIntersects,
  kPrecedes,               // Precedes(a, b, max_chars)
  kSpanOverlaps,
  kSpanWithin,
  kSpanEquals,
  kContainsPhrase,         // ContainsPhrase(a, 'phrase') over stored text
  kMatchesRegex,           // MatchesRegex(a, 'pattern') over stored text
  kAncestorOf,             // AncestorOf(a, b): a is a proper ancestor of b
  kDescendantOf,
  kCentroid,
  kMinimalRegion,
  kMaximalRegion,
  kArea,
  kCount,                  // count(G)
};

struct BuiltinInfo {
  Builtin id;
  std::string_view name;
  BuiltinRole role;
  int arity;
};

// Case-insensitive; nullptr when unknown.
const BuiltinInfo *LookupBuiltin(std::string_view name);
const BuiltinInfo &InfoOf(Builtin id);

// Column attributes in the select list.
enum class Attr { kVisualSpan, kSpan, kRegion, kText };
std::optional<Attr> ParseAttr(std::string_view name);
std::string_view AttrName(Attr attr);

// Numeric fields of a span: .xl .yl .xh .yh .begin .end
enum class Field { kXl, kYl, kXh, kYh, kBegin, kEnd };
std::optional<Field> ParseField(std::string_view name);
std::string_view FieldName(Field field);

// The document variable every extraction source is applied to.
inline constexpr std::string_view kDocumentVariable = "D";

// Group option names.
inline constexpr std::string_view kOptConsecutive = "consecutive";
inline constexpr std::string_view kOptMaxdist = "maxdist";
inline constexpr std::string_view kOptTolerance = "tolerance";
inline constexpr std::string_view kOptMode = "mode";
inline constexpr std::string_view kOptScope = "scope";
inline constexpr std::string_view kOptMin = "min";

inline constexpr std::string_view kAggMinimalBoundingRegion = "MinimalBoundingRegion";
inline constexpr std::string_view kAggMinimalSuperRegion = "MinimalSuperRegion";

// ---------------------------------------------------------------------------
// Validation

struct Catalog {
  std::set<std::string> dictionaries;
};

struct TypedQuery {
  Query query;
};

struct ValidationResult {
  std::optional<TypedQuery> typed;
  std::vector<Diagnostic> diagnostics;
};

ValidationResult Validate(const Query &query, const Catalog &catalog);

// Case-insensitive keyword/function-name comparison.
bool NameIs(std::string_view name, std::string_view expected);

// Reserved words cannot be aliases.
bool IsReserved(std::string_view word);

}  // namespace vqe::vql

#endif  // VQE_VQL_H_
