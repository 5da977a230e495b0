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

#include "vqe/sql_emitter.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include "engine_internal.h"

namespace vqe::sql {

namespace {

using engine::AggregateKind;
using engine::NodeKind;
using engine::PlanNode;
using engine::ScanSource;
using vql::Builtin;
using vql::CmpOp;
using vql::ExprKind;

// Placeholder literals are marked while pieces are assembled out of order
// and numbered once the statement is complete.
constexpr char kMarkOpen = '\x01';
constexpr char kMarkClose = '\x02';

constexpr std::array<const char *, 4> kCoordColumns = {"x_l", "y_l", "x_h", "y_h"};
enum { kXl, kYl, kXh, kYh };

// A numeric SQL value. Constants fold so that comparisons against the
// infinite edges of virtual regions disappear.
struct Val {
  std::optional<double> constant;
  std::string sql;
};

Val Const(double v) { return {v, {}}; }
Val Col(std::string sql) { return {std::nullopt, std::move(sql)}; }

// A constant, or a conjunction of SQL terms.
struct Cond {
  std::optional<bool> constant;
  std::vector<std::string> terms;
};

Cond Truth(bool v) { return {v, {}}; }
Cond Term(std::string sql) { return {std::nullopt, {std::move(sql)}}; }

std::string Joined(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

Cond And(const std::vector<Cond> &cs) {
  Cond out = Truth(true);
  for (const auto &c : cs) {
    if (c.constant) {
      if (!*c.constant) return Truth(false);
      continue;
    }
    out.constant.reset();
    out.terms.insert(out.terms.end(), c.terms.begin(), c.terms.end());
  }
  return out;
}

std::string Grouped(const Cond &c) {
  return c.terms.size() == 1 ? c.terms[0] : "(" + Joined(c.terms, " AND ") + ")";
}

Cond Or(const std::vector<Cond> &cs) {
  std::vector<std::string> parts;
  for (const auto &c : cs) {
    if (c.constant) {
      if (*c.constant) return Truth(true);
      continue;
    }
    parts.push_back(Grouped(c));
  }
  if (parts.empty()) return Truth(false);
  if (parts.size() == 1) return Term(parts[0]);
  return Term("(" + Joined(parts, " OR ") + ")");
}

Cond Not(const Cond &c) {
  if (c.constant) return Truth(!*c.constant);
  return Term("NOT (" + Joined(c.terms, " AND ") + ")");
}

bool Holds(CmpOp op, double a, double b) {
  switch (op) {
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
  }
  return false;
}

const char *OpSql(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "<>";
  }
  return "=";
}

std::string Quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

// Where a span's columns come from.
struct Binding {
  enum class Kind {
    kTable,    // a regions or native table alias
    kLazy,     // the region named by alias.column, joined on first use
    kExprs,    // computed columns (aggregates, centroids)
    kVirtual,  // a constant rectangle on every page
  };
  Kind kind = Kind::kTable;
  std::string alias;
  std::string column;
  bool sourced = true;
  std::optional<std::string> count;
  // kExprs and kVirtual.
  std::string page;
  std::array<Val, 4> rect;
  Val begin = Const(0), end = Const(0);
};

using Names = std::map<std::string, Binding>;

struct SelectItem {
  Binding binding;
  vql::Attr attr;
};

// One SELECT block.
struct Block {
  std::vector<std::string> from;
  std::vector<std::string> aliases;  // every FROM alias; all carry pageid
  std::vector<std::string> scan_conds, join_conds, where;
  std::vector<std::string> group_by;
  std::string group_comment;
  std::vector<std::string> having;
  std::map<std::pair<std::string, std::string>, std::string> lazy_joins;
  std::vector<SelectItem> select;
  std::string op;  // set operator joining this block to the previous one
};

void Append(std::vector<std::string> &list, const Cond &c) {
  if (c.constant) {
    if (!*c.constant) list.push_back("1 = 0");
    return;
  }
  list.insert(list.end(), c.terms.begin(), c.terms.end());
}

std::string Sanitized(std::string s) {
  for (std::size_t p; (p = s.find("*/")) != std::string::npos;) s.replace(p, 2, "* /");
  return s;
}

std::string Describe(const PlanNode &n) {
  std::string s = engine::internal::NodeLabel(n);
  if (n.inputs.empty()) return s;
  s += " [";
  for (std::size_t i = 0; i < n.inputs.size(); ++i) s += (i ? "; " : "") + Describe(n.inputs[i]);
  return s + "]";
}

const PlanNode *FindVirtual(const PlanNode &n, const std::string &alias) {
  if (n.kind == NodeKind::kScan && n.source == ScanSource::kVirtual && n.columns.at(0) == alias) {
    return &n;
  }
  // Subqueries and aggregations hide their own aliases.
  if (n.kind != NodeKind::kSelect && n.kind != NodeKind::kProduct && n.kind != NodeKind::kGroup &&
      n.kind != NodeKind::kAggregate) {
    return nullptr;
  }
  for (const auto &in : n.inputs) {
    if (const PlanNode *v = FindVirtual(in, alias)) return v;
  }
  return nullptr;
}

const PlanNode &PeelSelects(const PlanNode &n, std::vector<const PlanNode *> *selects = nullptr) {
  const PlanNode *p = &n;
  while (p->kind == NodeKind::kSelect) {
    if (selects) selects->push_back(p);
    p = &p->inputs.at(0);
  }
  if (selects) std::reverse(selects->begin(), selects->end());  // innermost first
  return *p;
}

bool Sourced(const PlanNode &n);

// Whether `e`, evaluated over the rows of `body`, carries a store region.
bool ExprSourced(const vql::Expr &e, const PlanNode &body) {
  if (e.kind == ExprKind::kCall) {
    const vql::BuiltinInfo *info = vql::LookupBuiltin(e.text);
    return info && (info->id == Builtin::kMinimalRegion || info->id == Builtin::kMaximalRegion);
  }
  if (e.kind != ExprKind::kName) return false;
  const PlanNode &base = PeelSelects(body);
  if (base.kind == NodeKind::kAggregate) return base.columns.at(0) == e.text && Sourced(base);
  if (base.kind != NodeKind::kProduct) return base.columns.at(0) == e.text && Sourced(base);
  for (const auto &in : base.inputs) {
    if (in.columns.at(0) == e.text) return Sourced(in);
  }
  return false;
}

// Whether the single-column output of a FROM item carries store regions.
bool Sourced(const PlanNode &n) {
  switch (n.kind) {
    case NodeKind::kScan: return n.source != ScanSource::kVirtual;
    case NodeKind::kBlock: return true;
    case NodeKind::kConsolidate: return Sourced(n.inputs.at(0));
    case NodeKind::kAggregate: return n.aggregate == AggregateKind::kMinimalSuperRegion;
    case NodeKind::kProject: return ExprSourced(n.exprs.at(0), n.inputs.at(0));
    case NodeKind::kUnion:
    case NodeKind::kIntersect:
      return std::all_of(n.inputs.begin(), n.inputs.end(), [](const PlanNode &in) {
        return Sourced(in);
      });
    default: return false;
  }
}

bool IsGrouped(const PlanNode &project) {
  return PeelSelects(project.inputs.at(0)).kind == NodeKind::kAggregate;
}

// Equal-key alignment is all GROUP BY can say.
bool GroupExpressible(const PlanNode &aggregate) {
  const AlignmentSpec &s = aggregate.inputs.at(0).alignment;
  return aggregate.aggregate == AggregateKind::kMinimalBoundingRegion && !s.consecutive &&
         s.tolerance == 0 && std::isinf(s.maxdist);
}

class Emitter {
 public:
  explicit Emitter(const EmitOptions &options) : options_(options) {}

  SqlText Run(const PlanNode &root) {
    std::vector<Block> blocks;
    EmitSetTree(root, "", blocks);
    if (options_.strict && !unsupported_.empty()) {
      throw Error(ErrorCode::kUnsupportedNode,
                  "operators without an SQL mapping: " + Joined(unsupported_, ", "));
    }
    // Union members must agree on width; fall back to the wide layout.
    bool wide = false;
    for (const auto &b : blocks) {
      if (Width(b, false) != Width(blocks[0], false)) wide = true;
    }
    std::string statement;
    for (const auto &n : natives_) statement += "/* " + Sanitized(n) + " */\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (i) statement += "\n" + blocks[i].op + "\n";
      statement += Render(blocks[i], wide);
    }
    SqlText out;
    for (std::size_t i = 0; i < statement.size(); ++i) {
      if (statement[i] != kMarkOpen) {
        out.statement += statement[i];
        continue;
      }
      std::size_t close = statement.find(kMarkClose, i);
      out.parameters.push_back(literals_.at(std::stoul(statement.substr(i + 1, close - i - 1))));
      out.statement += '?';
      i = close;
    }
    out.warnings = warnings_;
    out.hybrid = !natives_.empty();
    return out;
  }

 private:
  std::string Lit(std::string literal) {
    if (!options_.placeholders) return literal;
    literals_.push_back(std::move(literal));
    return kMarkOpen + std::to_string(literals_.size() - 1) + kMarkClose;
  }

  std::string Number(double v) {
    if (std::isinf(v)) return Lit(v > 0 ? "CAST('Infinity' AS DOUBLE PRECISION)"
                                        : "CAST('-Infinity' AS DOUBLE PRECISION)");
    return Lit(engine::internal::FormatNumber(v));
  }

  std::string Sql(const Val &v) { return v.constant ? Number(*v.constant) : v.sql; }

  void Warn(const std::string &w) {
    if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(w);
  }

  std::string NextAlias() { return "R" + std::to_string(++alias_count_); }

  // -------------------------------------------------------------------------
  // Plan traversal

  void EmitSetTree(const PlanNode &n, const std::string &op, std::vector<Block> &blocks) {
    if (n.kind == NodeKind::kUnion || n.kind == NodeKind::kIntersect) {
      const char *own = n.kind == NodeKind::kUnion ? "UNION ALL" : "INTERSECT ALL";
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        EmitSetTree(n.inputs[i], i == 0 ? op : own, blocks);
      }
      return;
    }
    if (n.kind != NodeKind::kProject) {
      throw Error(ErrorCode::kUnsupportedNode, "unexpected plan root " +
                                                   engine::internal::NodeLabel(n));
    }
    Block block;
    block.op = op;
    EmitCore(n, block);
    blocks.push_back(std::move(block));
  }

  void EmitCore(const PlanNode &project, Block &block) {
    Names names;
    std::vector<const PlanNode *> having;
    const PlanNode &body = PeelSelects(project.inputs.at(0), &having);
    if (body.kind == NodeKind::kAggregate) {
      const PlanNode &group = body.inputs.at(0);
      const std::string &g = group.columns.at(0);
      if (GroupExpressible(body)) {
        Names inner;
        EmitFromWhere(group.inputs.at(0), block, inner);
        for (std::size_t i = 1; i < group.columns.size(); ++i) {
          names[group.columns[i]] = inner.at(group.columns[i]);
        }
        names[g] = GroupBy(group, inner.at(group.group_input), block);
        for (const auto *s : having) Append(block.having, Render(*s->predicate, names, block));
      } else {
        Warn("hybrid: alignment grouping executes natively");
        names[g] = Native(body, block);
        for (std::size_t i = 1; i < group.columns.size(); ++i) {
          const PlanNode *v = FindVirtual(group.inputs.at(0), group.columns[i]);
          if (!v) throw Error(ErrorCode::kRuntime, "no virtual region " + group.columns[i]);
          names[group.columns[i]] = Virtual(v->rect);
        }
        for (const auto *s : having) Append(block.where, Render(*s->predicate, names, block));
      }
    } else {
      EmitFromWhere(project.inputs.at(0), block, names);
    }
    for (std::size_t i = 0; i < project.exprs.size(); ++i) {
      block.select.push_back({SpanOf(project.exprs[i], names, block), project.attrs.at(i)});
    }
  }

  void EmitFromWhere(const PlanNode &n, Block &block, Names &names) {
    std::vector<const PlanNode *> selects;
    const PlanNode &base = PeelSelects(n, &selects);
    if (base.kind == NodeKind::kProduct) {
      for (const auto &in : base.inputs) EmitItem(in, block, names);
    } else {
      EmitItem(base, block, names);
    }
    for (const auto *s : selects) Append(block.where, Render(*s->predicate, names, block));
  }

  void EmitItem(const PlanNode &n, Block &block, Names &names) {
    const std::string &name = n.columns.at(0);
    switch (n.kind) {
      case NodeKind::kScan: {
        if (n.source == ScanSource::kVirtual) {
          names[name] = Virtual(n.rect);
          return;
        }
        std::string alias = NextAlias();
        block.from.push_back("regions " + alias);
        block.aliases.push_back(alias);
        if (n.source == ScanSource::kRegex) {
          block.scan_conds.push_back("MatchesRegex(" + alias + ".text, " + Lit(Quote(n.argument)) + ")");
        } else if (n.source == ScanSource::kDict) {
          block.scan_conds.push_back("MatchesDict(" + alias + ".text, " + Lit(Quote(n.argument)) + ")");
        }
        names[name] = Table(alias, true);
        return;
      }
      case NodeKind::kProject:
        if (!IsGrouped(n)) {
          // Flatten: the subquery's FROM and WHERE merge into this block.
          Names inner;
          EmitFromWhere(n.inputs.at(0), block, inner);
          names[name] = SpanOf(n.exprs.at(0), inner, block);
          return;
        }
        Warn("hybrid: subquery executes natively");
        names[name] = Native(n, block);
        return;
      case NodeKind::kUnion:
      case NodeKind::kIntersect:
        Warn("hybrid: subquery executes natively");
        names[name] = Native(n, block);
        return;
      case NodeKind::kConsolidate:
        Warn("hybrid: consolidation executes natively");
        names[name] = Native(n, block);
        return;
      case NodeKind::kBlock:
        Warn("hybrid: block aggregation executes natively");
        names[name] = Native(n, block);
        return;
      default:
        throw Error(ErrorCode::kUnsupportedNode,
                    "unexpected source " + engine::internal::NodeLabel(n));
    }
  }

  Binding Native(const PlanNode &n, Block &block) {
    unsupported_.push_back(engine::internal::NodeLabel(n));
    std::string table = "native_" + std::to_string(natives_.size() + 1);
    natives_.push_back(table + " = " + Describe(n));
    std::string alias = NextAlias();
    block.from.push_back(table + " " + alias);
    block.aliases.push_back(alias);
    Binding b = Table(alias, Sourced(n));
    b.count = alias + ".members";
    return b;
  }

  Binding GroupBy(const PlanNode &group, Binding input, Block &block) {
    const AlignmentSpec &s = group.alignment;
    bool vertical = s.axis == Axis::kVertical;
    Val lo = CoordOf(input, vertical ? kXl : kYl, block);
    Val hi = CoordOf(input, vertical ? kXh : kYh, block);
    Val key = s.mode == AlignMode::kLeadingEdge    ? lo
              : s.mode == AlignMode::kTrailingEdge ? hi
                                                   : Half(Add(lo, hi));
    const char *axis = vertical ? "x" : "y";
    std::string what = s.mode == AlignMode::kLeadingEdge    ? std::string(axis) + "_l"
                       : s.mode == AlignMode::kTrailingEdge ? std::string(axis) + "_h"
                                                            : std::string(axis) + " center";
    // A constant key would read as a column position; it groups nothing anyway.
    block.group_by = {PageOf(input, block)};
    if (!key.constant) block.group_by.push_back(Sql(key));
    block.group_comment =
        std::string(vertical ? "vertically" : "horizontally") + " aligned: equal " + what;
    block.having.push_back("count(*) >= " + Number(static_cast<double>(s.min_group_size)));

    Binding g;
    g.kind = Binding::Kind::kExprs;
    g.sourced = false;
    g.page = PageOf(input, block);
    for (int i = 0; i < 4; ++i) g.rect[i] = Aggregate(i < 2 ? "min" : "max", CoordOf(input, i, block));
    g.begin = Aggregate("min", BeginOf(input, block));
    g.end = Aggregate("max", EndOf(input, block));
    g.count = "count(*)";
    return g;
  }

  // -------------------------------------------------------------------------
  // Bindings

  static Binding Table(const std::string &alias, bool sourced) {
    Binding b;
    b.kind = Binding::Kind::kTable;
    b.alias = alias;
    b.sourced = sourced;
    return b;
  }

  static Binding Virtual(const Region &r) {
    Binding b;
    b.kind = Binding::Kind::kVirtual;
    b.sourced = false;
    b.rect = {Const(r.xl), Const(r.yl), Const(r.xh), Const(r.yh)};
    return b;
  }

  Binding Materialize(const Binding &b, Block &block) {
    if (b.kind != Binding::Kind::kLazy) return b;
    auto key = std::make_pair(b.alias, b.column);
    auto it = block.lazy_joins.find(key);
    if (it == block.lazy_joins.end()) {
      std::string alias = NextAlias();
      block.from.push_back("regions " + alias);
      block.aliases.push_back(alias);
      block.join_conds.push_back(alias + ".regionid = " + b.alias + "." + b.column);
      it = block.lazy_joins.emplace(key, alias).first;
    }
    return Table(it->second, true);
  }

  std::string PageOf(const Binding &b, Block &block) {
    switch (b.kind) {
      case Binding::Kind::kTable:
      case Binding::Kind::kLazy: return b.alias + ".pageid";
      case Binding::Kind::kExprs: return b.page;
      case Binding::Kind::kVirtual: break;
    }
    if (block.aliases.empty()) {
      // Only virtual regions: one row per page.
      block.from.push_back("(SELECT DISTINCT pageid FROM regions) P");
      block.aliases.push_back("P");
    }
    return block.aliases[0] + ".pageid";
  }

  std::optional<std::string> RegionIdOf(const Binding &b) {
    if (b.kind == Binding::Kind::kLazy) return b.alias + "." + b.column;
    if (b.kind == Binding::Kind::kTable && b.sourced) return b.alias + ".regionid";
    return std::nullopt;
  }

  std::optional<std::string> TextOf(const Binding &in, Block &block) {
    Binding b = Materialize(in, block);
    if (b.kind == Binding::Kind::kTable) return b.alias + ".text";
    return std::nullopt;
  }

  Val CoordOf(const Binding &in, int i, Block &block) {
    Binding b = Materialize(in, block);
    if (b.kind == Binding::Kind::kTable) return Col(b.alias + "." + kCoordColumns[i]);
    return b.rect[i];
  }

  Val BeginOf(const Binding &in, Block &block) {
    Binding b = Materialize(in, block);
    return b.kind == Binding::Kind::kTable ? Col(b.alias + ".text_start") : b.begin;
  }

  Val EndOf(const Binding &in, Block &block) {
    Binding b = Materialize(in, block);
    return b.kind == Binding::Kind::kTable ? Col(b.alias + ".text_end") : b.end;
  }

  Binding SpanOf(const vql::Expr &e, Names &names, Block &block) {
    if (e.kind == ExprKind::kName) {
      auto it = names.find(e.text);
      if (it == names.end()) throw Error(ErrorCode::kRuntime, "unbound alias '" + e.text + "'");
      return it->second;
    }
    const vql::BuiltinInfo *info =
        e.kind == ExprKind::kCall ? vql::LookupBuiltin(e.text) : nullptr;
    if (!info) throw Error(ErrorCode::kRuntime, "'" + vql::Print(e) + "' is not a span");
    Binding inner = SpanOf(e.args.at(0), names, block);
    switch (info->id) {
      case Builtin::kCentroid: {
        Binding c;
        c.kind = Binding::Kind::kExprs;
        c.sourced = false;
        c.page = PageOf(inner, block);
        Val cx = Half(Add(CoordOf(inner, kXl, block), CoordOf(inner, kXh, block)));
        Val cy = Half(Add(CoordOf(inner, kYl, block), CoordOf(inner, kYh, block)));
        c.rect = {cx, cy, cx, cy};
        c.begin = BeginOf(inner, block);
        c.end = EndOf(inner, block);
        return c;
      }
      case Builtin::kMinimalRegion:
      case Builtin::kMaximalRegion: {
        Binding base = Materialize(inner, block);
        if (base.kind != Binding::Kind::kTable || !base.sourced) {
          throw Error(ErrorCode::kSynthesizedRegion,
                      vql::Print(e) + " needs a region from the store");
        }
        Binding m;
        m.kind = Binding::Kind::kLazy;
        m.alias = base.alias;
        m.column = info->id == Builtin::kMinimalRegion ? "minimalregion" : "maximalregion";
        return m;
      }
      default:
        throw Error(ErrorCode::kRuntime, "'" + vql::Print(e) + "' is not a span");
    }
  }

  // -------------------------------------------------------------------------
  // Numbers and conditions

  static Val Arith(const Val &a, char op, const Val &b) {
    if (a.constant && b.constant) {
      switch (op) {
        case '+': return Const(*a.constant + *b.constant);
        case '-': return Const(*a.constant - *b.constant);
        default: return Const(*a.constant * *b.constant);
      }
    }
    return Col("");  // filled by the caller, which knows how to render
  }

  Val Add(const Val &a, const Val &b) {
    Val v = Arith(a, '+', b);
    if (!v.constant) v.sql = "(" + Sql(a) + " + " + Sql(b) + ")";
    return v;
  }

  Val Sub(const Val &a, const Val &b) {
    Val v = Arith(a, '-', b);
    if (!v.constant) v.sql = "(" + Sql(a) + " - " + Sql(b) + ")";
    return v;
  }

  Val Mul(const Val &a, const Val &b) {
    Val v = Arith(a, '*', b);
    if (!v.constant) v.sql = Sql(a) + " * " + Sql(b);
    return v;
  }

  Val Half(const Val &a) {
    if (a.constant) return Const(*a.constant / 2);
    return Col(a.sql + " / 2.0");
  }

  Val Aggregate(const char *fn, const Val &v) {
    if (v.constant) return v;
    return Col(std::string(fn) + "(" + v.sql + ")");
  }

  Cond Compare(const Val &a, CmpOp op, const Val &b) {
    if (a.constant && b.constant) return Truth(Holds(op, *a.constant, *b.constant));
    // Column values are finite, so an infinite constant decides the result.
    if (a.constant && std::isinf(*a.constant)) return Truth(Holds(op, *a.constant, 0));
    if (b.constant && std::isinf(*b.constant)) return Truth(Holds(op, 0, *b.constant));
    return Term(Sql(a) + " " + OpSql(op) + " " + Sql(b));
  }

  Val NumberOf(const vql::Expr &e, Names &names, Block &block) {
    switch (e.kind) {
      case ExprKind::kNumber: return Const(e.number);
      case ExprKind::kField: {
        Binding b = SpanOf(e.args.at(0), names, block);
        switch (vql::ParseField(e.text).value_or(vql::Field::kXl)) {
          case vql::Field::kXl: return CoordOf(b, kXl, block);
          case vql::Field::kYl: return CoordOf(b, kYl, block);
          case vql::Field::kXh: return CoordOf(b, kXh, block);
          case vql::Field::kYh: return CoordOf(b, kYh, block);
          case vql::Field::kBegin: return BeginOf(b, block);
          case vql::Field::kEnd: return EndOf(b, block);
        }
        break;
      }
      case ExprKind::kCall: {
        const vql::BuiltinInfo *info = vql::LookupBuiltin(e.text);
        if (!info) break;
        Binding b = SpanOf(e.args.at(0), names, block);
        if (info->id == Builtin::kCount) {
          if (!b.count) throw Error(ErrorCode::kRuntime, vql::Print(e) + " outside a group");
          return Col(*b.count);
        }
        if (info->id == Builtin::kArea) {
          Val w = Sub(CoordOf(b, kXh, block), CoordOf(b, kXl, block));
          Val h = Sub(CoordOf(b, kYh, block), CoordOf(b, kYl, block));
          return Mul(w, h);
        }
        break;
      }
      default: break;
    }
    throw Error(ErrorCode::kRuntime, "'" + vql::Print(e) + "' is not a number");
  }

  Cond Render(const vql::Expr &e, Names &names, Block &block) {
    auto all = [&](auto combine) {
      std::vector<Cond> cs;
      for (const auto &a : e.args) cs.push_back(Render(a, names, block));
      return combine(cs);
    };
    switch (e.kind) {
      case ExprKind::kAnd: return all(And);
      case ExprKind::kOr: return all(Or);
      case ExprKind::kNot: return Not(Render(e.args.at(0), names, block));
      case ExprKind::kBool: return Truth(e.flag);
      case ExprKind::kCompare:
        return Compare(NumberOf(e.args.at(0), names, block), e.op,
                       NumberOf(e.args.at(1), names, block));
      case ExprKind::kCall: break;
      default: throw Error(ErrorCode::kRuntime, "'" + vql::Print(e) + "' is not a condition");
    }
    const vql::BuiltinInfo *info = vql::LookupBuiltin(e.text);
    if (!info || info->role != vql::BuiltinRole::kPredicate) {
      throw Error(ErrorCode::kRuntime, "'" + vql::Print(e) + "' is not a condition");
    }
    Binding a = SpanOf(e.args.at(0), names, block);
    auto text = [&](const Binding &b) {
      auto t = TextOf(b, block);
      if (!t) throw Error(ErrorCode::kSynthesizedRegion, vql::Print(e) + " needs stored text");
      return *t;
    };
    if (info->id == Builtin::kContainsPhrase) {
      std::string phrase;
      for (char c : e.args.at(1).text) phrase += c == '"' ? std::string("\"\"") : std::string(1, c);
      return Term("contains(" + text(a) + ", " + Lit(Quote("\"" + phrase + "\"")) + ") = 1");
    }
    if (info->id == Builtin::kMatchesRegex) {
      return Term("MatchesRegex(" + text(a) + ", " + Lit(Quote(e.args.at(1).text)) + ")");
    }
    Binding b = SpanOf(e.args.at(1), names, block);
    auto c = [&](const Binding &x, int i) { return CoordOf(x, i, block); };
    auto cmp = [&](const Binding &x, int i, CmpOp op, const Binding &y, int j) {
      return Compare(c(x, i), op, c(y, j));
    };
    const CmpOp le = CmpOp::kLe, ge = CmpOp::kGe, lt = CmpOp::kLt, gt = CmpOp::kGt;
    switch (info->id) {
      case Builtin::kNorthOf: return cmp(a, kYh, le, b, kYl);
      case Builtin::kSouthOf: return cmp(a, kYl, ge, b, kYh);
      case Builtin::kEastOf: return cmp(a, kXl, ge, b, kXh);
      case Builtin::kWestOf: return cmp(a, kXh, le, b, kXl);
      case Builtin::kStrictNorthOf:
        return And({cmp(a, kYh, le, b, kYl), cmp(a, kXl, ge, b, kXl), cmp(a, kXh, le, b, kXh)});
      case Builtin::kStrictSouthOf:
        return And({cmp(a, kYl, ge, b, kYh), cmp(a, kXl, ge, b, kXl), cmp(a, kXh, le, b, kXh)});
      case Builtin::kStrictEastOf:
        return And({cmp(a, kXl, ge, b, kXh), cmp(a, kYl, ge, b, kYl), cmp(a, kYh, le, b, kYh)});
      case Builtin::kStrictWestOf:
        return And({cmp(a, kXh, le, b, kXl), cmp(a, kYl, ge, b, kYl), cmp(a, kYh, le, b, kYh)});
      case Builtin::kContains:
        return And({cmp(a, kXl, ge, b, kXl), cmp(a, kYl, ge, b, kYl), cmp(a, kXh, le, b, kXh),
                    cmp(a, kYh, le, b, kYh)});
      case Builtin::kIntersects:
      case Builtin::kTouches: {
        Cond meet = And({cmp(a, kXl, le, b, kXh), cmp(a, kXh, ge, b, kXl), cmp(a, kYl, le, b, kYh),
                         cmp(a, kYh, ge, b, kYl)});
        if (info->id == Builtin::kIntersects) return meet;
        Cond overlap = And({cmp(a, kXl, lt, b, kXh), cmp(a, kXh, gt, b, kXl),
                            cmp(a, kYl, lt, b, kYh), cmp(a, kYh, gt, b, kYl)});
        return And({meet, Not(overlap)});
      }
      case Builtin::kPrecedes: {
        Val gap = Sub(BeginOf(b, block), EndOf(a, block));
        return And({Compare(EndOf(a, block), le, BeginOf(b, block)),
                    Compare(gap, le, Const(e.args.at(2).number))});
      }
      case Builtin::kSpanOverlaps:
        return And({Compare(BeginOf(a, block), lt, EndOf(b, block)),
                    Compare(BeginOf(b, block), lt, EndOf(a, block))});
      case Builtin::kSpanWithin: {
        Cond same = And({Compare(BeginOf(a, block), CmpOp::kEq, BeginOf(b, block)),
                         Compare(EndOf(a, block), CmpOp::kEq, EndOf(b, block))});
        return And({Compare(BeginOf(b, block), le, BeginOf(a, block)),
                    Compare(EndOf(a, block), le, EndOf(b, block)), Not(same)});
      }
      case Builtin::kSpanEquals:
        return And({Compare(BeginOf(a, block), CmpOp::kEq, BeginOf(b, block)),
                    Compare(EndOf(a, block), CmpOp::kEq, EndOf(b, block))});
      case Builtin::kAncestorOf:
      case Builtin::kDescendantOf: {
        auto ia = RegionIdOf(a), ib = RegionIdOf(b);
        if (!ia || !ib) {
          throw Error(ErrorCode::kSynthesizedRegion, vql::Print(e) + " needs stored regions");
        }
        if (info->id == Builtin::kDescendantOf) std::swap(ia, ib);
        return Term("IsPrefix(" + *ia + ", " + *ib + ")");
      }
      default: break;
    }
    throw Error(ErrorCode::kRuntime, "'" + vql::Print(e) + "' has no SQL mapping");
  }

  // -------------------------------------------------------------------------
  // Assembly

  static std::size_t ItemWidth(const SelectItem &item, bool wide) {
    if (wide) return 8;
    switch (item.attr) {
      case vql::Attr::kVisualSpan:
      case vql::Attr::kRegion:
        return item.binding.sourced ? 2 : 5;
      case vql::Attr::kSpan: return 3;
      case vql::Attr::kText: return 2;
    }
    return 0;
  }

  static std::size_t Width(const Block &b, bool wide) {
    std::size_t w = 0;
    for (const auto &item : b.select) w += ItemWidth(item, wide);
    return w;
  }

  std::vector<std::string> Columns(const SelectItem &item, bool wide, Block &block) {
    const Binding &b = item.binding;
    std::vector<std::string> out = {PageOf(b, block)};
    if (wide) {
      // Whole spans, so that members of a set operation line up.
      auto id = b.sourced ? RegionIdOf(b) : std::nullopt;
      out.push_back(id.value_or("NULL"));
      for (int i = 0; i < 4; ++i) out.push_back(Sql(CoordOf(b, i, block)));
      out.push_back(Sql(BeginOf(b, block)));
      out.push_back(Sql(EndOf(b, block)));
      return out;
    }
    switch (item.attr) {
      case vql::Attr::kVisualSpan:
      case vql::Attr::kRegion: {
        auto id = b.sourced ? RegionIdOf(b) : std::nullopt;
        if (id) {
          out.push_back(*id);
          break;
        }
        for (int i = 0; i < 4; ++i) out.push_back(Sql(CoordOf(b, i, block)));
        break;
      }
      case vql::Attr::kSpan:
        out.push_back(Sql(BeginOf(b, block)));
        out.push_back(Sql(EndOf(b, block)));
        break;
      case vql::Attr::kText: {
        auto t = TextOf(b, block);
        if (!t) Warn("text of a synthesized span is not stored; selected as NULL");
        out.push_back(t.value_or("NULL"));
        break;
      }
    }
    return out;
  }

  std::string Render(Block &block, bool wide) {
    std::vector<std::string> cols;
    for (const auto &item : block.select) {
      auto c = Columns(item, wide, block);
      cols.insert(cols.end(), c.begin(), c.end());
    }
    std::vector<std::string> where;
    for (std::size_t i = 1; i < block.aliases.size(); ++i) {
      where.push_back(block.aliases[i - 1] + ".pageid = " + block.aliases[i] + ".pageid");
    }
    for (const auto *part : {&block.scan_conds, &block.join_conds, &block.where}) {
      where.insert(where.end(), part->begin(), part->end());
    }
    std::string s = "SELECT " + Joined(cols, ", ") + "\nFROM " + Joined(block.from, ", ");
    if (!where.empty()) s += "\nWHERE " + Joined(where, "\n  AND ");
    if (!block.group_by.empty()) {
      s += "\nGROUP BY " + Joined(block.group_by, ", ") + " /* " + block.group_comment + " */";
    }
    if (!block.having.empty()) s += "\nHAVING " + Joined(block.having, "\n  AND ");
    return s;
  }

  const EmitOptions &options_;
  int alias_count_ = 0;
  std::vector<std::string> natives_;
  std::vector<std::string> unsupported_;
  std::vector<std::string> warnings_;
  std::vector<std::string> literals_;
};

}  // namespace

SqlText Emit(const engine::LogicalPlan &plan, const EmitOptions &options) {
  return Emitter(options).Run(plan.root);
}

std::string NormalizeWhitespace(std::string_view sql) {
  std::string out;
  bool space = false;
  for (char c : sql) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace vqe::sql
