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
#include <numeric>

#include "engine_internal.h"

namespace vqe::engine::internal {

namespace {

using vql::Builtin;
using vql::ExprKind;

const std::string &StoredText(const Env &env, const VisualSpan &v) {
  if (!v.source) {
    throw Error(ErrorCode::kSynthesizedRegion, "stored text of a synthesized region");
  }
  auto ref = env.store->Find(env.page, *v.source);
  if (!ref) {
    throw Error(ErrorCode::kNotFound, "region " + v.source->ToString() + " is not in the store");
  }
  return env.store->region(*ref).text;
}

const RegionId &SourceOf(const VisualSpan &v) {
  if (!v.source) {
    throw Error(ErrorCode::kSynthesizedRegion, "tree navigation over a synthesized region");
  }
  return *v.source;
}

bool Compare(vql::CmpOp op, double a, double b) {
  switch (op) {
    case vql::CmpOp::kLt: return a < b;
    case vql::CmpOp::kLe: return a <= b;
    case vql::CmpOp::kGt: return a > b;
    case vql::CmpOp::kGe: return a >= b;
    case vql::CmpOp::kEq: return a == b;
    case vql::CmpOp::kNe: return a != b;
  }
  return false;
}

double FieldOf(const VisualSpan &v, vql::Field f) {
  switch (f) {
    case vql::Field::kXl: return v.region.xl;
    case vql::Field::kYl: return v.region.yl;
    case vql::Field::kXh: return v.region.xh;
    case vql::Field::kYh: return v.region.yh;
    case vql::Field::kBegin: return static_cast<double>(v.span.begin);
    case vql::Field::kEnd: return static_cast<double>(v.span.end);
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expressions

CompiledExpr CompiledExpr::Compile(const vql::Expr &e,
                                   const std::vector<std::string> &columns) {
  CompiledExpr c;
  auto compile_args = [&] {
    for (const auto &a : e.args) c.args_.push_back(Compile(a, columns));
  };
  switch (e.kind) {
    case ExprKind::kAnd: c.op_ = Op::kAnd; compile_args(); break;
    case ExprKind::kOr: c.op_ = Op::kOr; compile_args(); break;
    case ExprKind::kNot: c.op_ = Op::kNot; compile_args(); break;
    case ExprKind::kCompare:
      c.op_ = Op::kCompare;
      c.cmp_ = e.op;
      compile_args();
      break;
    case ExprKind::kBool:
      c.op_ = Op::kBool;
      c.flag_ = e.flag;
      break;
    case ExprKind::kNumber:
      c.op_ = Op::kNumber;
      c.number_ = e.number;
      break;
    case ExprKind::kName: {
      auto it = std::find(columns.begin(), columns.end(), e.text);
      if (it == columns.end()) {
        throw Error(ErrorCode::kRuntime, "unbound alias '" + e.text + "'");
      }
      c.op_ = Op::kSlot;
      c.slot_ = static_cast<std::size_t>(it - columns.begin());
      break;
    }
    case ExprKind::kField: {
      auto f = vql::ParseField(e.text);
      if (!f) throw Error(ErrorCode::kRuntime, "unknown field '" + e.text + "'");
      c.op_ = Op::kField;
      c.field_ = *f;
      compile_args();
      break;
    }
    case ExprKind::kCall: {
      const vql::BuiltinInfo *info = vql::LookupBuiltin(e.text);
      if (!info || info->role == vql::BuiltinRole::kSource) {
        throw Error(ErrorCode::kRuntime, "'" + e.text + "' is not a function");
      }
      c.op_ = Op::kCall;
      c.fn_ = info->id;
      if (info->id == Builtin::kContainsPhrase) {
        c.args_.push_back(Compile(e.args.at(0), columns));
        c.phrase_ = std::make_shared<CompiledPhrase>(e.args.at(1).text);
      } else if (info->id == Builtin::kMatchesRegex) {
        c.args_.push_back(Compile(e.args.at(0), columns));
        c.regex_ = std::make_shared<CompiledRegex>(e.args.at(1).text);
      } else {
        compile_args();
      }
      break;
    }
    case ExprKind::kString:
    case ExprKind::kParam:
    case ExprKind::kSubquery:
      throw Error(ErrorCode::kRuntime, "cannot evaluate '" + vql::Print(e) + "'");
  }
  return c;
}

bool CompiledExpr::Test(const Env &env) const {
  switch (op_) {
    case Op::kAnd:
      for (const auto &a : args_) {
        if (!a.Test(env)) return false;
      }
      return true;
    case Op::kOr:
      for (const auto &a : args_) {
        if (a.Test(env)) return true;
      }
      return false;
    case Op::kNot: return !args_[0].Test(env);
    case Op::kCompare: return Compare(cmp_, args_[0].Number(env), args_[1].Number(env));
    case Op::kBool: return flag_;
    case Op::kCall: break;
    default: throw Error(ErrorCode::kRuntime, "expression is not a condition");
  }
  VisualSpan sa, sb;
  const VisualSpan &a = args_[0].Span(env, sa);
  switch (fn_) {
    case Builtin::kContainsPhrase: return phrase_->Search(StoredText(env, a));
    case Builtin::kMatchesRegex: return regex_->Search(StoredText(env, a));
    default: break;
  }
  const VisualSpan &b = args_[1].Span(env, sb);
  switch (fn_) {
    case Builtin::kNorthOf: return Directional(Direction::kNorth, false, a.region, b.region);
    case Builtin::kSouthOf: return Directional(Direction::kSouth, false, a.region, b.region);
    case Builtin::kEastOf: return Directional(Direction::kEast, false, a.region, b.region);
    case Builtin::kWestOf: return Directional(Direction::kWest, false, a.region, b.region);
    case Builtin::kStrictNorthOf: return Directional(Direction::kNorth, true, a.region, b.region);
    case Builtin::kStrictSouthOf: return Directional(Direction::kSouth, true, a.region, b.region);
    case Builtin::kStrictEastOf: return Directional(Direction::kEast, true, a.region, b.region);
    case Builtin::kStrictWestOf: return Directional(Direction::kWest, true, a.region, b.region);
    case Builtin::kContains: return TopoHolds(Topo::kContains, a.region, b.region);
    case Builtin::kTouches: return TopoHolds(Topo::kTouches, a.region, b.region);
    case Builtin::kIntersects: return TopoHolds(Topo::kIntersects, a.region, b.region);
    case Builtin::kPrecedes:
      return TextSpanHolds(SpanRelation::kPrecedesWithin, a.span, b.span,
                           static_cast<std::int64_t>(args_[2].Number(env)));
    case Builtin::kSpanOverlaps: return TextSpanHolds(SpanRelation::kOverlaps, a.span, b.span);
    case Builtin::kSpanWithin: return TextSpanHolds(SpanRelation::kWithin, a.span, b.span);
    case Builtin::kSpanEquals: return TextSpanHolds(SpanRelation::kEquals, a.span, b.span);
    case Builtin::kAncestorOf: {
      const RegionId &x = SourceOf(a), &y = SourceOf(b);
      return x.depth() < y.depth() && IdIsPrefix(x, y);
    }
    case Builtin::kDescendantOf: {
      const RegionId &x = SourceOf(a), &y = SourceOf(b);
      return y.depth() < x.depth() && IdIsPrefix(y, x);
    }
    default: throw Error(ErrorCode::kRuntime, "function is not a condition");
  }
}

double CompiledExpr::Number(const Env &env) const {
  switch (op_) {
    case Op::kNumber: return number_;
    case Op::kField: {
      VisualSpan s;
      return FieldOf(args_[0].Span(env, s), field_);
    }
    case Op::kCall:
      if (fn_ == Builtin::kCount) return static_cast<double>(env.count);
      if (fn_ == Builtin::kArea) {
        VisualSpan s;
        const VisualSpan &v = args_[0].Span(env, s);
        if (!v.region.IsFinite()) {
          throw Error(ErrorCode::kInfiniteRegion, "area of an unbounded region");
        }
        return Area(v.region);
      }
      break;
    default: break;
  }
  throw Error(ErrorCode::kRuntime, "expression is not a number");
}

const VisualSpan &CompiledExpr::Span(const Env &env, VisualSpan &scratch) const {
  if (op_ == Op::kSlot) return *env.slots[slot_];
  if (op_ == Op::kCall) {
    VisualSpan inner;
    switch (fn_) {
      case Builtin::kCentroid:
        scratch = Centroid(args_[0].Span(env, inner));
        return scratch;
      case Builtin::kMinimalRegion:
        scratch = MinMaxRegion(*env.store, args_[0].Span(env, inner), MinMax::kMinimal);
        return scratch;
      case Builtin::kMaximalRegion:
        scratch = MinMaxRegion(*env.store, args_[0].Span(env, inner), MinMax::kMaximal);
        return scratch;
      default: break;
    }
  }
  throw Error(ErrorCode::kRuntime, "expression is not a span");
}

bool AllHold(const std::vector<CompiledExpr> &preds, const Env &env) {
  for (const auto &p : preds) {
    if (!p.Test(env)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Scans

ScanKernel::ScanKernel(const RegionStore &store, const PlanNode &scan) : source_(scan.source) {
  if (source_ == ScanSource::kRegex) {
    regex_ = std::make_unique<CompiledRegex>(scan.argument);
  } else if (source_ == ScanSource::kDict) {
    const Dictionary *dict = store.FindDictionary(scan.argument);
    if (!dict) {
      throw Error(ErrorCode::kUnknownDictionary, "unknown dictionary \"" + scan.argument + "\"");
    }
    dict_ = std::make_unique<CompiledDictionary>(*dict);
  } else if (source_ == ScanSource::kVirtual) {
    throw Error(ErrorCode::kRuntime, "virtual regions have no extraction kernel");
  }
}

void ScanKernel::Extract(const RegionStore &store, std::span<const RegionRef> refs,
                         std::vector<VisualSpan> &out) const {
  switch (source_) {
    case ScanSource::kAll:
      for (RegionRef ref : refs) out.push_back(store.SpanOf(ref));
      break;
    case ScanSource::kRegex: RegexExtractRefs(store, *regex_, refs, out); break;
    case ScanSource::kDict: DictExtractRefs(store, *dict_, refs, out); break;
    case ScanSource::kVirtual: break;
  }
}

std::vector<RegionRef> PageRefs(const Page &page) {
  std::vector<RegionRef> refs(page.count);
  std::iota(refs.begin(), refs.end(), page.first);
  return refs;
}

VisualSpan VirtualRow(const Page &page, const Region &rect) {
  return VisualSpan{page.id, TextSpan{0, 0}, rect, std::nullopt};
}

// ---------------------------------------------------------------------------
// Rows

bool RowLess(const Tuple &a, const Tuple &b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    auto c = CompareVisualSpans(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

void SortRows(Rows &rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row &a, const Row &b) { return RowLess(a.values, b.values); });
}

void SortSpans(std::vector<VisualSpan> &spans) {
  std::stable_sort(spans.begin(), spans.end(), [](const VisualSpan &a, const VisualSpan &b) {
    return CompareVisualSpans(a, b) < 0;
  });
}

Rows SingleColumn(std::vector<VisualSpan> spans) {
  Rows rows;
  rows.reserve(spans.size());
  for (auto &v : spans) rows.push_back(Row{Tuple{std::move(v)}, nullptr});
  return rows;
}

std::vector<VisualSpan> ColumnOf(const Rows &rows, std::size_t column) {
  std::vector<VisualSpan> out;
  out.reserve(rows.size());
  for (const auto &r : rows) out.push_back(r.values.at(column));
  return out;
}

std::vector<VisualSpan> ApplyConsolidate(const RegionStore &store, ConsolidateKind kind,
                                         std::vector<VisualSpan> rows) {
  SortSpans(rows);
  if (kind == ConsolidateKind::kContainment) return ConsolidateContainment(std::move(rows));
  return ConsolidateOverlap(store, std::move(rows));
}

std::vector<VisualSpan> ApplyBlock(const RegionStore &store, const BlockParams &p,
                                   std::vector<VisualSpan> rows) {
  SortSpans(rows);
  if (p.kind == BlockKind::kText) {
    return BlockText(store, std::move(rows), static_cast<std::int64_t>(p.a), p.min_count);
  }
  return BlockRegion(store, std::move(rows), p.a, p.b, p.min_count);
}

Rows GroupRows(const RegionStore &store, const PlanNode &node, Rows rows) {
  Rows out;
  if (rows.empty()) return out;
  SortRows(rows);
  const auto &in_cols = node.inputs.at(0).columns;
  auto index_of = [&](const std::string &name) {
    auto it = std::find(in_cols.begin(), in_cols.end(), name);
    if (it == in_cols.end()) throw Error(ErrorCode::kRuntime, "unbound alias '" + name + "'");
    return static_cast<std::size_t>(it - in_cols.begin());
  };
  std::size_t gi = index_of(node.group_input);
  std::vector<std::size_t> carried;
  for (std::size_t c = 1; c < node.columns.size(); ++c) carried.push_back(index_of(node.columns[c]));

  std::vector<VisualSpan> values = ColumnOf(rows, gi);
  for (auto &g : AlignedGroups(values, node.alignment, &store)) {
    Row r;
    r.values.push_back(std::move(g.bounds));
    // Virtual regions are constant on a page.
    for (std::size_t c : carried) r.values.push_back(rows[0].values[c]);
    r.members = std::make_shared<const std::vector<VisualSpan>>(std::move(g.members));
    out.push_back(std::move(r));
  }
  return out;
}

void AggregateRows(const RegionStore &store, AggregateKind kind, Rows &rows) {
  for (auto &r : rows) {
    if (!r.members) throw Error(ErrorCode::kRuntime, "aggregate over an ungrouped row");
    r.values.at(0) = kind == AggregateKind::kMinimalSuperRegion
                         ? MinimalSuperRegion(store, *r.members)
                         : MinimalBoundingRegion(*r.members);
  }
}

namespace {

std::vector<const VisualSpan *> SlotsOf(const Row &row) {
  std::vector<const VisualSpan *> slots;
  slots.reserve(row.values.size());
  for (const auto &v : row.values) slots.push_back(&v);
  return slots;
}

}  // namespace

Rows FilterRows(const RegionStore &store, std::uint32_t page,
                const std::vector<CompiledExpr> &preds, Rows rows) {
  Rows out;
  for (auto &r : rows) {
    auto slots = SlotsOf(r);
    Env env{&store, page, slots.data(), r.members ? r.members->size() : 0};
    if (AllHold(preds, env)) out.push_back(std::move(r));
  }
  return out;
}

Rows ProjectRows(const RegionStore &store, std::uint32_t page,
                 const std::vector<CompiledExpr> &exprs, const Rows &rows) {
  Rows out;
  out.reserve(rows.size());
  VisualSpan scratch;
  for (const auto &r : rows) {
    auto slots = SlotsOf(r);
    Env env{&store, page, slots.data(), r.members ? r.members->size() : 0};
    Row o;
    for (const auto &e : exprs) o.values.push_back(e.Span(env, scratch));
    out.push_back(std::move(o));
  }
  return out;
}

Rows IntersectRows(Rows a, Rows b) {
  SortRows(a);
  SortRows(b);
  Rows out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (RowLess(a[i].values, b[j].values)) {
      ++i;
    } else if (RowLess(b[j].values, a[i].values)) {
      ++j;
    } else {
      out.push_back(std::move(a[i]));
      ++i;
      ++j;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expression utilities

void SplitConjuncts(const vql::Expr &expr, std::vector<vql::Expr> &out) {
  if (expr.kind == ExprKind::kAnd) {
    for (const auto &a : expr.args) SplitConjuncts(a, out);
  } else {
    out.push_back(expr);
  }
}

void CollectNames(const vql::Expr &expr, std::set<std::string> &out) {
  if (expr.kind == ExprKind::kName) out.insert(expr.text);
  for (const auto &a : expr.args) CollectNames(a, out);
}

std::string FormatNumber(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::string AlignmentText(const AlignmentSpec &s) {
  std::string mode = s.mode == AlignMode::kLeadingEdge ? "leading"
                     : s.mode == AlignMode::kCenter    ? "center"
                                                       : "trailing";
  return "mode=" + mode + ", tolerance=" + FormatNumber(s.tolerance) +
         ", consecutive=" + (s.consecutive ? "true" : "false") +
         ", maxdist=" + FormatNumber(s.maxdist) + ", min=" + std::to_string(s.min_group_size) +
         ", scope=" + (s.store_scope ? "store" : "rows");
}

std::string Joined(const std::vector<std::string> &parts) {
  std::string s;
  for (const auto &p : parts) s += (s.empty() ? "" : ", ") + p;
  return s;
}

}  // namespace

std::string NodeLabel(const PlanNode &n) {
  auto as = [&] { return n.columns.empty() ? std::string() : " as " + n.columns[0]; };
  switch (n.kind) {
    case NodeKind::kScan:
      switch (n.source) {
        case ScanSource::kAll: return "Scan R(D)" + as();
        case ScanSource::kRegex: {
          vql::Expr s;
          s.kind = ExprKind::kString;
          s.text = n.argument;
          return "Scan RegEx(" + vql::Print(s) + ", D)" + as();
        }
        case ScanSource::kDict: {
          vql::Expr s;
          s.kind = ExprKind::kString;
          s.text = n.argument;
          return "Scan Dict(" + vql::Print(s) + ", D)" + as();
        }
        case ScanSource::kVirtual:
          return "Scan A(" + FormatNumber(n.rect.xl) + ", " + FormatNumber(n.rect.yl) + ", " +
                 FormatNumber(n.rect.xh) + ", " + FormatNumber(n.rect.yh) + ")" + as();
      }
      break;
    case NodeKind::kSelect: return "Select " + (n.predicate ? vql::Print(*n.predicate) : "");
    case NodeKind::kProject: return "Project " + Joined(n.columns);
    case NodeKind::kProduct: return "Product";
    case NodeKind::kUnion: return "Union";
    case NodeKind::kIntersect: return "Intersect";
    case NodeKind::kConsolidate:
      return std::string(n.consolidate == ConsolidateKind::kContainment ? "ConsolidateContained"
                                                                         : "ConsolidateOverlap") +
             as();
    case NodeKind::kBlock:
      if (n.block.kind == BlockKind::kText) {
        return "BlockText(max_gap=" + FormatNumber(n.block.a) +
               ", min_count=" + std::to_string(n.block.min_count) + ")" + as();
      }
      return "BlockRegion(x_dist=" + FormatNumber(n.block.a) + ", y_dist=" + FormatNumber(n.block.b) +
             ", min_count=" + std::to_string(n.block.min_count) + ")" + as();
    case NodeKind::kGroup:
      return std::string("Group ") +
             (n.alignment.axis == Axis::kVertical ? "vertically" : "horizontally") +
             " aligned(" + n.group_input + ", " + AlignmentText(n.alignment) + ")" + as();
    case NodeKind::kAggregate:
      return std::string("Aggregate ") +
             (n.aggregate == AggregateKind::kMinimalSuperRegion ? "MinimalSuperRegion"
                                                                 : "MinimalBoundingRegion") +
             "(" + (n.columns.empty() ? "" : n.columns[0]) + ")";
    case NodeKind::kJoin: return "Join " + Joined(n.columns);
  }
  return "?";
}

std::vector<Column> ResultColumns(const PlanNode &root) {
  const PlanNode *n = &root;
  while (n->kind == NodeKind::kUnion || n->kind == NodeKind::kIntersect) n = &n->inputs.at(0);
  std::vector<Column> cols;
  for (std::size_t i = 0; i < n->columns.size(); ++i) {
    cols.push_back(Column{n->columns[i], i < n->attrs.size() ? n->attrs[i] : vql::Attr::kVisualSpan});
  }
  return cols;
}

}  // namespace vqe::engine::internal
