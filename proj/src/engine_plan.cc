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
#include <set>

#include "engine_internal.h"

namespace vqe::engine {

namespace {

using internal::FormatNumber;
using internal::NodeLabel;
using vql::Builtin;
using vql::ExprKind;

PlanNode LowerQuery(const vql::Query &q);

PlanNode LowerSource(const vql::Expr &src, const std::string &alias) {
  PlanNode n;
  n.columns = {alias};
  if (src.kind == ExprKind::kSubquery) {
    n = LowerQuery(src.subquery.at(0));
    n.columns = {alias};
    return n;
  }
  const vql::BuiltinInfo *info = vql::LookupBuiltin(src.text);
  if (!info) throw Error(ErrorCode::kRuntime, "unknown source '" + src.text + "'");
  const auto &a = src.args;
  switch (info->id) {
    case Builtin::kAllSpans:
      n.kind = NodeKind::kScan;
      n.source = ScanSource::kAll;
      break;
    case Builtin::kRegex:
      n.kind = NodeKind::kScan;
      n.source = ScanSource::kRegex;
      n.argument = a.at(0).text;
      break;
    case Builtin::kDict:
      n.kind = NodeKind::kScan;
      n.source = ScanSource::kDict;
      n.argument = a.at(0).text;
      break;
    case Builtin::kVirtual:
      n.kind = NodeKind::kScan;
      n.source = ScanSource::kVirtual;
      n.rect = Region{a.at(0).number, a.at(1).number, a.at(2).number, a.at(3).number};
      break;
    case Builtin::kConsolidateContained:
    case Builtin::kConsolidateOverlap:
      n.kind = NodeKind::kConsolidate;
      n.consolidate = info->id == Builtin::kConsolidateContained ? ConsolidateKind::kContainment
                                                                  : ConsolidateKind::kOverlap;
      n.inputs.push_back(LowerSource(a.at(0), alias));
      break;
    case Builtin::kBlockText:
      n.kind = NodeKind::kBlock;
      n.block = BlockParams{BlockKind::kText, a.at(1).number, 0,
                            static_cast<std::size_t>(a.at(2).number)};
      n.inputs.push_back(LowerSource(a.at(0), alias));
      break;
    case Builtin::kBlockRegion:
      n.kind = NodeKind::kBlock;
      n.block = BlockParams{BlockKind::kRegion, a.at(1).number, a.at(2).number,
                            static_cast<std::size_t>(a.at(3).number)};
      n.inputs.push_back(LowerSource(a.at(0), alias));
      break;
    default:
      throw Error(ErrorCode::kRuntime, "'" + src.text + "' is not a source");
  }
  return n;
}

AlignmentSpec LowerAlignment(const vql::GroupClause &g) {
  AlignmentSpec s;
  s.axis = g.axis == vql::GroupAxis::kVertical ? Axis::kVertical : Axis::kHorizontal;
  for (const auto &opt : g.options) {
    const vql::Expr &v = opt.value;
    if (vql::NameIs(opt.name, vql::kOptConsecutive)) {
      s.consecutive = v.flag;
    } else if (vql::NameIs(opt.name, vql::kOptMaxdist)) {
      s.maxdist = v.number;
    } else if (vql::NameIs(opt.name, vql::kOptTolerance)) {
      s.tolerance = v.number;
    } else if (vql::NameIs(opt.name, vql::kOptMin)) {
      s.min_group_size = static_cast<std::size_t>(v.number);
    } else if (vql::NameIs(opt.name, vql::kOptMode)) {
      s.mode = vql::NameIs(v.text, "center")     ? AlignMode::kCenter
               : vql::NameIs(v.text, "trailing") ? AlignMode::kTrailingEdge
                                                 : AlignMode::kLeadingEdge;
    } else if (vql::NameIs(opt.name, vql::kOptScope)) {
      s.store_scope = vql::NameIs(v.text, "store");
    }
  }
  return s;
}

PlanNode Wrap(NodeKind kind, PlanNode input) {
  PlanNode n;
  n.kind = kind;
  n.columns = input.columns;
  n.inputs.push_back(std::move(input));
  return n;
}

PlanNode SelectChain(PlanNode input, const vql::Expr &cond) {
  std::vector<vql::Expr> conjuncts;
  internal::SplitConjuncts(cond, conjuncts);
  for (auto &c : conjuncts) {
    PlanNode s = Wrap(NodeKind::kSelect, std::move(input));
    s.predicate = std::move(c);
    input = std::move(s);
  }
  return input;
}

PlanNode LowerCore(const vql::SelectCore &core) {
  std::vector<PlanNode> items;
  std::vector<std::string> virtuals;
  for (const auto &item : core.from) {
    items.push_back(LowerSource(item.source, item.alias));
    if (items.back().kind == NodeKind::kScan && items.back().source == ScanSource::kVirtual) {
      virtuals.push_back(item.alias);
    }
  }
  PlanNode body;
  if (items.size() == 1) {
    body = std::move(items[0]);
  } else {
    body.kind = NodeKind::kProduct;
    for (auto &i : items) {
      body.columns.push_back(i.columns.at(0));
      body.inputs.push_back(std::move(i));
    }
  }
  if (core.where) body = SelectChain(std::move(body), *core.where);

  if (core.group) {
    const auto &g = *core.group;
    PlanNode group = Wrap(NodeKind::kGroup, std::move(body));
    group.alignment = LowerAlignment(g);
    group.group_input = g.input;
    group.columns = {g.alias};
    group.columns.insert(group.columns.end(), virtuals.begin(), virtuals.end());
    PlanNode agg = Wrap(NodeKind::kAggregate, std::move(group));
    if (g.aggregate && vql::NameIs(*g.aggregate, vql::kAggMinimalSuperRegion)) {
      agg.aggregate = AggregateKind::kMinimalSuperRegion;
    }
    body = std::move(agg);
    if (g.having) body = SelectChain(std::move(body), *g.having);
  }

  PlanNode project = Wrap(NodeKind::kProject, std::move(body));
  project.columns.clear();
  std::set<std::string> seen;
  for (const auto &item : core.select) {
    project.exprs.push_back(item.args.at(0));
    project.attrs.push_back(vql::ParseAttr(item.text).value_or(vql::Attr::kVisualSpan));
    std::string name = vql::Print(item);
    std::string unique = name;
    for (int k = 2; !seen.insert(unique).second; ++k) unique = name + "#" + std::to_string(k);
    project.columns.push_back(unique);
  }
  return project;
}

PlanNode LowerQuery(const vql::Query &q) {
  // Intersect binds tighter than union: split into intersect chains first.
  std::vector<std::vector<PlanNode>> chains(1);
  for (std::size_t i = 0; i < q.cores.size(); ++i) {
    if (i > 0 && q.ops[i - 1] == vql::SetOp::kUnion) chains.emplace_back();
    chains.back().push_back(LowerCore(q.cores[i]));
  }
  auto combine = [](NodeKind kind, std::vector<PlanNode> parts) {
    if (parts.size() == 1) return std::move(parts[0]);
    PlanNode n;
    n.kind = kind;
    n.columns = parts[0].columns;
    n.inputs = std::move(parts);
    return n;
  };
  std::vector<PlanNode> unions;
  for (auto &chain : chains) unions.push_back(combine(NodeKind::kIntersect, std::move(chain)));
  return combine(NodeKind::kUnion, std::move(unions));
}

// ---------------------------------------------------------------------------
// Explain

std::string Estimate(double v) {
  if (!(v > 0)) return "0";
  if (v < 10) {
    double r = std::round(v * 100) / 100;
    return FormatNumber(r);
  }
  return FormatNumber(std::round(v));
}

std::string ConstraintText(const RangeConstraint &c) {
  return std::string(CoordName(c.coord)) + (c.bound == Bound::kLe ? " <= " : " >= ") +
         FormatNumber(c.value);
}

std::string AccessText(const AccessPath &a) {
  switch (a.kind) {
    case AccessKind::kFullScan: return "full_scan";
    case AccessKind::kTextIndex: return "text_index(" + a.key + ")";
    case AccessKind::kRegionIndex: {
      std::string s;
      for (const auto &c : a.constraints) s += (s.empty() ? "" : ", ") + ConstraintText(c);
      return "region_index(" + s + ")";
    }
  }
  return "?";
}

void Line(std::string &out, int depth, const std::string &text) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += text;
  out += '\n';
}

void ExplainNode(const PlanNode &n, int depth, bool physical, std::string &out);

void ExplainJoin(const PlanNode &n, int depth, std::string &out) {
  Line(out, depth, NodeLabel(n) + "  est=" + Estimate(n.estimate));
  for (const auto &f : n.page_filters) Line(out, depth + 1, "page_filter " + vql::Print(f));
  for (std::size_t i = 0; i < n.inputs.size(); ++i) {
    const PlanNode &in = n.inputs[i];
    Line(out, depth + 1, "input " + n.columns[i] + ":");
    ExplainNode(in, depth + 2, true, out);
    if (i < n.filters.size()) {
      for (const auto &f : n.filters[i]) Line(out, depth + 2, "filter " + vql::Print(f));
    }
  }
  Line(out, depth + 1, "order:");
  for (std::size_t k = 0; k < n.steps.size(); ++k) {
    const JoinStep &s = n.steps[k];
    std::string line = std::to_string(k + 1) + ". " + n.columns[s.input] + " " +
                       (s.strategy == JoinStrategy::kIndexNestedLoop ? "index_nested_loop"
                                                                     : "nested_loop") +
                       "  est=" + Estimate(s.estimate);
    Line(out, depth + 2, line);
    if (s.probe) {
      std::string terms;
      for (const auto &t : s.probe_terms) {
        terms += (terms.empty() ? "" : ", ") + std::string(CoordName(t.coord)) +
                 (t.bound == Bound::kLe ? " <= " : " >= ") + n.columns[t.outer] + "." +
                 std::string(CoordName(t.outer_coord));
      }
      Line(out, depth + 3, "probe " + vql::Print(*s.probe) + " [" + terms + "]");
    }
    for (const auto &p : s.predicates) Line(out, depth + 3, "check " + vql::Print(p));
  }
}

void ExplainNode(const PlanNode &n, int depth, bool physical, std::string &out) {
  if (physical && n.kind == NodeKind::kJoin) {
    ExplainJoin(n, depth, out);
    return;
  }
  std::string label = NodeLabel(n);
  if (physical) {
    if (n.kind == NodeKind::kScan && n.source != ScanSource::kVirtual) {
      label += "  " + AccessText(n.access);
    }
    label += "  est=" + Estimate(n.estimate);
  }
  Line(out, depth, label);
  for (const auto &in : n.inputs) ExplainNode(in, depth + 1, physical, out);
}

}  // namespace

LogicalPlan Lower(const vql::TypedQuery &query) { return LogicalPlan{LowerQuery(query.query)}; }

std::string Explain(const LogicalPlan &plan) {
  std::string out;
  ExplainNode(plan.root, 0, false, out);
  return out;
}

std::string Explain(const PhysicalPlan &plan) {
  std::string out = "indices: " + plan.indices.Name() + "\n";
  ExplainNode(plan.root, 0, true, out);
  return out;
}

}  // namespace vqe::engine
