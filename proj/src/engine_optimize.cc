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

// Rewrites every FROM/WHERE block into a Join node: single-input conjuncts
// become input filters, scans pick the cheapest access path, and inputs
// are ordered greedily by estimated size. Pushed conjuncts are always
// re-checked on the rows an index returns, so an index only needs to
// return a superset of the qualifying regions.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>

#include "engine_internal.h"
#include "vqe/tokenizer.h"

namespace vqe::engine {

namespace {

using internal::CollectNames;
using internal::SplitConjuncts;
using vql::Builtin;
using vql::ExprKind;

// alias.coord (op) other, where other is another alias's coordinate or a
// constant.
struct Term {
  Coord coord = Coord::kXl;
  Bound bound = Bound::kLe;
  std::optional<std::string> other;
  Coord other_coord = Coord::kXl;
  double constant = 0;
};

Bound Flip(Bound b) { return b == Bound::kLe ? Bound::kGe : Bound::kLe; }

std::optional<Coord> CoordField(std::string_view name) {
  auto f = vql::ParseField(name);
  if (!f) return std::nullopt;
  switch (*f) {
    case vql::Field::kXl: return Coord::kXl;
    case vql::Field::kYl: return Coord::kYl;
    case vql::Field::kXh: return Coord::kXh;
    case vql::Field::kYh: return Coord::kYh;
    default: return std::nullopt;
  }
}

// (a.c1 bound b.c2) conditions implied by a binary spatial predicate.
struct Cond {
  Coord a;
  Bound bound;
  Coord b;
};

std::vector<Cond> SpatialConds(Builtin fn) {
  using C = Coord;
  const Cond x_within[] = {{C::kXl, Bound::kGe, C::kXl}, {C::kXh, Bound::kLe, C::kXh}};
  const Cond y_within[] = {{C::kYl, Bound::kGe, C::kYl}, {C::kYh, Bound::kLe, C::kYh}};
  std::vector<Cond> out;
  switch (fn) {
    case Builtin::kStrictNorthOf:
      out.assign(std::begin(x_within), std::end(x_within));
      [[fallthrough]];
    case Builtin::kNorthOf: out.push_back({C::kYh, Bound::kLe, C::kYl}); break;
    case Builtin::kStrictSouthOf:
      out.assign(std::begin(x_within), std::end(x_within));
      [[fallthrough]];
    case Builtin::kSouthOf: out.push_back({C::kYl, Bound::kGe, C::kYh}); break;
    case Builtin::kStrictEastOf:
      out.assign(std::begin(y_within), std::end(y_within));
      [[fallthrough]];
    case Builtin::kEastOf: out.push_back({C::kXl, Bound::kGe, C::kXh}); break;
    case Builtin::kStrictWestOf:
      out.assign(std::begin(y_within), std::end(y_within));
      [[fallthrough]];
    case Builtin::kWestOf: out.push_back({C::kXh, Bound::kLe, C::kXl}); break;
    case Builtin::kContains:
      out.assign(std::begin(x_within), std::end(x_within));
      out.insert(out.end(), std::begin(y_within), std::end(y_within));
      break;
    case Builtin::kIntersects:
    case Builtin::kTouches:
      out = {{C::kXl, Bound::kLe, C::kXh},
             {C::kXh, Bound::kGe, C::kXl},
             {C::kYl, Bound::kLe, C::kYh},
             {C::kYh, Bound::kGe, C::kYl}};
      break;
    default: break;
  }
  return out;
}

// Range terms on `inner` implied by a conjunct, or none.
std::vector<Term> DeriveTerms(const vql::Expr &c, const std::string &inner) {
  std::vector<Term> out;
  if (c.kind == ExprKind::kCall) {
    const vql::BuiltinInfo *info = vql::LookupBuiltin(c.text);
    if (!info || c.args.size() != 2) return out;
    const auto &a = c.args[0], &b = c.args[1];
    if (a.kind != ExprKind::kName || b.kind != ExprKind::kName || a.text == b.text) return out;
    bool inner_is_a = a.text == inner;
    if (!inner_is_a && b.text != inner) return out;
    for (const Cond &k : SpatialConds(info->id)) {
      Term t;
      if (inner_is_a) {
        t.coord = k.a;
        t.bound = k.bound;
        t.other = b.text;
        t.other_coord = k.b;
      } else {
        t.coord = k.b;
        t.bound = Flip(k.bound);
        t.other = a.text;
        t.other_coord = k.a;
      }
      out.push_back(t);
    }
    return out;
  }
  if (c.kind != ExprKind::kCompare) return out;
  struct Side {
    std::optional<std::string> alias;
    Coord coord = Coord::kXl;
    double constant = 0;
    bool ok = false;
  };
  auto side = [](const vql::Expr &e) {
    Side s;
    if (e.kind == ExprKind::kNumber) {
      s.constant = e.number;
      s.ok = true;
    } else if (e.kind == ExprKind::kField && e.args.at(0).kind == ExprKind::kName) {
      if (auto coord = CoordField(e.text)) {
        s.alias = e.args[0].text;
        s.coord = *coord;
        s.ok = true;
      }
    }
    return s;
  };
  Side l = side(c.args.at(0)), r = side(c.args.at(1));
  if (!l.ok || !r.ok) return out;
  std::vector<Bound> bounds;
  switch (c.op) {
    case vql::CmpOp::kLt:
    case vql::CmpOp::kLe: bounds = {Bound::kLe}; break;
    case vql::CmpOp::kGt:
    case vql::CmpOp::kGe: bounds = {Bound::kGe}; break;
    case vql::CmpOp::kEq: bounds = {Bound::kLe, Bound::kGe}; break;
    case vql::CmpOp::kNe: return out;
  }
  bool left = l.alias == inner, right = r.alias == inner;
  if (left == right) return out;  // neither side, or both sides
  const Side &mine = left ? l : r;
  const Side &other = left ? r : l;
  for (Bound bd : bounds) {
    Term t;
    t.coord = mine.coord;
    t.bound = left ? bd : Flip(bd);
    t.other = other.alias;
    t.other_coord = other.coord;
    t.constant = other.constant;
    out.push_back(t);
  }
  return out;
}

// Patterns without metacharacters match themselves (case-insensitively).
std::string LiteralFragment(std::string_view pattern) {
  if (pattern.find_first_of("\\^$.|?*+()[]{}") != std::string_view::npos) return {};
  std::string best, cur;
  for (char ch : pattern) {
    auto u = static_cast<unsigned char>(ch);
    if (u < 0x80 && std::isalnum(u)) {
      cur += static_cast<char>(std::tolower(u));
      if (cur.size() > best.size()) best = cur;
    } else {
      cur.clear();
    }
  }
  return best;
}

std::vector<RegionRef> Intersect(const std::vector<RegionRef> &a, const std::vector<RegionRef> &b) {
  std::vector<RegionRef> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::string Quoted(const std::string &s) {
  vql::Expr e;
  e.kind = ExprKind::kString;
  e.text = s;
  return vql::Print(e);
}

class Optimizer {
 public:
  Optimizer(const RegionStore &store, const IndexSet &indices)
      : store_(store), indices_(indices) {}

  PlanNode Transform(const PlanNode &n) {
    PlanNode out = n;
    switch (n.kind) {
      case NodeKind::kProject:
      case NodeKind::kGroup:
        out.inputs[0] = IsFromTree(n.inputs[0]) ? MakeJoin(n.inputs[0]) : Transform(n.inputs[0]);
        break;
      case NodeKind::kSelect:
      case NodeKind::kAggregate:
      case NodeKind::kUnion:
      case NodeKind::kIntersect:
        for (auto &in : out.inputs) in = Transform(in);
        break;
      default:
        for (auto &in : out.inputs) in = Transform(in);
        break;
    }
    out.estimate = NodeEstimate(out);
    return out;
  }

 private:
  // A Select chain over from-items (as opposed to one over an aggregate).
  static bool IsFromTree(const PlanNode &n) {
    const PlanNode *p = &n;
    while (p->kind == NodeKind::kSelect) p = &p->inputs.at(0);
    return p->kind != NodeKind::kAggregate && p->kind != NodeKind::kGroup;
  }

  static bool IsVirtual(const PlanNode &n) {
    return n.kind == NodeKind::kScan && n.source == ScanSource::kVirtual;
  }

  double RegionCount() const { return static_cast<double>(store_.size()); }
  double PageCount() const { return static_cast<double>(store_.pages().size()); }

  double NodeEstimate(const PlanNode &n) const {
    switch (n.kind) {
      case NodeKind::kScan:
        return n.source == ScanSource::kVirtual ? PageCount() : n.access.estimate;
      case NodeKind::kJoin: return n.estimate;
      case NodeKind::kUnion: {
        double s = 0;
        for (const auto &in : n.inputs) s += in.estimate;
        return s;
      }
      case NodeKind::kIntersect: {
        double s = n.inputs.empty() ? 0 : n.inputs[0].estimate;
        for (const auto &in : n.inputs) s = std::min(s, in.estimate);
        return s;
      }
      case NodeKind::kSelect:
        return n.inputs.at(0).estimate / 2;
      default:
        return n.inputs.empty() ? 0 : n.inputs[0].estimate;
    }
  }

  // Access path for a scan from its own source and the pushed filters.
  void ChooseAccess(PlanNode &scan, const std::vector<vql::Expr> &filters,
                    const std::map<std::string, Region> &virtuals) {
    const std::string &alias = scan.columns.at(0);
    AccessPath full;
    full.kind = AccessKind::kFullScan;
    full.estimate = RegionCount();
    AccessPath best = full;

    if (indices_.text) {
      std::optional<std::vector<RegionRef>> cands;
      std::string key;
      auto add = [&](std::vector<RegionRef> refs, const std::string &what) {
        cands = cands ? Intersect(*cands, refs) : std::move(refs);
        key += (key.empty() ? "" : " & ") + what;
      };
      if (scan.source == ScanSource::kRegex) {
        std::string frag = LiteralFragment(scan.argument);
        if (!frag.empty()) add(indices_.text->WithTokenContaining(frag), "fragment " + Quoted(frag));
      } else if (scan.source == ScanSource::kDict) {
        if (const Dictionary *dict = store_.FindDictionary(scan.argument)) {
          std::vector<RegionRef> all;
          CompiledDictionary compiled(*dict);
          for (const auto &tokens : compiled.phrases()) {
            auto refs = indices_.text->ContainsTokens(tokens);
            std::vector<RegionRef> merged;
            std::set_union(all.begin(), all.end(), refs.begin(), refs.end(),
                           std::back_inserter(merged));
            all = std::move(merged);
          }
          add(std::move(all), "dictionary " + Quoted(scan.argument));
        }
      }
      for (const auto &f : filters) {
        if (f.kind != ExprKind::kCall || f.args.size() != 2) continue;
        if (f.args[0].kind != ExprKind::kName || f.args[0].text != alias) continue;
        if (f.args[1].kind != ExprKind::kString) continue;
        const vql::BuiltinInfo *info = vql::LookupBuiltin(f.text);
        if (!info) continue;
        if (info->id == Builtin::kContainsPhrase) {
          auto tokens = TokenTexts(f.args[1].text);
          if (!tokens.empty()) add(indices_.text->ContainsTokens(tokens), "phrase " + Quoted(f.args[1].text));
        } else if (info->id == Builtin::kMatchesRegex) {
          std::string frag = LiteralFragment(f.args[1].text);
          if (!frag.empty()) add(indices_.text->WithTokenContaining(frag), "fragment " + Quoted(frag));
        }
      }
      if (cands) {
        AccessPath text;
        text.kind = AccessKind::kTextIndex;
        text.key = key;
        text.estimate = static_cast<double>(cands->size());
        text.candidates = std::make_shared<const std::vector<RegionRef>>(std::move(*cands));
        if (text.estimate < best.estimate) best = text;
      }
    }

    if (indices_.region) {
      std::vector<RangeConstraint> cs;
      for (const auto &f : filters) {
        for (const Term &t : DeriveTerms(f, alias)) {
          double v = t.constant;
          if (t.other) {
            auto it = virtuals.find(*t.other);
            if (it == virtuals.end()) continue;
            v = CoordOf(it->second, t.other_coord);
          }
          // Trivially true bounds select nothing useful.
          if (t.bound == Bound::kLe && v == kInf) continue;
          RangeConstraint rc{t.coord, t.bound, v};
          if (std::find(cs.begin(), cs.end(), rc) == cs.end()) cs.push_back(rc);
        }
      }
      if (!cs.empty()) {
        AccessPath region;
        region.kind = AccessKind::kRegionIndex;
        region.constraints = cs;
        region.estimate = indices_.region->Estimate(cs);
        if (region.estimate < best.estimate) best = region;
      }
    }
    scan.access = std::move(best);
  }

  // Scans inside derived sources only use their intrinsic text keys.
  PlanNode TransformItem(const PlanNode &n) {
    if (n.kind == NodeKind::kScan) {
      PlanNode s = n;
      if (!IsVirtual(s)) ChooseAccess(s, {}, {});
      s.estimate = NodeEstimate(s);
      return s;
    }
    if (n.kind == NodeKind::kConsolidate || n.kind == NodeKind::kBlock) {
      PlanNode d = n;
      d.inputs[0] = TransformItem(n.inputs[0]);
      d.estimate = NodeEstimate(d);
      return d;
    }
    return Transform(n);
  }

  PlanNode MakeJoin(const PlanNode &tree) {
    std::vector<vql::Expr> conjuncts;
    const PlanNode *base = &tree;
    std::vector<const vql::Expr *> preds;
    while (base->kind == NodeKind::kSelect) {
      preds.push_back(&*base->predicate);
      base = &base->inputs.at(0);
    }
    // Lowering stacks the first conjunct innermost.
    for (auto it = preds.rbegin(); it != preds.rend(); ++it) SplitConjuncts(**it, conjuncts);

    PlanNode join;
    join.kind = NodeKind::kJoin;
    std::vector<const PlanNode *> items;
    if (base->kind == NodeKind::kProduct) {
      for (const auto &in : base->inputs) items.push_back(&in);
    } else {
      items.push_back(base);
    }
    const std::size_t n = items.size();
    std::map<std::string, std::size_t> index;
    std::map<std::string, Region> virtuals;
    std::vector<bool> is_virtual(n);
    for (std::size_t i = 0; i < n; ++i) {
      join.columns.push_back(items[i]->columns.at(0));
      index[join.columns[i]] = i;
      is_virtual[i] = IsVirtual(*items[i]);
      if (is_virtual[i]) virtuals[join.columns[i]] = items[i]->rect;
    }

    // Classify conjuncts by the non-virtual inputs they reference.
    join.filters.assign(n, {});
    std::vector<std::pair<vql::Expr, std::set<std::size_t>>> multi;
    for (auto &c : conjuncts) {
      std::set<std::string> names;
      CollectNames(c, names);
      std::set<std::size_t> refs;
      for (const auto &name : names) {
        auto it = index.find(name);
        if (it != index.end() && !is_virtual[it->second]) refs.insert(it->second);
      }
      if (refs.empty()) {
        join.page_filters.push_back(std::move(c));
      } else if (refs.size() == 1) {
        join.filters[*refs.begin()].push_back(std::move(c));
      } else {
        multi.emplace_back(std::move(c), std::move(refs));
      }
    }

    std::vector<double> est(n);
    for (std::size_t i = 0; i < n; ++i) {
      PlanNode in;
      if (items[i]->kind == NodeKind::kScan) {
        in = *items[i];
        if (!is_virtual[i]) ChooseAccess(in, join.filters[i], virtuals);
        in.estimate = NodeEstimate(in);
      } else {
        in = TransformItem(*items[i]);
      }
      est[i] = in.estimate;
      join.inputs.push_back(std::move(in));
    }

    // Greedy order: virtual regions, then the smallest input, preferring
    // inputs connected to what is already bound.
    std::vector<bool> bound(n, false);
    std::vector<bool> used(multi.size(), false);
    std::size_t bound_real = 0;
    double rows = 1;
    auto push_step = [&](std::size_t i) {
      JoinStep step;
      step.input = i;
      bound[i] = true;
      for (std::size_t k = 0; k < multi.size(); ++k) {
        if (used[k]) continue;
        bool ready = std::all_of(multi[k].second.begin(), multi[k].second.end(),
                                 [&](std::size_t r) { return bound[r]; });
        if (ready) {
          used[k] = true;
          step.predicates.push_back(multi[k].first);
        }
      }
      const PlanNode &in = join.inputs[i];
      bool probeable = indices_.region && bound_real > 0 && in.kind == NodeKind::kScan &&
                       in.source == ScanSource::kAll && in.access.kind != AccessKind::kTextIndex;
      if (probeable) {
        std::vector<vql::Expr> drivers;
        for (const auto &p : step.predicates) {
          bool any = false;
          for (const Term &t : DeriveTerms(p, join.columns[i])) {
            if (!t.other) continue;
            auto it = index.find(*t.other);
            if (it == index.end() || is_virtual[it->second] || !bound[it->second]) continue;
            ProbeTerm pt{t.coord, t.bound, it->second, t.other_coord};
            if (std::find(step.probe_terms.begin(), step.probe_terms.end(), pt) ==
                step.probe_terms.end()) {
              step.probe_terms.push_back(pt);
            }
            any = true;
          }
          if (any) drivers.push_back(p);
        }
        if (!step.probe_terms.empty()) {
          step.strategy = JoinStrategy::kIndexNestedLoop;
          if (drivers.size() == 1) {
            step.probe = drivers[0];
          } else {
            vql::Expr conj;
            conj.kind = ExprKind::kAnd;
            conj.args = drivers;
            step.probe = conj;
          }
        }
      }
      if (is_virtual[i]) {
        step.estimate = rows;
      } else {
        double per_page = PageCount() > 0 ? est[i] / PageCount() : 0;
        rows = bound_real == 0 ? est[i] : rows * per_page;
        for (std::size_t s = 0; s < step.predicates.size(); ++s) rows *= 0.1;
        step.estimate = rows;
        ++bound_real;
      }
      join.steps.push_back(std::move(step));
    };

    for (std::size_t i = 0; i < n; ++i) {
      if (is_virtual[i]) push_step(i);
    }
    while (join.steps.size() < n) {
      std::vector<std::size_t> open, connected;
      for (std::size_t i = 0; i < n; ++i) {
        if (bound[i]) continue;
        open.push_back(i);
        if (bound_real == 0) continue;
        for (const auto &[c, refs] : multi) {
          if (!refs.count(i)) continue;
          bool others_bound = std::all_of(refs.begin(), refs.end(),
                                          [&](std::size_t r) { return r == i || bound[r]; });
          if (others_bound) {
            connected.push_back(i);
            break;
          }
        }
      }
      const auto &pool = connected.empty() ? open : connected;
      std::size_t pick = pool[0];
      for (std::size_t i : pool) {
        if (est[i] < est[pick]) pick = i;
      }
      push_step(pick);
    }
    join.estimate = bound_real == 0 ? PageCount() : rows;
    return join;
  }

  const RegionStore &store_;
  const IndexSet &indices_;
};

}  // namespace

PhysicalPlan Optimize(const LogicalPlan &plan, const RegionStore &store, const IndexSet &indices) {
  PhysicalPlan out;
  out.store = &store;
  out.indices = IndexConfig{indices.text != nullptr, indices.region != nullptr};
  Optimizer opt(store, indices);
  out.root = opt.Transform(plan.root);
  return out;
}

}  // namespace vqe::engine
