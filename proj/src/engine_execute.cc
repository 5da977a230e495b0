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
#include <atomic>
#include <exception>
#include <thread>

#include "engine_internal.h"

namespace vqe::engine {

namespace {

using internal::AtNode;
using internal::CompiledExpr;
using internal::Env;
using internal::Row;
using internal::Rows;
using internal::ScanKernel;

// Per-execution compiled state mirroring the plan tree.
struct NodeState {
  const PlanNode *node = nullptr;
  std::vector<NodeState> inputs;
  std::unique_ptr<ScanKernel> kernel;
  std::optional<CompiledExpr> predicate;
  std::vector<CompiledExpr> exprs;
  std::vector<std::vector<CompiledExpr>> filters;     // kJoin, per input
  std::vector<std::vector<CompiledExpr>> step_preds;  // kJoin, per step
  std::vector<CompiledExpr> page_filters;             // kJoin
};

std::vector<CompiledExpr> CompileAll(const std::vector<vql::Expr> &es,
                                     const std::vector<std::string> &columns) {
  std::vector<CompiledExpr> out;
  for (const auto &e : es) out.push_back(CompiledExpr::Compile(e, columns));
  return out;
}

NodeState Prepare(const RegionStore &store, const PlanNode &n) {
  return AtNode(n, [&] {
    NodeState s;
    s.node = &n;
    for (const auto &in : n.inputs) s.inputs.push_back(Prepare(store, in));
    switch (n.kind) {
      case NodeKind::kScan:
        if (n.source != ScanSource::kVirtual) s.kernel = std::make_unique<ScanKernel>(store, n);
        break;
      case NodeKind::kSelect:
        s.predicate = CompiledExpr::Compile(*n.predicate, n.inputs.at(0).columns);
        break;
      case NodeKind::kProject: s.exprs = CompileAll(n.exprs, n.inputs.at(0).columns); break;
      case NodeKind::kJoin:
        for (const auto &f : n.filters) s.filters.push_back(CompileAll(f, n.columns));
        for (const auto &st : n.steps) s.step_preds.push_back(CompileAll(st.predicates, n.columns));
        s.page_filters = CompileAll(n.page_filters, n.columns);
        break;
      case NodeKind::kProduct:
        throw Error(ErrorCode::kRuntime, "physical plans have no bare products");
      default: break;
    }
    return s;
  });
}

class PageRunner {
 public:
  PageRunner(const RegionStore &store, const IndexSet &indices, std::uint32_t page)
      : store_(store), indices_(indices), page_no_(page), page_(store.pages()[page]) {}

  Rows Eval(const NodeState &s) {
    return AtNode(*s.node, [&] { return EvalNode(s); });
  }

 private:
  // Regions of this page selected by a scan's access path.
  std::vector<RegionRef> AccessRefs(const PlanNode &scan) {
    const AccessPath &a = scan.access;
    switch (a.kind) {
      case AccessKind::kFullScan: return internal::PageRefs(page_);
      case AccessKind::kTextIndex: {
        const auto &c = *a.candidates;
        auto lo = std::lower_bound(c.begin(), c.end(), page_.first);
        auto hi = std::lower_bound(lo, c.end(), page_.end());
        return std::vector<RegionRef>(lo, hi);
      }
      case AccessKind::kRegionIndex:
        return indices_.region->RangeQueryPage(page_no_, a.constraints);
    }
    return {};
  }

  std::vector<VisualSpan> ScanRows(const NodeState &s) {
    std::vector<VisualSpan> out;
    auto refs = AccessRefs(*s.node);
    s.kernel->Extract(store_, refs, out);
    return out;
  }

  Rows EvalNode(const NodeState &s) {
    const PlanNode &n = *s.node;
    switch (n.kind) {
      case NodeKind::kScan:
        if (n.source == ScanSource::kVirtual) {
          return internal::SingleColumn({internal::VirtualRow(page_, n.rect)});
        }
        return internal::SingleColumn(ScanRows(s));
      case NodeKind::kConsolidate:
        return internal::SingleColumn(internal::ApplyConsolidate(
            store_, n.consolidate, internal::ColumnOf(Eval(s.inputs[0]))));
      case NodeKind::kBlock:
        return internal::SingleColumn(
            internal::ApplyBlock(store_, n.block, internal::ColumnOf(Eval(s.inputs[0]))));
      case NodeKind::kJoin: return EvalJoin(s);
      case NodeKind::kSelect:
        return internal::FilterRows(store_, page_no_, {*s.predicate}, Eval(s.inputs[0]));
      case NodeKind::kGroup: return internal::GroupRows(store_, n, Eval(s.inputs[0]));
      case NodeKind::kAggregate: {
        Rows rows = Eval(s.inputs[0]);
        internal::AggregateRows(store_, n.aggregate, rows);
        return rows;
      }
      case NodeKind::kProject:
        return internal::ProjectRows(store_, page_no_, s.exprs, Eval(s.inputs[0]));
      case NodeKind::kUnion: {
        Rows out;
        for (const auto &in : s.inputs) {
          Rows part = Eval(in);
          std::move(part.begin(), part.end(), std::back_inserter(out));
        }
        return out;
      }
      case NodeKind::kIntersect: {
        Rows acc = Eval(s.inputs[0]);
        for (std::size_t i = 1; i < s.inputs.size(); ++i) {
          if (acc.empty()) break;
          acc = internal::IntersectRows(std::move(acc), Eval(s.inputs[i]));
        }
        return acc;
      }
      case NodeKind::kProduct: break;
    }
    throw Error(ErrorCode::kRuntime, "unexpected plan node");
  }

  // Depth-first nested loops in step order.
  class JoinRun {
   public:
    JoinRun(PageRunner &runner, const NodeState &s)
        : r_(runner), s_(s), n_(*s.node), slots_(n_.inputs.size(), nullptr),
          materialized_(n_.inputs.size()), ref_rows_(n_.inputs.size()) {}

    Rows Run() {
      for (std::size_t i = 0; i < n_.inputs.size(); ++i) {
        const PlanNode &in = n_.inputs[i];
        if (in.kind == NodeKind::kScan && in.source == ScanSource::kVirtual) {
          materialized_[i] = {internal::VirtualRow(r_.page_, in.rect)};
          slots_[i] = &(*materialized_[i])[0];
        }
      }
      if (!internal::AllHold(s_.page_filters, MakeEnv())) return {};
      Recurse(0);
      return std::move(out_);
    }

   private:
    Env MakeEnv() const { return Env{&r_.store_, r_.page_no_, slots_.data(), 0}; }

    bool PassesFilters(std::size_t i, const VisualSpan &v) {
      const VisualSpan *saved = slots_[i];
      slots_[i] = &v;
      bool ok = internal::AllHold(s_.filters[i], MakeEnv());
      slots_[i] = saved;
      return ok;
    }

    // Filtered rows of input i, computed on first use.
    const std::vector<VisualSpan> &Materialize(std::size_t i) {
      if (!materialized_[i]) {
        const NodeState &in = s_.inputs[i];
        std::vector<VisualSpan> rows =
            in.node->kind == NodeKind::kScan
                ? AtNode(*in.node, [&] { return r_.ScanRows(in); })
                : internal::ColumnOf(r_.Eval(in));
        std::vector<VisualSpan> kept;
        for (auto &v : rows) {
          if (PassesFilters(i, v)) kept.push_back(std::move(v));
        }
        materialized_[i] = std::move(kept);
      }
      return *materialized_[i];
    }

    // The row of region `ref` for an index-probed input, or null when it
    // fails the input's filters. Cached per page.
    const VisualSpan *RefRow(std::size_t i, RegionRef ref) {
      auto &cache = ref_rows_[i];
      if (cache.state.empty()) {
        cache.state.assign(r_.page_.count, 0);
        cache.rows.resize(r_.page_.count);
      }
      std::size_t k = ref - r_.page_.first;
      if (cache.state[k] == 0) {
        cache.rows[k] = r_.store_.SpanOf(ref);
        cache.state[k] = PassesFilters(i, cache.rows[k]) ? 1 : 2;
      }
      return cache.state[k] == 1 ? &cache.rows[k] : nullptr;
    }

    void Recurse(std::size_t k) {
      if (k == n_.steps.size()) {
        Row row;
        row.values.reserve(slots_.size());
        for (const auto *v : slots_) row.values.push_back(*v);
        out_.push_back(std::move(row));
        return;
      }
      const JoinStep &step = n_.steps[k];
      const std::size_t i = step.input;
      const auto &preds = s_.step_preds[k];
      const PlanNode &in = n_.inputs[i];
      if (in.kind == NodeKind::kScan && in.source == ScanSource::kVirtual) {
        if (internal::AllHold(preds, MakeEnv())) Recurse(k + 1);
        return;
      }
      if (step.strategy == JoinStrategy::kIndexNestedLoop) {
        std::vector<RangeConstraint> cs;
        if (in.access.kind == AccessKind::kRegionIndex) cs = in.access.constraints;
        for (const ProbeTerm &t : step.probe_terms) {
          cs.push_back(RangeConstraint{t.coord, t.bound, CoordOf(slots_[t.outer]->region, t.outer_coord)});
        }
        std::vector<RegionRef> refs;
        r_.indices_.region->RangeQueryPageInto(r_.page_no_, cs, refs);
        std::sort(refs.begin(), refs.end());
        for (RegionRef ref : refs) {
          const VisualSpan *v = RefRow(i, ref);
          if (!v) continue;
          slots_[i] = v;
          if (internal::AllHold(preds, MakeEnv())) Recurse(k + 1);
        }
        slots_[i] = nullptr;
        return;
      }
      const auto &rows = Materialize(i);
      for (const auto &v : rows) {
        slots_[i] = &v;
        if (internal::AllHold(preds, MakeEnv())) Recurse(k + 1);
      }
      slots_[i] = nullptr;
    }

    struct RefCache {
      std::vector<std::uint8_t> state;  // 0 unknown, 1 kept, 2 filtered out
      std::vector<VisualSpan> rows;
    };

    PageRunner &r_;
    const NodeState &s_;
    const PlanNode &n_;
    std::vector<const VisualSpan *> slots_;
    std::vector<std::optional<std::vector<VisualSpan>>> materialized_;
    std::vector<RefCache> ref_rows_;
    Rows out_;
  };

  Rows EvalJoin(const NodeState &s) {
    Rows rows = JoinRun(*this, s).Run();
    internal::SortRows(rows);
    return rows;
  }

  const RegionStore &store_;
  const IndexSet &indices_;
  std::uint32_t page_no_;
  const Page &page_;
};

void CheckBinding(const PhysicalPlan &plan, const RegionStore &store, const IndexSet &indices) {
  if (plan.store != &store) {
    throw Error(ErrorCode::kIndexMismatch, "the plan was optimized for a different store");
  }
  if ((plan.indices.text && !indices.text) || (plan.indices.region && !indices.region)) {
    throw Error(ErrorCode::kIndexMismatch,
                "the plan uses indices (" + plan.indices.Name() + ") that are not available");
  }
}

}  // namespace

ResultSet Execute(const PhysicalPlan &plan, const RegionStore &store, const IndexSet &indices,
                  unsigned threads) {
  CheckBinding(plan, store, indices);
  ResultSet result;
  result.columns = internal::ResultColumns(plan.root);
  const std::size_t pages = store.pages().size();
  if (pages == 0) return result;
  NodeState state = Prepare(store, plan.root);

  std::vector<Rows> per_page(pages);
  std::vector<std::exception_ptr> errors(pages);
  std::atomic<std::size_t> next{0};
  // Pages after a failed one cannot change the reported error.
  std::atomic<std::size_t> first_error{pages};
  auto worker = [&] {
    for (std::size_t p = next++; p < pages; p = next++) {
      if (p > first_error.load()) continue;
      try {
        PageRunner runner(store, indices, static_cast<std::uint32_t>(p));
        per_page[p] = runner.Eval(state);
        internal::SortRows(per_page[p]);
      } catch (...) {
        errors[p] = std::current_exception();
        std::size_t seen = first_error.load();
        while (p < seen && !first_error.compare_exchange_weak(seen, p)) {
        }
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pages));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto &rows : per_page) {
    for (auto &r : rows) result.rows.push_back(std::move(r.values));
  }
  return result;
}

}  // namespace vqe::engine
