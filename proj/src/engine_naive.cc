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

// Direct interpretation of the logical plan, one page at a time: every
// scan reads the whole page, products enumerate every combination, and
// WHERE conjuncts are only tested on complete rows.

#include "engine_internal.h"

namespace vqe::engine {

namespace {

using internal::AtNode;
using internal::CompiledExpr;
using internal::Env;
using internal::Row;
using internal::Rows;

class NaiveRunner {
 public:
  NaiveRunner(const RegionStore &store, std::uint32_t page)
      : store_(store), page_no_(page), page_(store.pages()[page]) {}

  Rows Eval(const PlanNode &n) {
    return AtNode(n, [&] { return EvalNode(n); });
  }

 private:
  Rows EvalNode(const PlanNode &n) {
    switch (n.kind) {
      case NodeKind::kScan: {
        if (n.source == ScanSource::kVirtual) {
          return internal::SingleColumn({internal::VirtualRow(page_, n.rect)});
        }
        std::vector<VisualSpan> out;
        internal::ScanKernel(store_, n).Extract(store_, internal::PageRefs(page_), out);
        return internal::SingleColumn(std::move(out));
      }
      case NodeKind::kSelect: return EvalSelect(n);
      case NodeKind::kProduct: return Product(n, {});
      case NodeKind::kConsolidate:
        return internal::SingleColumn(internal::ApplyConsolidate(
            store_, n.consolidate, internal::ColumnOf(Eval(n.inputs.at(0)))));
      case NodeKind::kBlock:
        return internal::SingleColumn(
            internal::ApplyBlock(store_, n.block, internal::ColumnOf(Eval(n.inputs.at(0)))));
      case NodeKind::kGroup: return internal::GroupRows(store_, n, Eval(n.inputs.at(0)));
      case NodeKind::kAggregate: {
        Rows rows = Eval(n.inputs.at(0));
        internal::AggregateRows(store_, n.aggregate, rows);
        return rows;
      }
      case NodeKind::kProject: {
        std::vector<CompiledExpr> exprs;
        for (const auto &e : n.exprs) exprs.push_back(CompiledExpr::Compile(e, n.inputs.at(0).columns));
        return internal::ProjectRows(store_, page_no_, exprs, Eval(n.inputs.at(0)));
      }
      case NodeKind::kUnion: {
        Rows out;
        for (const auto &in : n.inputs) {
          Rows part = Eval(in);
          std::move(part.begin(), part.end(), std::back_inserter(out));
        }
        return out;
      }
      case NodeKind::kIntersect: {
        Rows acc = Eval(n.inputs.at(0));
        for (std::size_t i = 1; i < n.inputs.size(); ++i) {
          acc = internal::IntersectRows(std::move(acc), Eval(n.inputs[i]));
        }
        return acc;
      }
      case NodeKind::kJoin:
        throw Error(ErrorCode::kRuntime, "logical plans have no joins");
    }
    throw Error(ErrorCode::kRuntime, "unexpected plan node");
  }

  // A Select chain is tested as a whole; over a product, on every
  // combination as it is enumerated.
  Rows EvalSelect(const PlanNode &n) {
    std::vector<const PlanNode *> chain;
    const PlanNode *base = &n;
    while (base->kind == NodeKind::kSelect) {
      chain.push_back(base);
      base = &base->inputs.at(0);
    }
    std::vector<CompiledExpr> preds;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      preds.push_back(CompiledExpr::Compile(*(*it)->predicate, base->columns));
    }
    if (base->kind == NodeKind::kProduct) return AtNode(*base, [&] { return Product(*base, preds); });
    Rows rows = Eval(*base);
    return internal::FilterRows(store_, page_no_, preds, std::move(rows));
  }

  Rows Product(const PlanNode &n, const std::vector<CompiledExpr> &preds) {
    std::vector<std::vector<VisualSpan>> inputs;
    for (const auto &in : n.inputs) inputs.push_back(internal::ColumnOf(Eval(in)));
    Rows out;
    for (const auto &in : inputs) {
      if (in.empty()) return out;
    }
    std::vector<std::size_t> at(inputs.size(), 0);
    std::vector<const VisualSpan *> slots(inputs.size());
    while (true) {
      for (std::size_t i = 0; i < inputs.size(); ++i) slots[i] = &inputs[i][at[i]];
      if (internal::AllHold(preds, Env{&store_, page_no_, slots.data(), 0})) {
        Row r;
        for (const auto *v : slots) r.values.push_back(*v);
        out.push_back(std::move(r));
      }
      std::size_t i = inputs.size();
      while (i > 0) {
        --i;
        if (++at[i] < inputs[i].size()) break;
        at[i] = 0;
        if (i == 0) return out;
      }
    }
  }

  const RegionStore &store_;
  std::uint32_t page_no_;
  const Page &page_;
};

}  // namespace

ResultSet ExecuteNaive(const LogicalPlan &plan, const RegionStore &store) {
  ResultSet result;
  result.columns = internal::ResultColumns(plan.root);
  for (std::uint32_t p = 0; p < store.pages().size(); ++p) {
    Rows rows = NaiveRunner(store, p).Eval(plan.root);
    internal::SortRows(rows);
    for (auto &r : rows) result.rows.push_back(std::move(r.values));
  }
  return result;
}

}  // namespace vqe::engine
