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

// Pieces shared by the optimized and the naive executor: compiled
// expressions, extraction kernels and the per-page operators.

#ifndef VQE_SRC_ENGINE_INTERNAL_H_
#define VQE_SRC_ENGINE_INTERNAL_H_

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqe/algebra.h"
#include "vqe/engine.h"
#include "vqe/error.h"
#include "vqe/region_store.h"
#include "vqe/vql.h"

namespace vqe::engine::internal {

struct Row {
  Tuple values;
  // Members of the group a grouped row stands for.
  std::shared_ptr<const std::vector<VisualSpan>> members;
};
using Rows = std::vector<Row>;

// Evaluation context: one pointer per column of the node's input.
struct Env {
  const RegionStore *store = nullptr;
  std::uint32_t page = 0;
  const VisualSpan *const *slots = nullptr;
  std::size_t count = 0;  // group size for count(G)
};

class CompiledExpr {
 public:
  // Resolves alias names against `columns`. Throws kRuntime on a name that
  // is not a column.
  static CompiledExpr Compile(const vql::Expr &expr,
                              const std::vector<std::string> &columns);

  bool Test(const Env &env) const;
  double Number(const Env &env) const;
  // Returns either a bound slot or `scratch` after filling it.
  const VisualSpan &Span(const Env &env, VisualSpan &scratch) const;

 private:
  enum class Op { kAnd, kOr, kNot, kCompare, kBool, kNumber, kSlot, kField, kCall };

  Op op_ = Op::kBool;
  vql::CmpOp cmp_ = vql::CmpOp::kEq;
  vql::Builtin fn_ = vql::Builtin::kCount;
  vql::Field field_ = vql::Field::kXl;
  double number_ = 0;
  bool flag_ = false;
  std::size_t slot_ = 0;
  std::shared_ptr<const CompiledRegex> regex_;
  std::shared_ptr<const CompiledPhrase> phrase_;
  std::vector<CompiledExpr> args_;
};

bool AllHold(const std::vector<CompiledExpr> &preds, const Env &env);

// Extraction for one scan node, compiled once per execution.
class ScanKernel {
 public:
  // Throws kUnknownDictionary, kBadPattern.
  ScanKernel(const RegionStore &store, const PlanNode &scan);

  // Rows of the given regions of one page, in ref order.
  void Extract(const RegionStore &store, std::span<const RegionRef> refs,
               std::vector<VisualSpan> &out) const;

 private:
  ScanSource source_;
  std::unique_ptr<CompiledRegex> regex_;
  std::unique_ptr<CompiledDictionary> dict_;
};

// Every ref of a page, ascending.
std::vector<RegionRef> PageRefs(const Page &page);

VisualSpan VirtualRow(const Page &page, const Region &rect);

// Canonical, lexicographic over the tuple.
bool RowLess(const Tuple &a, const Tuple &b);
void SortRows(Rows &rows);
void SortSpans(std::vector<VisualSpan> &spans);

Rows SingleColumn(std::vector<VisualSpan> spans);
std::vector<VisualSpan> ColumnOf(const Rows &rows, std::size_t column = 0);

std::vector<VisualSpan> ApplyConsolidate(const RegionStore &store, ConsolidateKind kind,
                                         std::vector<VisualSpan> rows);
std::vector<VisualSpan> ApplyBlock(const RegionStore &store, const BlockParams &params,
                                   std::vector<VisualSpan> rows);
// `node` is the kGroup node; `rows` follow node.inputs[0].columns.
Rows GroupRows(const RegionStore &store, const PlanNode &node, Rows rows);
void AggregateRows(const RegionStore &store, AggregateKind kind, Rows &rows);
Rows FilterRows(const RegionStore &store, std::uint32_t page,
                const std::vector<CompiledExpr> &preds, Rows rows);
Rows ProjectRows(const RegionStore &store, std::uint32_t page,
                 const std::vector<CompiledExpr> &exprs, const Rows &rows);
// Multiset intersection.
Rows IntersectRows(Rows a, Rows b);

// Top-level conjuncts, with nested ANDs flattened.
void SplitConjuncts(const vql::Expr &expr, std::vector<vql::Expr> &out);
// Alias names referenced by an expression.
void CollectNames(const vql::Expr &expr, std::set<std::string> &out);

std::string NodeLabel(const PlanNode &node);
std::string FormatNumber(double v);

// Column names and attributes of a query's result.
std::vector<Column> ResultColumns(const PlanNode &root);

// Marks errors that already name a plan node.
class NodeError : public Error {
 public:
  using Error::Error;
};

// Runs f, appending the node label to the first error raised below it.
template <typename F>
auto AtNode(const PlanNode &node, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const NodeError &) {
    throw;
  } catch (const Error &e) {
    std::string what = e.what();
    std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
    if (what.compare(0, prefix.size(), prefix) == 0) what.erase(0, prefix.size());
    throw NodeError(e.code(), what + " (at " + NodeLabel(node) + ")");
  }
}

}  // namespace vqe::engine::internal

#endif  // VQE_SRC_ENGINE_INTERNAL_H_
