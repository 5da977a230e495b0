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

// Query compilation and execution: lowering validated VQL to a logical
// algebra plan, optimizing it against the available indices, and running
// it page by page. A naive evaluator over the logical plan serves as the
// reference for every optimization.

#ifndef VQE_ENGINE_H_
#define VQE_ENGINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vqe/algebra.h"
#include "vqe/indices.h"
#include "vqe/region.h"
#include "vqe/region_store.h"
#include "vqe/vql.h"

namespace vqe::engine {

enum class NodeKind {
  kScan,
  kSelect,
  kProject,
  kProduct,
  kUnion,
  kIntersect,
  kConsolidate,
  kBlock,
  kGroup,
  kAggregate,
  // Physical only: a Select chain over a Product of from-items (or over a
  // single from-item), with per-input access paths and a join order.
  kJoin,
};

enum class ScanSource { kAll, kRegex, kDict, kVirtual };
enum class ConsolidateKind { kContainment, kOverlap };
enum class BlockKind { kText, kRegion };
enum class AggregateKind { kMinimalBoundingRegion, kMinimalSuperRegion };

struct BlockParams {
  BlockKind kind = BlockKind::kText;
  // kText: max_gap in a. kRegion: x_dist in a, y_dist in b.
  double a = 0;
  double b = 0;
  std::size_t min_count = 1;
};

enum class AccessKind { kFullScan, kTextIndex, kRegionIndex };

struct AccessPath {
  AccessKind kind = AccessKind::kFullScan;
  // Human-readable index key for kTextIndex, e.g. phrase 'windows'.
  std::string key;
  // Range constraints on the region rectangle (kRegionIndex).
  std::vector<RangeConstraint> constraints;
  // Candidate regions from the text index, ascending (kTextIndex).
  std::shared_ptr<const std::vector<RegionRef>> candidates;
  double estimate = 0;
};

enum class JoinStrategy { kNestedLoop, kIndexNestedLoop };

// A range constraint on the inner input whose bound comes from a coordinate
// of an already bound input.
struct ProbeTerm {
  Coord coord = Coord::kXl;
  Bound bound = Bound::kLe;
  std::size_t outer = 0;  // input index
  Coord outer_coord = Coord::kXl;

  friend bool operator==(const ProbeTerm &, const ProbeTerm &) = default;
};

struct JoinStep {
  std::size_t input = 0;
  JoinStrategy strategy = JoinStrategy::kNestedLoop;
  // The conjunct driving an index-nested-loop probe, and its terms.
  std::optional<vql::Expr> probe;
  std::vector<ProbeTerm> probe_terms;
  // Conjuncts over several inputs, checked once this input is bound.
  std::vector<vql::Expr> predicates;
  double estimate = 0;
};

struct PlanNode {
  NodeKind kind = NodeKind::kScan;
  // Output column names; from-items have one column named by their alias.
  std::vector<std::string> columns;
  std::vector<PlanNode> inputs;

  // kScan
  ScanSource source = ScanSource::kAll;
  std::string argument;  // regex pattern or dictionary name
  Region rect;           // virtual region
  // kSelect
  std::optional<vql::Expr> predicate;
  // kProject
  std::vector<vql::Expr> exprs;
  std::vector<vql::Attr> attrs;
  // kConsolidate, kBlock
  ConsolidateKind consolidate = ConsolidateKind::kContainment;
  BlockParams block;
  // kGroup: alignment of the column named group_input; the output columns
  // are the group followed by the virtual regions of the input.
  AlignmentSpec alignment;
  std::string group_input;
  // kAggregate
  AggregateKind aggregate = AggregateKind::kMinimalBoundingRegion;

  // Physical annotations.
  AccessPath access;                           // kScan
  std::vector<std::vector<vql::Expr>> filters;  // kJoin, per input
  std::vector<JoinStep> steps;                 // kJoin, in execution order
  std::vector<vql::Expr> page_filters;         // kJoin, constant conjuncts
  double estimate = 0;
};

struct LogicalPlan {
  PlanNode root;
};

struct PhysicalPlan {
  PlanNode root;
  // The store the estimates and candidate lists were computed against.
  const RegionStore *store = nullptr;
  IndexConfig indices;
};

// Deterministic; the query must have passed validation.
LogicalPlan Lower(const vql::TypedQuery &query);

// Pushes single-input predicates into scans, chooses access paths from the
// available indices and orders joins greedily by estimated size. Never
// changes results.
PhysicalPlan Optimize(const LogicalPlan &plan, const RegionStore &store,
                      const IndexSet &indices);

struct Column {
  std::string name;
  vql::Attr attr = vql::Attr::kVisualSpan;

  friend bool operator==(const Column &, const Column &) = default;
};

// Rows sorted by page (store order), then canonically within a page.
struct ResultSet {
  std::vector<Column> columns;
  std::vector<Tuple> rows;

  friend bool operator==(const ResultSet &, const ResultSet &) = default;
};

// Runs pages on up to `threads` threads (0: hardware concurrency). Runtime
// errors name the plan node that raised them; with several failing pages,
// the first page in store order wins. Throws kIndexMismatch when the plan
// was optimized for another store or needs an index that is absent.
ResultSet Execute(const PhysicalPlan &plan, const RegionStore &store,
                  const IndexSet &indices, unsigned threads = 0);

// Reference evaluation: full scans, unordered nested-loop products and
// predicates applied to complete rows only.
ResultSet ExecuteNaive(const LogicalPlan &plan, const RegionStore &store);

// Line-oriented tree rendering, stable across runs.
std::string Explain(const LogicalPlan &plan);
std::string Explain(const PhysicalPlan &plan);

// {"page_id": ..., "<column>": {"region_id", "xl", "yl", "xh", "yh",
// "begin", "end", "text"}} per row, with the fields the column's attribute
// selects. Infinite coordinates are written as the string "inf".
void WriteJsonl(const ResultSet &result, const RegionStore &store,
                std::ostream &out);
// RFC 4180 CSV with a header row: page_id, then <column>.<field>.
void WriteCsv(const ResultSet &result, const RegionStore &store,
              std::ostream &out);

}  // namespace vqe::engine

#endif  // VQE_ENGINE_H_
