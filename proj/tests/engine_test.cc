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

#include "vqe/engine.h"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "support/fixtures.h"
#include "support/random_query.h"
#include "support/random_store.h"
#include "vqe/error.h"

namespace vqe::engine {
namespace {

vql::TypedQuery Typed(const std::string &text,
                      const std::map<std::string, std::string> &params = {}) {
  vql::ParseResult parsed = vql::Parse(text);
  if (!parsed.query) {
    ADD_FAILURE() << vql::RenderDiagnostics(text, parsed.diagnostics, false);
    return {};
  }
  vql::SubstituteParams(*parsed.query, params);
  vql::ValidationResult v = vql::Validate(*parsed.query, vql::Catalog{{"T", "E"}});
  if (!v.typed) {
    ADD_FAILURE() << vql::RenderDiagnostics(text, v.diagnostics, false);
    return {};
  }
  return *v.typed;
}

std::string Fixture(const std::string &name) {
  return testing::ReadFile(testing::FixturePath("queries/" + name));
}

std::string Jsonl(const ResultSet &rs, const RegionStore &store) {
  std::ostringstream out;
  WriteJsonl(rs, store, out);
  return out.str();
}

std::vector<std::string> Ids(const ResultSet &rs, std::size_t column = 0) {
  std::vector<std::string> out;
  for (const auto &row : rs.rows) {
    out.push_back(row.at(column).source ? row[column].source->ToString() : "-");
  }
  return out;
}

ResultSet RunWith(const LogicalPlan &plan, const RegionStore &store, IndexConfig config,
                  unsigned threads = 1) {
  IndexSet indices = IndexSet::Build(store, config);
  return Execute(Optimize(plan, store, indices), store, indices, threads);
}

std::optional<ErrorCode> CodeOf(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  return std::nullopt;
}

const IndexConfig kConfigs[] = {IndexConfig::None(), IndexConfig{true, false},
                                IndexConfig{false, true}, IndexConfig::All()};

// ---------------------------------------------------------------------------
// Lowering

TEST(LowerTest, Q4IsTwoSelectsOverAProductOfScans) {
  EXPECT_EQ(Explain(Lower(Typed(Fixture("q4.vql")))),
            "Project R3.VisualSpan\n"
            "  Select StrictEastOf(R3, R2)\n"
            "    Select StrictSouthOf(R2, R1)\n"
            "      Product\n"
            "        Scan RegEx('operating system', D) as R1\n"
            "        Scan RegEx('windows', D) as R2\n"
            "        Scan R(D) as R3\n");
}

TEST(LowerTest, SingleSourceHasNoProduct) {
  EXPECT_EQ(Explain(Lower(Typed("select R1.Text from R(D) as R1"))),
            "Project R1.Text\n"
            "  Scan R(D) as R1\n");
}

TEST(LowerTest, Q1GroupsAggregatesThenFilters) {
  EXPECT_EQ(Explain(Lower(Typed(Fixture("q1.vql")))),
            "Project G.VisualSpan\n"
            "  Select Contains(G, A)\n"
            "    Select count(G) > 3\n"
            "      Aggregate MinimalBoundingRegion(G)\n"
            "        Group vertically aligned(R1, mode=leading, tolerance=0, "
            "consecutive=false, maxdist=20, min=2, scope=rows) as G\n"
            "          Select Contains(R1, A)\n"
            "            Product\n"
            "              Scan R(D) as R1\n"
            "              Scan A(0, 90, 500, inf) as A\n");
}

TEST(LowerTest, StructureOfQ4) {
  LogicalPlan plan = Lower(Typed(Fixture("q4.vql")));
  const PlanNode &root = plan.root;
  ASSERT_EQ(root.kind, NodeKind::kProject);
  const PlanNode *n = &root.inputs.at(0);
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(n->kind, NodeKind::kSelect);
    n = &n->inputs.at(0);
  }
  ASSERT_EQ(n->kind, NodeKind::kProduct);
  ASSERT_EQ(n->inputs.size(), 3u);
  EXPECT_EQ(n->inputs[0].source, ScanSource::kRegex);
  EXPECT_EQ(n->inputs[1].source, ScanSource::kRegex);
  EXPECT_EQ(n->inputs[2].source, ScanSource::kAll);
  EXPECT_EQ(n->columns, (std::vector<std::string>{"R1", "R2", "R3"}));
}

TEST(LowerTest, SetOperationsAndSubqueries) {
  std::string text =
      "select R1.Region from R(D) as R1 union select R2.Region from R(D) as R2 "
      "intersect select C.Region from ConsolidateContained("
      "(select R3.VisualSpan from Dict('T', D) as R3)) as C";
  EXPECT_EQ(Explain(Lower(Typed(text))),
            "Union\n"
            "  Project R1.Region\n"
            "    Scan R(D) as R1\n"
            "  Intersect\n"
            "    Project R2.Region\n"
            "      Scan R(D) as R2\n"
            "    Project C.Region\n"
            "      ConsolidateContained as C\n"
            "        Project C\n"
            "          Scan Dict('T', D) as R3\n");
}

TEST(LowerTest, IsDeterministic) {
  for (const auto &[name, text] : testing::FixtureQueries()) {
    EXPECT_EQ(Explain(Lower(Typed(text))), Explain(Lower(Typed(text)))) << name;
  }
}

// ---------------------------------------------------------------------------
// Optimization and explain

TEST(ExplainTest, Q2UsesTheTextIndexWhenAvailable) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q2.vql")));
  IndexSet all = IndexSet::Build(store, IndexConfig::All());
  std::string with = Explain(Optimize(plan, store, all));
  EXPECT_NE(with.find("text_index(phrase 'system requirements')"), std::string::npos) << with;
  // The virtual-region containment stays a filter over the index rows.
  EXPECT_NE(with.find("filter Contains(R1, A)"), std::string::npos) << with;

  IndexSet none = IndexSet::Build(store, IndexConfig::None());
  std::string without = Explain(Optimize(plan, store, none));
  EXPECT_NE(without.find("full_scan"), std::string::npos) << without;
  EXPECT_EQ(without.find("text_index"), std::string::npos) << without;
  EXPECT_EQ(without.find("region_index"), std::string::npos) << without;
}

TEST(ExplainTest, Q1UsesTheRegionIndexOnly) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q1.vql")));
  IndexSet all = IndexSet::Build(store, IndexConfig::All());
  std::string s = Explain(Optimize(plan, store, all));
  EXPECT_NE(s.find("region_index(x_l >= 0, x_h <= 500, y_l >= 90)"), std::string::npos) << s;
  EXPECT_EQ(s.find("text_index"), std::string::npos) << s;

  IndexSet text = IndexSet::Build(store, IndexConfig{true, false});
  std::string t = Explain(Optimize(plan, store, text));
  EXPECT_EQ(t.find("text_index"), std::string::npos) << t;
}

TEST(ExplainTest, Q4ProbesTheRegionIndex) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q4_phrase.vql")));
  IndexSet all = IndexSet::Build(store, IndexConfig::All());
  std::string s = Explain(Optimize(plan, store, all));
  EXPECT_NE(s.find("R3 index_nested_loop"), std::string::npos) << s;
  EXPECT_NE(s.find("probe StrictEastOf(R3, R2) [y_l >= R2.y_l, y_h <= R2.y_h, x_l >= R2.x_h]"),
            std::string::npos)
      << s;
  IndexSet text = IndexSet::Build(store, IndexConfig{true, false});
  std::string t = Explain(Optimize(plan, store, text));
  EXPECT_EQ(t.find("index_nested_loop"), std::string::npos) << t;
}

TEST(ExplainTest, HeaderNamesTheIndices) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q3.vql")));
  for (IndexConfig c : kConfigs) {
    IndexSet idx = IndexSet::Build(store, c);
    std::string s = Explain(Optimize(plan, store, idx));
    EXPECT_EQ(s.substr(0, s.find('\n')), "indices: " + c.Name());
  }
}

TEST(ExplainTest, RenderingIsStable) {
  RegionStore store = testing::SysreqStore();
  IndexSet idx = IndexSet::Build(store, IndexConfig::All());
  for (const auto &[name, text] : testing::FixtureQueries()) {
    LogicalPlan plan = Lower(Typed(text));
    EXPECT_EQ(Explain(Optimize(plan, store, idx)), Explain(Optimize(plan, store, idx))) << name;
  }
}

TEST(OptimizeTest, SingleAliasConjunctsBecomeInputFilters) {
  RegionStore store = testing::SysreqStore();
  IndexSet none = IndexSet::Build(store, IndexConfig::None());
  PhysicalPlan plan = Optimize(Lower(Typed(Fixture("q4_phrase.vql"))), store, none);
  const PlanNode &join = plan.root.inputs.at(0);
  ASSERT_EQ(join.kind, NodeKind::kJoin);
  ASSERT_EQ(join.filters.size(), 3u);
  ASSERT_EQ(join.filters[0].size(), 1u);
  EXPECT_EQ(vql::Print(join.filters[0][0]), "ContainsPhrase(R1, 'Operating Systems')");
  ASSERT_EQ(join.filters[1].size(), 1u);
  EXPECT_EQ(vql::Print(join.filters[1][0]), "ContainsPhrase(R2, 'Windows')");
  EXPECT_TRUE(join.filters[2].empty());
  // Every join step checks only aliases bound by it or by earlier steps.
  std::vector<bool> bound(join.inputs.size(), false);
  for (const auto &step : join.steps) {
    bound[step.input] = true;
    for (const auto &p : step.predicates) {
      std::string printed = vql::Print(p);
      for (std::size_t i = 0; i < join.columns.size(); ++i) {
        if (printed.find(join.columns[i] + ",") != std::string::npos ||
            printed.find(join.columns[i] + ")") != std::string::npos) {
          EXPECT_TRUE(bound[i]) << printed;
        }
      }
    }
  }
}

TEST(OptimizeTest, MismatchedStoreOrMissingIndexIsRejected) {
  RegionStore store = testing::SysreqStore();
  RegionStore other = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q2.vql")));
  IndexSet all = IndexSet::Build(store, IndexConfig::All());
  PhysicalPlan physical = Optimize(plan, store, all);
  EXPECT_EQ(CodeOf([&] { Execute(physical, other, all); }), ErrorCode::kIndexMismatch);
  IndexSet none = IndexSet::Build(store, IndexConfig::None());
  EXPECT_EQ(CodeOf([&] { Execute(physical, store, none); }), ErrorCode::kIndexMismatch);
}

// ---------------------------------------------------------------------------
// Execution on the shipped fixture

TEST(ExecuteTest, Q2FindsTheSystemRequirementsHeading) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q2.vql")));
  for (IndexConfig c : kConfigs) {
    ResultSet rs = RunWith(plan, store, c);
    ASSERT_EQ(rs.rows.size(), 1u) << c.Name();
    EXPECT_EQ(rs.rows[0][0].page_id, "sysreq");
    EXPECT_EQ(Ids(rs), (std::vector<std::string>{"1.1.1"}));
  }
}

TEST(ExecuteTest, Q3ReturnsTheOperatingSystemColumn) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q3.vql")));
  for (IndexConfig c : kConfigs) {
    ResultSet rs = RunWith(plan, store, c);
    std::vector<std::string> texts;
    for (const auto &row : rs.rows) texts.emplace_back(store.DocumentText(row[0].page_id, row[0].span));
    EXPECT_EQ(texts, (std::vector<std::string>{"Windows", "Linux", "AIX"})) << c.Name();
    EXPECT_EQ(Ids(rs), (std::vector<std::string>{"1.3.2.1", "1.3.3.1", "1.3.4.1"}));
  }
}

TEST(ExecuteTest, Q4ReturnsTheWindowsRequirementsCell) {
  RegionStore store = testing::SysreqStore();
  for (const char *name : {"q4.vql", "q4_phrase.vql"}) {
    LogicalPlan plan = Lower(Typed(Fixture(name)));
    ResultSet naive = ExecuteNaive(plan, store);
    EXPECT_EQ(Ids(naive), (std::vector<std::string>{"1.3.2.2"})) << name;
    for (IndexConfig c : kConfigs) {
      ResultSet rs = RunWith(plan, store, c);
      EXPECT_EQ(rs, naive) << name << " " << c.Name();
    }
    ASSERT_EQ(naive.rows.size(), 1u);
    EXPECT_EQ(store.DocumentText("sysreq", naive.rows[0][0].span), "2 GB RAM, 10 GB disk");
  }
}

TEST(ExecuteTest, Q1GroupsTheTableColumns) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q1.vql")));
  ResultSet naive = ExecuteNaive(plan, store);
  ASSERT_EQ(naive.rows.size(), 3u);
  EXPECT_EQ(naive.rows[0][0].region, (Region{10, 100, 190, 210}));
  EXPECT_EQ(naive.rows[1][0].region, (Region{100, 200, 500, 340}));
  EXPECT_EQ(naive.rows[2][0].region, (Region{320, 200, 500, 340}));
  for (IndexConfig c : kConfigs) EXPECT_EQ(RunWith(plan, store, c), naive) << c.Name();
  // Only the column of left table edges has more than four members.
  LogicalPlan strict = Lower(Typed(Fixture("q1.vql"), {{"n", "4"}}));
  ResultSet rs = ExecuteNaive(strict, store);
  ASSERT_EQ(rs.rows.size(), 1u);
  EXPECT_EQ(rs.rows[0][0].region, (Region{100, 200, 500, 340}));
}

TEST(ExecuteTest, ColumnsFollowTheSelectList) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan =
      Lower(Typed("select R1.Text, R1.Region, R1.Text from R(D) as R1 "
                  "where ContainsPhrase(R1, 'Linux')"));
  ResultSet rs = RunWith(plan, store, IndexConfig::All());
  ASSERT_EQ(rs.columns.size(), 3u);
  EXPECT_EQ(rs.columns[0].name, "R1.Text");
  EXPECT_EQ(rs.columns[1].name, "R1.Region");
  EXPECT_EQ(rs.columns[2].name, "R1.Text#2");
  EXPECT_EQ(rs.columns[1].attr, vql::Attr::kRegion);
  for (const auto &row : rs.rows) EXPECT_EQ(row.size(), 3u);
}

TEST(ExecuteTest, EmptyStoreGivesEmptyResults) {
  RegionStore empty;
  for (const auto &[name, text] : testing::FixtureQueries()) {
    LogicalPlan plan = Lower(Typed(text));
    EXPECT_TRUE(ExecuteNaive(plan, empty).rows.empty()) << name;
    for (IndexConfig c : kConfigs) EXPECT_TRUE(RunWith(plan, empty, c).rows.empty()) << name;
  }
}

TEST(ExecuteTest, RuntimeErrorsNameTheNode) {
  // The catalog knows "T" but this store never registered it.
  RegionStore store = testing::PageStore({{"1", {0, 0, 10, 10}, "Windows"}});
  LogicalPlan plan = Lower(Typed("select R.Text from Dict('T', D) as R"));
  for (bool naive : {false, true}) {
    try {
      if (naive) {
        ExecuteNaive(plan, store);
      } else {
        RunWith(plan, store, IndexConfig::All());
      }
      ADD_FAILURE() << "expected an error";
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnknownDictionary);
      EXPECT_NE(std::string(e.what()).find("(at Scan Dict('T', D) as R)"), std::string::npos)
          << e.what();
    }
  }
}

TEST(ExecuteTest, ThreadCountDoesNotChangeResults) {
  RegionStore store = testing::RandomStore(7, 200, 3);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    std::string text = testing::RandomQueryText(rng);
    LogicalPlan plan = Lower(Typed(text));
    std::optional<ErrorCode> c1, c4;
    ResultSet one, four;
    c1 = CodeOf([&] { one = RunWith(plan, store, IndexConfig::All(), 1); });
    c4 = CodeOf([&] { four = RunWith(plan, store, IndexConfig::All(), 4); });
    ASSERT_EQ(c1, c4) << text;
    if (!c1) EXPECT_EQ(Jsonl(one, store), Jsonl(four, store)) << text;
  }
}

// ---------------------------------------------------------------------------
// Properties

TEST(PropertyTest, OptimizedExecutionMatchesNaive) {
  std::mt19937_64 rng(2026);
  for (std::uint64_t s = 0; s < 150; ++s) {
    RegionStore store = testing::RandomStore(s, 120, 2);
    for (int q = 0; q < 2; ++q) {
      std::string text = testing::RandomQueryText(rng);
      LogicalPlan plan = Lower(Typed(text));
      ResultSet naive;
      std::optional<ErrorCode> want = CodeOf([&] { naive = ExecuteNaive(plan, store); });
      for (IndexConfig c : kConfigs) {
        ResultSet got;
        std::optional<ErrorCode> code = CodeOf([&] { got = RunWith(plan, store, c); });
        ASSERT_EQ(code, want) << "seed " << s << " " << c.Name() << "\n" << text;
        if (!want) ASSERT_EQ(got, naive) << "seed " << s << " " << c.Name() << "\n" << text;
      }
    }
  }
}

TEST(PropertyTest, SerializationIsByteIdentical) {
  std::mt19937_64 rng(31);
  RegionStore store = testing::RandomStore(31, 200, 3);
  for (int i = 0; i < 30; ++i) {
    std::string text = testing::RandomQueryText(rng);
    LogicalPlan plan = Lower(Typed(text));
    std::string a, b;
    auto run = [&](std::string &out) {
      ResultSet rs = RunWith(plan, store, IndexConfig::All(), 2);
      out = Jsonl(rs, store);
      std::ostringstream csv;
      WriteCsv(rs, store, csv);
      out += csv.str();
    };
    if (CodeOf([&] { run(a); })) continue;
    run(b);
    EXPECT_EQ(a, b) << text;
  }
}

// ---------------------------------------------------------------------------
// Serialization

TEST(SerializeTest, JsonlMasksFieldsByAttribute) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan =
      Lower(Typed("select R1.VisualSpan, R1.Span, R1.Region, R1.Text from R(D) as R1 "
                  "where ContainsPhrase(R1, 'AIX')"));
  ResultSet rs = RunWith(plan, store, IndexConfig::None());
  EXPECT_EQ(Jsonl(rs, store),
            "{\"page_id\":\"sysreq\","
            "\"R1.VisualSpan\":{\"region_id\":\"1.3.4.1\",\"xl\":100,\"yl\":320,\"xh\":300,"
            "\"yh\":340,\"begin\":130,\"end\":133,\"text\":\"AIX\"},"
            "\"R1.Span\":{\"begin\":130,\"end\":133,\"text\":\"AIX\"},"
            "\"R1.Region\":{\"region_id\":\"1.3.4.1\",\"xl\":100,\"yl\":320,\"xh\":300,\"yh\":340},"
            "\"R1.Text\":{\"text\":\"AIX\"}}\n");
}

TEST(SerializeTest, CsvQuotesAndUsesCrlf) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(
      "select R1.Text, R1.Region from R(D) as R1 where ContainsPhrase(R1, '10 GB disk')"));
  ResultSet rs = RunWith(plan, store, IndexConfig::None());
  std::ostringstream out;
  WriteCsv(rs, store, out);
  EXPECT_EQ(out.str(),
            "page_id,R1.Text.text,R1.Region.region_id,R1.Region.xl,R1.Region.yl,"
            "R1.Region.xh,R1.Region.yh\r\n"
            "sysreq,\"2 GB RAM, 10 GB disk\",1.3.2.2,320,240,500,260\r\n");
}

TEST(SerializeTest, SynthesizedSpansOmitTheRegionId) {
  RegionStore store = testing::SysreqStore();
  LogicalPlan plan = Lower(Typed(Fixture("q1.vql")));
  std::string s = Jsonl(RunWith(plan, store, IndexConfig::None()), store);
  EXPECT_EQ(s.find("region_id"), std::string::npos) << s;
}

}  // namespace
}  // namespace vqe::engine
