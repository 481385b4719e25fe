#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/model_io.hpp"

using namespace shadowprice;

TEST(ModelIo, ExampleRoundTripKeepsValue) {
  ExampleDescriptor d;
  d.which = ExampleName::example5;
  d.K = 4;
  const auto inst = build_example(d);
  const auto doc = parse_model(to_json(inst).dump());
  ASSERT_TRUE(doc.problem && doc.candidate);
  EXPECT_EQ(doc.expected.at("example"), "example5");
  const auto a = solve_primal(*inst.problem);
  const auto b = solve_primal(*doc.problem);
  EXPECT_DOUBLE_EQ(a.lambda, b.lambda);
  const auto r = doc.problem->tree.find("r");
  EXPECT_EQ(doc.problem->truncation_bounds.get(r).lo, 0.0);
  EXPECT_EQ(doc.problem->truncation_bounds.get(r).hi, kInf);
}

TEST(ModelIo, OnePeriodRoundTrip) {
  ExampleDescriptor d;
  d.which = ExampleName::example3;
  d.quad = 5;
  const auto inst = build_example(d);
  const auto doc = parse_model(to_json(inst).dump());
  ASSERT_TRUE(doc.one_period);
  ASSERT_EQ(doc.one_period->scenarios.size(), 5u);
  EXPECT_DOUBLE_EQ(doc.one_period->scenarios[2].ask1, inst.one_period->scenarios[2].ask1);
}

TEST(ModelIo, ErrorsNameTheNode) {
  auto tree = fixtures::one_period(0.5);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.1}, {"d", 0.9}});
  auto j = to_json(fixtures::problem(tree, s, s));
  j["bid"].erase("u");
  try {
    model_from_json(j);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.node_id(), "u");
  }
  j = to_json(fixtures::problem(tree, s, s));
  j["ask"]["d"] = 0.5;
  try {
    model_from_json(j);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.node_id(), "d");
  }
  EXPECT_THROW(parse_model("{\"horizon\": 1"), ModelError);
  EXPECT_THROW(parse_model("{\"nodes\": []}"), ModelError);
}

TEST(ModelIo, ReportsAreCanonical) {
  EXPECT_EQ(number(kInf), "inf");
  EXPECT_EQ(number(-kInf), "-inf");
  EXPECT_EQ(number(std::nan("")), "nan");
  auto tree = fixtures::two_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.9}, {"uu", 1.45},
                                      {"ud", 1.12}, {"du", 1.0}, {"dd", 0.8}});
  auto ask = fixtures::process(tree, {{"r", 1.02}, {"u", 1.24}, {"d", 0.93}, {"uu", 1.5},
                                      {"ud", 1.16}, {"du", 1.04}, {"dd", 0.83}});
  auto prob = fixtures::problem(tree, bid, ask);
  const auto sol = solve_primal(prob);
  const auto report = solution_json(prob, sol);
  const auto csv = report_csv(&prob, report);
  EXPECT_EQ(csv.rfind("quantity,node_id,t,value\n", 0), 0u);
  // per-quantity rows come sorted by node id
  const auto d_pos = csv.find("gamma,d,1,");
  const auto r_pos = csv.find("gamma,r,0,");
  const auto u_pos = csv.find("gamma,u,1,");
  ASSERT_NE(d_pos, std::string::npos);
  EXPECT_LT(d_pos, r_pos);
  EXPECT_LT(r_pos, u_pos);
  EXPECT_EQ(report.dump(), solution_json(prob, solve_primal(prob)).dump());
}
