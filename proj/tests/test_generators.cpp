#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcs/errors.hpp"
#include "bcs/generators.hpp"
#include "bcs/transitive_forest.hpp"
#include "bcs/np_solver.hpp"
#include "test_util.hpp"

using namespace bcs;
using namespace bcs::testutil;

TEST_CASE("preset graphs have the documented shapes") {
  auto pd = preset_graph("pushdown", 3);
  CHECK(pd->size() == 3);
  for (Symbol a = 0; a < 3; ++a) {
    for (Symbol b = 0; b < 3; ++b) {
      CHECK_FALSE(pd->independent(a, b));
    }
  }

  auto petri = preset_graph("petri", 4);
  CHECK(petri->size() == 4);
  for (Symbol a = 0; a < 4; ++a) {
    CHECK_FALSE(petri->self_looped(a));
    for (Symbol b = 0; b < 4; ++b) {
      if (a != b) CHECK(petri->independent(a, b));
    }
  }

  auto blind = preset_graph("blind", 3);
  for (Symbol a = 0; a < 3; ++a) {
    for (Symbol b = 0; b < 3; ++b) {
      CHECK(blind->independent(a, b));
    }
  }

  auto multi = preset_graph("multipushdown", 2, 2);
  CHECK(multi->size() == 4);
  // Within a stack: dependent; across stacks: independent.
  CHECK_FALSE(multi->independent(multi->symbol("s0a0"), multi->symbol("s0a1")));
  CHECK(multi->independent(multi->symbol("s0a0"), multi->symbol("s1a1")));

  CHECK_THROWS_AS(preset_graph("pushdown", 0), InvalidArgumentError);
  CHECK_THROWS_AS(preset_graph("queue", 2), InvalidArgumentError);
}

TEST_CASE("random instances are deterministic and bounded") {
  for (uint64_t seed : {0ull, 7ull, 123456789ull}) {
    Instance a = random_instance(seed);
    Instance b = random_instance(seed);
    CHECK(a.system == b.system);
    CHECK(a.q_init == b.q_init);
    CHECK(a.q_fin == b.q_fin);
    CHECK(a.k == b.k);
  }
  InstanceLimits limits;
  limits.max_states = 4;
  limits.max_vertices = 3;
  limits.max_transitions = 6;
  limits.max_k = 2;
  for (uint64_t seed = 0; seed < 500; ++seed) {
    Instance inst = random_instance(seed, limits);
    CHECK(inst.system.state_count() <= 4);
    CHECK(inst.graph->size() <= 3);
    CHECK(inst.system.size() <= 6);
    CHECK(*inst.k <= 2);
  }
}

TEST_CASE("dimacs parsing and the sat oracle") {
  CnfFormula f = parse_dimacs("c tiny\np cnf 2 2\n1 -2 0\n-1 2 0\n");
  CHECK(f.variables == 2);
  REQUIRE(f.clauses.size() == 2);
  CHECK(brute_force_sat(f));

  CnfFormula unsat = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n");
  CHECK_FALSE(brute_force_sat(unsat));

  CHECK_THROWS_AS(parse_dimacs("1 0\n"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n1 1 1 1 0\n"),
                  InvalidArgumentError);
}

TEST_CASE("the sat reduction builds a C4 instance") {
  CnfFormula f{1, {{1, 1, 1}}};
  Instance inst = sat_to_c4(f);
  // Loop-free version is exactly C4: 4 vertices, 4 independence edges
  // forming the cycle.
  CHECK(inst.graph->size() == 4);
  size_t edges = 0;
  for (Symbol a = 0; a < 4; ++a) {
    CHECK_FALSE(inst.graph->self_looped(a));
    for (Symbol b = a + 1; b < 4; ++b) {
      if (inst.graph->independent(a, b)) ++edges;
    }
  }
  CHECK(edges == 4);
  CHECK(has_induced_p4_or_c4(*inst.graph));
  CHECK(*inst.k == 4 * (f.variables + 1) * static_cast<int>(f.clauses.size()));
}

TEST_CASE("sat reduction answers match the truth table") {
  std::vector<CnfFormula> formulas = {
      {1, {{1, 1, 1}}},                  // satisfiable
      {1, {{1, 1, 1}, {-1, -1, -1}}},    // unsatisfiable
      {2, {{1, -2, 2}}},                 // tautologically satisfiable
      {2, {{1, 2, 2}, {-1, -2, -2}}},    // satisfiable
      {3, {{1, -2, 3}, {-1, 2, -3}}},    // satisfiable
  };
  for (size_t i = 0; i < formulas.size(); ++i) {
    CAPTURE(i);
    Instance inst = sat_to_c4(formulas[i]);
    NpResult r = solve_np(inst.system, inst.q_init, inst.q_fin, *inst.k);
    REQUIRE(r.answer != Answer::Inconclusive);
    CHECK((r.answer == Answer::Yes) == brute_force_sat(formulas[i]));
    if (r.answer == Answer::Yes) {
      CHECK(verify_certificate(inst.system, inst.q_init, inst.q_fin, *inst.k,
                               *r.certificate));
      REQUIRE(r.witness.has_value());
      CHECK(r.witness->replay(inst.system, inst.q_init));
    }
  }
}

TEST_CASE("negative-from-zero never fires on the petri preset") {
  // Lemma-1 reading for Petri nets: a -p from empty storage is disabled.
  auto g = preset_graph("petri", 1);
  ValenceSystem sys(g, {"q0", "q1"},
                    {Transition{0, neg(g->symbol("p0")), 1}});
  CHECK_FALSE(step(sys, Configuration{0, Word{}}, sys.transitions()[0])
                  .has_value());
}
