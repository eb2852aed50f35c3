#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcs/errors.hpp"
#include "bcs/generators.hpp"
#include "bcs/np_solver.hpp"
#include "test_util.hpp"

using namespace bcs;
using namespace bcs::testutil;

namespace {

ValenceSystem stack_chain() {
  auto g = make_graph({"a"}, {});
  return make_system(g, {"q0", "q1", "q2"},
                     {{"q0", "+a", "q1"}, {"q1", "-a", "q2"}});
}

void check_yes(const ValenceSystem& sys, State qi, State qf, int k,
               const NpResult& r) {
  REQUIRE(r.answer == Answer::Yes);
  REQUIRE(r.certificate.has_value());
  CHECK(verify_certificate(sys, qi, qf, k, *r.certificate));
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->replay(sys, qi));
  CHECK(is_identity(sys.graph(), r.witness->storage));
  CHECK(r.witness->cs <= k);
}

}  // namespace

TEST_CASE("fra steps on hand-built slot automata") {
  auto g = make_graph({"a"}, {});
  ValenceSystem push = make_system(g, {"q0", "q1"}, {{"q0", "+a", "q1"}});
  ValenceSystem pop = make_system(g, {"q0", "q1"}, {{"q0", "-a", "q1"}});
  Nfa n_push = to_nfa(push, 0, 1);
  Nfa n_pop = to_nfa(pop, 0, 1);
  Nfa n_eps = to_nfa(push, 0, 0);

  std::vector<Nfa> seq = {n_push, n_pop};
  CHECK(fra_step_applicable(*g, seq, {FraStep::Kind::Cancel, 0, {}}));
  CHECK_FALSE(fra_step_applicable(*g, seq, {FraStep::Kind::Swap, 0, {}}));
  CHECK_THROWS_AS(fra_step_applicable(*g, seq, {FraStep::Kind::Cancel, 1, {}}),
                  InvalidArgumentError);

  std::vector<Nfa> seq2 = {n_eps};
  CHECK(fra_step_applicable(*g, seq2, {FraStep::Kind::DropEpsilon, 0, {}}));

  auto two = two_stack_graph();
  ValenceSystem sa = make_system(two, {"q0", "q1"}, {{"q0", "+a1", "q1"}});
  ValenceSystem sb = make_system(two, {"q0", "q1"}, {{"q0", "+b1", "q1"}});
  std::vector<Nfa> seq3 = {to_nfa(sa, 0, 1), to_nfa(sb, 0, 1)};
  CHECK(fra_step_applicable(*two, seq3, {FraStep::Kind::Swap, 0, {}}));

  ValenceSystem sa2 = make_system(two, {"q0", "q1"}, {{"q0", "+a2", "q1"}});
  std::vector<Nfa> seq4 = {to_nfa(sa, 0, 1), to_nfa(sa2, 0, 1)};
  CHECK_FALSE(fra_step_applicable(*two, seq4, {FraStep::Kind::Swap, 0, {}}));
}

TEST_CASE("search_fra finds reductions on explicit tests") {
  ValenceSystem sys = stack_chain();
  const auto& g = sys.graph();
  std::vector<Op> full = {op(g, "+a"), op(g, "-a")};

  // k = 1: four slots. Real content in slots 0 and 1, padding after.
  TestDescription test;
  test.k = 1;
  test.boundary = {sys.state("q0"), sys.state("q1"), sys.state("q2"),
                   sys.state("q2"), sys.state("q2")};
  test.context_alphabets = {full, full};
  test.block_alphabets = {{op(g, "+a")}, {op(g, "-a")}, {}, {}};

  auto cert = search_fra(sys, test);
  REQUIRE(cert.has_value());
  CHECK(verify_certificate(sys, sys.state("q0"), sys.state("q2"), 1,
                           Certificate{test, *cert}));

  // All slots epsilon-accepting: reducible, and the all-drops step list is
  // itself a valid certificate.
  TestDescription idle;
  idle.k = 1;
  idle.boundary.assign(5, sys.state("q0"));
  idle.context_alphabets = {full, full};
  idle.block_alphabets.assign(4, {});
  auto cert2 = search_fra(sys, idle);
  REQUIRE(cert2.has_value());
  FraCertificate all_drops;
  for (int i = 0; i < 4; ++i) {
    all_drops.steps.push_back(FraStep{FraStep::Kind::DropEpsilon, 0, {}});
  }
  CHECK(verify_certificate(sys, sys.state("q0"), sys.state("q0"), 1,
                           Certificate{idle, all_drops}));

  // A lone unmatched +a slot cannot reduce.
  TestDescription stuck;
  stuck.k = 0;
  stuck.boundary = {sys.state("q0"), sys.state("q1")};
  stuck.context_alphabets = {full};
  stuck.block_alphabets = {{op(g, "+a")}};
  CHECK_FALSE(search_fra(sys, stuck).has_value());
}

TEST_CASE("solve_np decides the forced stack example at k = 0") {
  ValenceSystem sys = stack_chain();
  NpResult r = solve_np(sys, sys.state("q0"), sys.state("q2"), 0);
  check_yes(sys, sys.state("q0"), sys.state("q2"), 0, r);
}

TEST_CASE("solve_np matches the two-stack chain thresholds") {
  auto two = two_stack_graph();
  ValenceSystem sys = make_system(two, {"q0", "q1", "q2", "q3", "q4"},
                                  {{"q0", "+a1", "q1"},
                                   {"q1", "+b1", "q2"},
                                   {"q2", "-a1", "q3"},
                                   {"q3", "-b1", "q4"}});
  State q0 = sys.state("q0");
  State q4 = sys.state("q4");

  NpResult r3 = solve_np(sys, q0, q4, 3);
  check_yes(sys, q0, q4, 3, r3);

  NpResult r2 = solve_np(sys, q0, q4, 2);
  CHECK(r2.answer == Answer::No);
}

TEST_CASE("coinciding initial and final states answer yes for any k") {
  auto g = make_graph({"a"}, {});
  ValenceSystem sys = make_system(g, {"q0"}, {});
  for (int k : {0, 2}) {
    NpResult r = solve_np(sys, 0, 0, k);
    check_yes(sys, 0, 0, k, r);
    CHECK(r.witness->storage.empty());
  }
}

TEST_CASE("the test-search stage is exercised and certified") {
  // A pumping loop makes the configuration space infinite; with a squeezed
  // stage-1 budget the test search must decide.
  auto g = make_graph({"p", "r"}, {{"p", "r"}});
  ValenceSystem sys = make_system(g, {"q0", "q1"},
                                  {{"q0", "+p", "q0"},
                                   {"q0", "+r", "q1"},
                                   {"q1", "-r", "q1"}});
  NpOptions opts;
  opts.closed_search_nodes = 3;  // force stage 1 to give up
  State q0 = sys.state("q0");
  State q1 = sys.state("q1");
  NpResult r = solve_np(sys, q0, q1, 1, opts);
  CHECK(r.stage == "test-search");
  check_yes(sys, q0, q1, 1, r);

  // Same squeezed stage-1 budget on a genuine no-instance.
  ValenceSystem no_sys = make_system(g, {"q0", "q1"},
                                     {{"q0", "+p", "q0"},
                                      {"q0", "+r", "q1"}});
  NpResult rno = solve_np(no_sys, no_sys.state("q0"), no_sys.state("q1"), 2,
                          opts);
  CHECK(rno.answer == Answer::No);
  CHECK(rno.stage == "test-search");
}

TEST_CASE("monotonicity in k on a mixed instance") {
  auto two = two_stack_graph();
  ValenceSystem sys = make_system(two, {"q0", "q1", "q2", "q3", "q4"},
                                  {{"q0", "+a1", "q1"},
                                   {"q1", "+b1", "q2"},
                                   {"q2", "-a1", "q3"},
                                   {"q3", "-b1", "q4"},
                                   {"q4", "eps", "q0"}});
  bool was_yes = false;
  for (int k = 0; k <= 4; ++k) {
    NpResult r = solve_np(sys, sys.state("q0"), sys.state("q4"), k);
    if (was_yes) CHECK(r.answer == Answer::Yes);
    if (r.answer == Answer::Yes) {
      was_yes = true;
      check_yes(sys, sys.state("q0"), sys.state("q4"), k, r);
    }
  }
}

TEST_CASE("solve_np agrees with the oracle on random instances") {
  size_t conclusive = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Instance inst = random_instance(seed);
    OracleOptions oracle_opts;
    oracle_opts.max_len = 10;
    OracleResult expected = brute_force_bcsreach(
        inst.system, inst.q_init, inst.q_fin, *inst.k, oracle_opts);
    if (expected.answer == Answer::Inconclusive) continue;
    ++conclusive;
    NpResult got = solve_np(inst.system, inst.q_init, inst.q_fin, *inst.k);
    CAPTURE(seed);
    REQUIRE(got.answer == expected.answer);
    if (got.answer == Answer::Yes) {
      check_yes(inst.system, inst.q_init, inst.q_fin, *inst.k, got);
    }
  }
  CHECK(conclusive > 30);
}

TEST_CASE("tampered certificates are rejected") {
  auto two = two_stack_graph();
  ValenceSystem sys = make_system(two, {"q0", "q1", "q2", "q3", "q4"},
                                  {{"q0", "+a1", "q1"},
                                   {"q1", "+b1", "q2"},
                                   {"q2", "-a1", "q3"},
                                   {"q3", "-b1", "q4"}});
  State q0 = sys.state("q0");
  State q4 = sys.state("q4");
  NpResult r = solve_np(sys, q0, q4, 3);
  REQUIRE(r.certificate.has_value());
  REQUIRE(verify_certificate(sys, q0, q4, 3, *r.certificate));

  // A swap between dependent alphabets must be rejected.
  Certificate bad = *r.certificate;
  bad.fra.steps.insert(bad.fra.steps.begin(),
                       FraStep{FraStep::Kind::Swap, 0, {}});
  // Make slots 0 and 1 dependent by giving them the same alphabet.
  bad.test.block_alphabets[0] = {op(*two, "+a1")};
  bad.test.block_alphabets[1] = {op(*two, "-a1")};
  CHECK_FALSE(verify_certificate(sys, q0, q4, 3, bad));

  // A block alphabet outside its context alphabet is malformed.
  Certificate bad2 = *r.certificate;
  bad2.test.block_alphabets[0] = {op(*two, "+b2")};
  bool ok = true;
  for (const Op& o : bad2.test.context_alphabets[0]) {
    (void)o;
  }
  ok = verify_certificate(sys, q0, q4, 3, bad2);
  // +b2 is independent of a1-side contexts, so it cannot be in the same
  // dependent context alphabet.
  CHECK_FALSE(ok);

  // Wrong k is rejected outright.
  CHECK_FALSE(verify_certificate(sys, q0, q4, 2, *r.certificate));
}

TEST_CASE("certificate text round-trips") {
  auto two = two_stack_graph();
  ValenceSystem sys = make_system(two, {"q0", "q1", "q2", "q3", "q4"},
                                  {{"q0", "+a1", "q1"},
                                   {"q1", "+b1", "q2"},
                                   {"q2", "-a1", "q3"},
                                   {"q3", "-b1", "q4"}});
  NpResult r = solve_np(sys, sys.state("q0"), sys.state("q4"), 3);
  REQUIRE(r.certificate.has_value());
  std::string text = certificate_to_text(sys, *r.certificate);
  Certificate back = certificate_from_text(sys, text);
  CHECK(back.test.k == r.certificate->test.k);
  CHECK(back.test.boundary == r.certificate->test.boundary);
  CHECK(back.test.context_alphabets == r.certificate->test.context_alphabets);
  CHECK(back.test.block_alphabets == r.certificate->test.block_alphabets);
  CHECK(back.fra.steps == r.certificate->fra.steps);
  CHECK(verify_certificate(sys, sys.state("q0"), sys.state("q4"), 3, back));
  CHECK_THROWS_AS(certificate_from_text(sys, "certificate {\n  nonsense\n}"),
                  ParseError);
}

TEST_CASE("maximal dependent alphabets") {
  auto two = two_stack_graph();
  ValenceSystem sys = make_system(two, {"q0"},
                                  {{"q0", "+a1", "q0"},
                                   {"q0", "-a1", "q0"},
                                   {"q0", "+b1", "q0"},
                                   {"q0", "+a2", "q0"}});
  auto md = maximal_dependent_alphabets(sys);
  // Sides: {a1, a2} ops and {b1} ops.
  REQUIRE(md.size() == 2);
  for (const auto& alpha : md) {
    CHECK(!alpha.empty());
  }

  ValenceSystem empty_sys = make_system(two, {"q0"}, {});
  auto md2 = maximal_dependent_alphabets(empty_sys);
  REQUIRE(md2.size() == 1);
  CHECK(md2[0].empty());
}
