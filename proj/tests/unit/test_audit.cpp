#include <gtest/gtest.h>

#include "support.hpp"

using namespace tempvote;
using namespace tempvote::testing;

namespace {

/// Straight from the definitions: every group, every l up to its cohesion level.
bool oracle_pass(Axiom axiom, const Instance& inst, const OutcomeSequence& out) {
        const std::size_t n = inst.voters();
        const std::size_t T = inst.horizon();
        for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
                const VoterGroup g(bits);
                const std::size_t level = cohesion_level(inst, g).level;
                for (std::size_t l = 1; l <= level; ++l) {
                        if (is_weak(axiom) && l != T)
                                continue;
                        const std::size_t need = l * g.size() / n;
                        if (strong_form(axiom) == Axiom::EJR) {
                                int best = 0;
                                for (VoterId v : g.members())
                                        best = std::max(best, satisfaction(inst, VoterGroup::single(v), out));
                                if (static_cast<std::size_t>(best) < need)
                                        return false;
                        } else {
                                const std::size_t b = strong_form(axiom) == Axiom::JR ? std::min<std::size_t>(1, need) : need;
                                if (static_cast<std::size_t>(satisfaction(inst, g, out)) < b)
                                        return false;
                        }
                }
        }
        return true;
}

} // namespace

TEST(Axiom, NamesRoundTrip) {
        for (Axiom a : kAllAxioms)
                EXPECT_EQ(parse_axiom(axiom_name(a)), a);
        EXPECT_EQ(parse_axiom("wejr"), Axiom::wEJR);
        EXPECT_EQ(parse_axiom("PJR"), Axiom::PJR);
        EXPECT_THROW((void)parse_axiom("ejr+"), std::invalid_argument);
}

TEST(Bound, Examples) {
        EXPECT_EQ(bound(Axiom::JR, 4, 2, 6), 1U);
        EXPECT_EQ(bound(Axiom::wJR, 4, 2, 6), 1U);
        // Single voter at l = T = qn + r gets q.
        for (std::size_t n = 1; n <= 5; ++n)
                for (std::size_t T = 1; T <= 20; ++T)
                        EXPECT_EQ(bound(Axiom::PJR, 1, T, n), T / n);
        for (Axiom a : kAllAxioms)
                EXPECT_EQ(bound(a, 3, 0, 5), 0U);
        EXPECT_EQ(bound(Axiom::EJR, 3, 5, 3), 5U);
        EXPECT_EQ(bound(Axiom::JR, 3, 5, 3), 1U);
        EXPECT_THROW((void)bound(Axiom::JR, 0, 1, 3), std::invalid_argument);
        EXPECT_THROW((void)bound(Axiom::JR, 4, 1, 3), std::invalid_argument);
}

TEST(BoundProperty, MonotoneInLevelAndSize) {
        for (Axiom a : kAllAxioms)
                for (std::size_t n = 1; n <= 8; ++n)
                        for (std::size_t g = 1; g <= n; ++g)
                                for (std::size_t l = 0; l <= 3 * n; ++l) {
                                        EXPECT_LE(bound(a, g, l, n), bound(a, g, l + 1, n));
                                        if (g < n) {
                                                EXPECT_LE(bound(a, g, l, n), bound(a, g + 1, l, n));
                                        }
                                }
}

TEST(Audit, TsdNotWjrFixture) {
        const Instance inst = fixture("tsd_not_wjr").instance;
        const AuditReport r = audit(Axiom::wJR, inst, run(TsdRule(), inst));
        EXPECT_FALSE(r.pass);
        const auto row = std::find_if(r.rows.begin(), r.rows.end(), [](const AuditRow& x) { return x.group == VoterGroup::of({2, 3, 4, 5}); });
        ASSERT_NE(row, r.rows.end());
        EXPECT_EQ(row->level, 2U);
        EXPECT_EQ(row->bound, 1U);
        EXPECT_EQ(row->achieved, 0U);
        EXPECT_FALSE(row->pass);
        // Weak audits only look at groups cohesive in every round.
        for (const AuditRow& x : r.rows)
                EXPECT_EQ(x.level, 2U);
        EXPECT_FALSE(audit(Axiom::JR, inst, run(TsdRule(), inst)).pass);
}

TEST(Audit, RowsAreCanonicalAndCoverPositiveBounds) {
        const Instance inst = fixture("mes_nonSP").instance;
        const OutcomeSequence out = run(MesRule(), inst);
        const AuditReport r = audit(Axiom::PJR, inst, out);
        std::size_t expected = 0;
        for (const auto& rec : enumerate_cohesive_groups(inst, 0))
                expected += bound(Axiom::PJR, rec.group.size(), rec.level, 3) > 0 ? 1 : 0;
        EXPECT_EQ(r.rows.size(), expected);
        for (std::size_t i = 1; i < r.rows.size(); ++i)
                EXPECT_TRUE(lex_less(r.rows[i - 1].group, r.rows[i].group));
        EXPECT_EQ(r.pass, r.failures() == 0);
}

TEST(Audit, EjrReportsLowestIndexBestMember) {
        // v1, v2 always approve a; outcome a, b, b: v2 approves b too from round 2.
        const Instance inst(2, {round_of({"a", "b"}, {{"a"}, {"a"}}), round_of({"a", "b"}, {{"a"}, {"a", "b"}}),
                                round_of({"a", "b"}, {{"a"}, {"a", "b"}})});
        const OutcomeSequence out{winners_of(inst, {"a", "b", "b"})};
        const AuditReport r = audit(Axiom::EJR, inst, out);
        const auto row = std::find_if(r.rows.begin(), r.rows.end(), [](const AuditRow& x) { return x.group == VoterGroup::of({0, 1}); });
        ASSERT_NE(row, r.rows.end());
        EXPECT_EQ(row->witness, VoterId{1});
        EXPECT_EQ(row->achieved, 3U);
        const OutcomeSequence only_a{winners_of(inst, {"a", "a", "a"})};
        const AuditReport r2 = audit(Axiom::EJR, inst, only_a);
        EXPECT_EQ(std::find_if(r2.rows.begin(), r2.rows.end(), [](const AuditRow& x) { return x.group.size() == 2; })->witness,
                  VoterId{0});
}

TEST(Audit, SingleVoter) {
        // The lone voter is T-cohesive: JR only asks for one round, the rest ask for all of them.
        // Zero-weight WAMs may hand later rounds to an unapproved tie-break winner.
        for (const Instance& inst : random_batch(50, 1, 5, 4, 71))
                for (const AnyRule& rule : builtin_rules()) {
                        const OutcomeSequence out = run(rule, inst);
                        const bool all_rounds = satisfaction(inst, VoterGroup::single(0), out) == static_cast<int>(inst.horizon());
                        EXPECT_TRUE(audit(Axiom::JR, inst, out).pass) << rule.name();
                        EXPECT_TRUE(audit(Axiom::wJR, inst, out).pass) << rule.name();
                        for (Axiom a : {Axiom::PJR, Axiom::EJR, Axiom::wPJR, Axiom::wEJR})
                                EXPECT_EQ(audit(a, inst, out).pass, all_rounds) << rule.name() << " " << axiom_name(a);
                        if (rule.name() == "av" || rule.name() == "mes" || rule.name().starts_with("phragmen") || rule.name() == "tsd") {
                                EXPECT_TRUE(all_rounds) << rule.name();
                        }
                }
}

TEST(Audit, AbsentRoundsCountAgainst) {
        const Instance inst = fixture("mes_nonSP").instance;
        const OutcomeSequence absent{std::vector<Winner>(4)};
        EXPECT_FALSE(audit(Axiom::JR, inst, absent).pass);
        EXPECT_FALSE(audit(Axiom::wJR, inst.truncated(3), OutcomeSequence{std::vector<Winner>(3)}).pass);
}

TEST(Audit, CapAndShapeErrors) {
        const Instance big = generate_random(17, 2, 2, 3);
        EXPECT_THROW((void)audit(Axiom::JR, big, run(TsdRule(), big)), CapExceeded);
        EXPECT_NO_THROW((void)audit(Axiom::JR, big, run(TsdRule(), big), 17));
        const Instance inst = fixture("mes_nonSP").instance;
        EXPECT_THROW((void)audit(Axiom::JR, inst, OutcomeSequence{}), std::invalid_argument);
}

TEST(AuditProperty, MatchesDefinitionOracle) {
        for (const Instance& inst : random_batch(150, 5, 4, 3, 81))
                for (const AnyRule& rule : builtin_rules()) {
                        const OutcomeSequence out = run(rule, inst);
                        for (Axiom a : kAllAxioms)
                                ASSERT_EQ(audit(a, inst, out).pass, oracle_pass(a, inst, out)) << rule.name() << " " << axiom_name(a);
                }
}

TEST(AuditProperty, ImplicationLatticeNeverBreaks) {
        for (const Instance& inst : random_batch(200, 5, 5, 4, 91))
                for (const AnyRule& rule : builtin_rules()) {
                        const ImplicationMatrix m = implication_matrix(inst, run(rule, inst));
                        EXPECT_TRUE(m.violations.empty()) << rule.name() << ": " << (m.violations.empty() ? "" : m.violations.front());
                }
}

TEST(AuditProperty, GreedyJrJrAndPhragmenPjr) {
        for (const Instance& inst : random_batch(300, 5, 5, 4, 101)) {
                EXPECT_TRUE(audit(Axiom::JR, inst, run(WamRule::greedy_jr(), inst)).pass);
                EXPECT_TRUE(audit(Axiom::PJR, inst, run(PhragmenRule(), inst)).pass);
        }
}

TEST(AuditProperty, MesWejrWhenNEqualsT) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
                const std::size_t n = 1 + seed % 5;
                const Instance inst = generate_random(n, n, 4, 5000 + seed);
                EXPECT_TRUE(audit(Axiom::wEJR, inst, run(MesRule(), inst)).pass) << "seed " << seed;
        }
}
