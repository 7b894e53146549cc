#include <gtest/gtest.h>

#include "support.hpp"

using namespace tempvote;
using namespace tempvote::testing;

namespace {

std::vector<ApprovalSet> ballots(const Instance& inst, const std::vector<std::vector<std::string>>& labels) {
        std::vector<ApprovalSet> out;
        for (RoundIndex t = 0; t < labels.size(); ++t)
                out.push_back(set_of(inst.round(t), labels[t]));
        return out;
}

/// Reference SP search: odometer over ballot tuples (round 0 most significant), full re-run per tuple.
template <class R>
std::optional<ManipulationFinding> sp_oracle(const R& rule, const Instance& inst, std::optional<VoterId> only = {}) {
        const std::size_t T = inst.horizon();
        const OutcomeSequence truth = run(rule, inst);
        for (VoterId v = 0; v < inst.voters(); ++v) {
                if (only && *only != v)
                        continue;
                const int base = satisfaction(inst, VoterGroup::single(v), truth);
                std::vector<std::uint64_t> mask(T, 1);
                while (true) {
                        Deviation d{v, {}};
                        for (auto m : mask)
                                d.approvals.emplace_back(m);
                        const OutcomeSequence out = run(rule, with_deviation(inst, d));
                        const int s = satisfaction(inst, VoterGroup::single(v), out);
                        if (s > base)
                                return ManipulationFinding{v, std::nullopt, d, truth, out, base, s};
                        bool advanced = false;
                        for (std::size_t t = T; t-- > 0;) {
                                if (mask[t] < ApprovalSet::all(inst.round(t).alternative_count()).bits()) {
                                        ++mask[t];
                                        advanced = true;
                                        break;
                                }
                                mask[t] = 1;
                        }
                        if (!advanced)
                                break;
                }
        }
        return std::nullopt;
}

/// Reference OIIA: rebuild the edited instance and re-run every prefix from scratch.
template <class R>
bool oiia_oracle(const R& rule, const Instance& inst) {
        const OutcomeSequence truth = run(rule, inst);
        for (RoundIndex t = 0; t < inst.horizon(); ++t)
                for (VoterId v = 0; v < inst.voters(); ++v) {
                        const ApprovalSet a = inst.approvals(t, v);
                        if (a.size() < 2)
                                continue;
                        for (AltIndex d : a.members()) {
                                if (truth[t] && d == *truth[t])
                                        continue;
                                if (rerun_winner(rule, with_ballot(inst, t, v, a.without(d)), t) != truth[t])
                                        return false;
                        }
                }
        return true;
}

/// Reference OSP: every other ballot at round t, earlier rounds truthful.
template <class R>
bool osp_oracle(const R& rule, const Instance& inst) {
        const OutcomeSequence truth = run(rule, inst);
        for (RoundIndex t = 0; t < inst.horizon(); ++t)
                for (VoterId v = 0; v < inst.voters(); ++v) {
                        const ApprovalSet honest = inst.approvals(t, v);
                        const bool had = truth[t] && honest.contains(*truth[t]);
                        for (std::uint64_t m = 1; m <= ApprovalSet::all(inst.round(t).alternative_count()).bits(); ++m) {
                                const Winner w = rerun_winner(rule, with_ballot(inst, t, v, ApprovalSet(m)), t);
                                if (!had && w && honest.contains(*w))
                                        return false;
                        }
                }
        return true;
}

template <class R>
bool monotonicity_oracle(const R& rule, const Instance& inst) {
        const OutcomeSequence truth = run(rule, inst);
        for (RoundIndex t = 0; t < inst.horizon(); ++t)
                for (VoterId v = 0; v < inst.voters(); ++v) {
                        if (!truth[t])
                                continue;
                        const ApprovalSet a = inst.approvals(t, v);
                        if (rerun_winner(rule, with_ballot(inst, t, v, a.with(*truth[t])), t) != truth[t])
                                return false;
                }
        return true;
}

} // namespace

TEST(Property, NamesRoundTrip) {
        for (Property p : {Property::SP, Property::OSP, Property::PrefixOSP, Property::OIIA, Property::OIIAAddition, Property::Monotonicity})
                EXPECT_EQ(parse_property(property_name(p)), p);
        EXPECT_THROW((void)parse_property("iia"), std::invalid_argument);
}

TEST(StrategySpace, SizeIsProductOfNonEmptySubsets) {
        const Instance inst = fixture("greedyjr_nonSP").instance;
        EXPECT_EQ(strategy_space_size(inst), 15U * 15U);
        EXPECT_EQ(strategy_space_size(inst, 1), 15U);
        const Instance mes = fixture("mes_nonSP").instance;
        EXPECT_EQ(strategy_space_size(mes), 7U * 7U * 7U * 7U);
        const PropertyVerdict v = find_sp_violation(TsdRule(), mes);
        EXPECT_TRUE(v.holds);
        EXPECT_TRUE(v.exhaustive);
        EXPECT_EQ(v.candidates, 3U * 2401U);
}

TEST(FindSpViolation, GreedyJrFixture) {
        const Fixture f = fixture("greedyjr_nonSP");
        const Instance& inst = f.instance;
        const PropertyVerdict v = find_sp_violation(WamRule::greedy_jr(), inst, {}, VoterId{2});
        ASSERT_FALSE(v.holds);
        const ManipulationFinding& w = *v.witness;
        EXPECT_EQ(w.voter, 2U);
        EXPECT_EQ(w.truthful_satisfaction, 1);
        EXPECT_EQ(w.deviated_satisfaction, 2);
        // First in enumeration order; c3 (bit 1) comes before c4 (bit 3).
        EXPECT_EQ(w.deviation.approvals, ballots(inst, {{"c3"}, {"c2"}}));

        // The table's own deviation gives the same gain.
        const ManipulationFinding paper = evaluate_deviation(WamRule::greedy_jr(), inst, *f.deviation);
        EXPECT_EQ(paper.deviation.approvals, ballots(inst, {{"c4"}, {"c2"}}));
        EXPECT_EQ(paper.truthful_satisfaction, 1);
        EXPECT_EQ(paper.deviated_satisfaction, 2);
        EXPECT_EQ(paper.truthful.winners, winners_of(inst, {"c1", "c3"}));
        EXPECT_EQ(paper.deviated.winners, winners_of(inst, {"c1", "c2"}));
        const auto all = all_sp_violations(WamRule::greedy_jr(), inst, {}, VoterId{2});
        EXPECT_NE(std::find_if(all.begin(), all.end(), [&](const ManipulationFinding& x) { return x.deviation == paper.deviation; }),
                  all.end());
}

TEST(FindSpViolation, MesFixture) {
        const Fixture f = fixture("mes_nonSP");
        const Instance& inst = f.instance;
        const PropertyVerdict v = find_sp_violation(MesRule(), inst, {}, VoterId{2});
        ASSERT_FALSE(v.holds);
        EXPECT_EQ(v.witness->deviation, *f.deviation);
        EXPECT_EQ(v.witness->truthful_satisfaction, 3);
        EXPECT_EQ(v.witness->deviated_satisfaction, 4);
        EXPECT_EQ(v.witness->deviated.winners, winners_of(inst, {"c1", "c1", "c1", "c3"}));
        // Without a voter filter, canonical order reaches the symmetric v1 first.
        const PropertyVerdict any = find_sp_violation(MesRule(), inst);
        ASSERT_FALSE(any.holds);
        EXPECT_EQ(any.witness->voter, 0U);
        EXPECT_EQ(any.witness->deviated_satisfaction, 4);
}

TEST(FindSpViolation, PhragmenFixture) {
        const Fixture f = fixture("pp_nonSP");
        const PropertyVerdict v = find_sp_violation(PhragmenRule(), f.instance, {}, VoterId{2});
        ASSERT_FALSE(v.holds);
        EXPECT_EQ(v.witness->deviation, *f.deviation);
        EXPECT_EQ(v.witness->truthful_satisfaction, 1);
        EXPECT_EQ(v.witness->deviated_satisfaction, 2);
}

TEST(FindSpViolation, TsdSmallInstancesHold) {
        for (const Instance& inst : random_batch(200, 3, 3, 3, 111)) {
                const PropertyVerdict v = find_sp_violation(TsdRule(), inst);
                EXPECT_TRUE(v.holds);
                EXPECT_TRUE(v.exhaustive);
                EXPECT_EQ(v.candidates, inst.voters() * strategy_space_size(inst));
        }
}

TEST(FindSpViolation, CapIsAHardError) {
        const Instance inst = generate_random(2, 4, 5, 1);
        Caps caps;
        caps.strategies = strategy_space_size(inst) - 1;
        EXPECT_THROW((void)find_sp_violation(TsdRule(), inst, caps), CapExceeded);
        EXPECT_THROW((void)check_prefix_osp(TsdRule(), inst, caps), CapExceeded);
        caps.strategies += 1;
        EXPECT_NO_THROW((void)find_sp_violation(TsdRule(), inst, caps));
        EXPECT_THROW((void)find_sp_violation(TsdRule(), inst, {}, VoterId{5}), std::out_of_range);
}

TEST(FindSpViolationProperty, MatchesOdometerOracle) {
        const std::vector<AnyRule> rules{WamRule::greedy_jr(), WamRule::unit_gain(), MesRule(), PhragmenRule(), TsdRule()};
        for (const Instance& inst : random_batch(60, 3, 3, 3, 121))
                for (const AnyRule& rule : rules) {
                        const PropertyVerdict v = find_sp_violation(rule, inst);
                        const auto expected = sp_oracle(rule, inst);
                        ASSERT_EQ(v.holds, !expected.has_value()) << rule.name();
                        if (expected) {
                                EXPECT_EQ(*v.witness, *expected) << rule.name();
                        }
                }
}

TEST(Replay, EveryWitnessReproduces) {
        const std::vector<AnyRule> rules{WamRule::greedy_jr(), MesRule(), PhragmenRule(), IrrelevantDictatorRule()};
        for (const Instance& inst : random_batch(60, 3, 3, 3, 131))
                for (const AnyRule& rule : rules)
                        for (Property p : {Property::SP, Property::OSP, Property::PrefixOSP, Property::OIIA, Property::OIIAAddition,
                                           Property::Monotonicity}) {
                                const PropertyVerdict v = check_property(p, rule, inst);
                                ASSERT_EQ(v.holds, !v.witness.has_value());
                                if (!v.witness)
                                        continue;
                                EXPECT_EQ(replay(rule, inst, *v.witness), *v.witness) << rule.name() << " " << property_name(p);
                                if (p == Property::SP || p == Property::OSP || p == Property::PrefixOSP) {
                                        EXPECT_GT(v.witness->deviated_satisfaction, v.witness->truthful_satisfaction);
                                }
                        }
}

TEST(Monotonicity, AvHoldsAndToyRuleFails) {
        for (const Instance& inst : random_batch(100, 4, 3, 3, 141))
                EXPECT_TRUE(check_monotonicity(WamRule::approval_voting(), inst).holds);

        // Least-approved: v2 adding the winner b makes a the unique least-approved alternative.
        const Instance toy(2, {round_of({"a", "b"}, {{"a", "b"}, {"a"}})});
        EXPECT_EQ(run(LeastApprovedRule(), toy).winners, winners_of(toy, {"b"}));
        const PropertyVerdict v = check_monotonicity(LeastApprovedRule(), toy);
        ASSERT_FALSE(v.holds);
        EXPECT_EQ(v.witness->voter, 1U);
        EXPECT_EQ(v.witness->round, RoundIndex{0});
        EXPECT_EQ(v.witness->deviation.approvals[0], set_of(toy.round(0), {"a", "b"}));
        EXPECT_EQ(v.witness->deviated.winners, winners_of(toy, {"a"}));
}

TEST(Oiia, IrrelevantDictatorWitness) {
        const Instance inst = fixture("irrelevant_dictator").instance;
        EXPECT_EQ(run(IrrelevantDictatorRule(), inst).winners, winners_of(inst, {"c"}));
        EXPECT_FALSE(check_oiia(IrrelevantDictatorRule(), inst).holds);
        // The table's own edit: dropping b moves the winner from c to a.
        const Instance dropped = with_ballot(inst, 0, 0, set_of(inst.round(0), {"a", "c"}));
        EXPECT_EQ(run(IrrelevantDictatorRule(), dropped).winners, winners_of(inst, {"a"}));
        // Still SP and OSP on it.
        EXPECT_TRUE(find_sp_violation(IrrelevantDictatorRule(), inst).holds);
        EXPECT_TRUE(check_osp(IrrelevantDictatorRule(), inst).holds);
}

TEST(OiiaAddition, IrrelevantDictatorCanViolate) {
        // v1 declares {a,b}: winner a; adding c yields c, which is allowed. Declaring {b,c}: winner b;
        // adding a yields c, which is neither b nor a.
        const Instance inst(1, {round_of({"a", "b", "c"}, {{"b", "c"}})});
        const PropertyVerdict v = check_oiia_addition_lemma(IrrelevantDictatorRule(), inst);
        ASSERT_FALSE(v.holds);
        EXPECT_EQ(v.witness->deviated.winners, winners_of(inst, {"c"}));
        for (const Instance& r : random_batch(100, 4, 3, 4, 151))
                for (const WamRule& w : wam_catalog())
                        EXPECT_TRUE(check_oiia_addition_lemma(w, r).holds) << w.name();
}

TEST(Osp, FixturesSingleVoterAndToyRule) {
        EXPECT_TRUE(check_osp(WamRule::greedy_jr(), fixture("greedyjr_nonSP").instance).holds);
        EXPECT_TRUE(check_osp(MesRule(), fixture("mes_nonSP").instance).holds);
        EXPECT_TRUE(check_osp(PhragmenRule(), fixture("pp_nonSP").instance).holds);
        for (const Instance& inst : random_batch(30, 1, 4, 4, 161))
                for (const AnyRule& rule : builtin_rules())
                        EXPECT_TRUE(check_osp(rule, inst).holds) << rule.name();

        // Anti-plurality picks the unapproved c; v1 declares {b,c} instead of {a}, leaving a least approved.
        const Instance toy(3, {round_of({"a", "b", "c"}, {{"a"}, {"b"}, {"a", "b"}})});
        EXPECT_EQ(run(AntiPluralityRule(), toy).winners, winners_of(toy, {"c"}));
        const PropertyVerdict v = check_osp(AntiPluralityRule(), toy);
        ASSERT_FALSE(v.holds);
        EXPECT_EQ(v.witness->truthful_satisfaction, 0);
        EXPECT_EQ(v.witness->deviated_satisfaction, 1);
}

TEST(Osp, PrefixDeviationIsAStrictlyLargerSpace) {
        // PP: the round-1 lie that pays off later is invisible to round-t-only OSP.
        const Fixture f = fixture("pp_nonSP");
        EXPECT_TRUE(check_osp(PhragmenRule(), f.instance).holds);
        const PropertyVerdict prefix = check_prefix_osp(PhragmenRule(), f.instance);
        ASSERT_FALSE(prefix.holds);
        EXPECT_EQ(prefix.witness->round, RoundIndex{1});
        EXPECT_EQ(prefix.witness->deviated_satisfaction, 1);

        const std::vector<AnyRule> rules{WamRule::greedy_jr(), MesRule(), PhragmenRule(), TsdRule(), IrrelevantDictatorRule()};
        for (const Instance& inst : random_batch(80, 3, 3, 3, 171))
                for (const AnyRule& rule : rules)
                        if (check_prefix_osp(rule, inst).holds) {
                                EXPECT_TRUE(check_osp(rule, inst).holds) << rule.name();
                        }
        const Instance toy(3, {round_of({"a", "b", "c"}, {{"a"}, {"b"}, {"a", "b"}})});
        EXPECT_FALSE(check_prefix_osp(AntiPluralityRule(), toy).holds);
}

TEST(CheckersProperty, MatchFromScratchOracles) {
        const std::vector<AnyRule> rules = builtin_rules();
        for (const Instance& inst : random_batch(120, 4, 3, 4, 181)) {
                for (const AnyRule& rule : rules) {
                        ASSERT_EQ(check_oiia(rule, inst).holds, oiia_oracle(rule, inst)) << rule.name();
                        ASSERT_EQ(check_osp(rule, inst).holds, osp_oracle(rule, inst)) << rule.name();
                        ASSERT_EQ(check_monotonicity(rule, inst).holds, monotonicity_oracle(rule, inst)) << rule.name();
                }
                ASSERT_EQ(check_osp(AntiPluralityRule(), inst).holds, osp_oracle(AntiPluralityRule(), inst));
                ASSERT_EQ(check_monotonicity(LeastApprovedRule(), inst).holds, monotonicity_oracle(LeastApprovedRule(), inst));
        }
}

TEST(VerifyImplications, Batches) {
        const std::vector<Instance> batch = random_batch(150, 4, 4, 4, 191);
        for (const AnyRule& rule : builtin_rules()) {
                if (rule.name() == "irrelevant-dictator")
                        continue;
                const ImplicationSummary s = verify_implications(rule, batch);
                EXPECT_EQ(s.instances, batch.size());
                EXPECT_TRUE(s.counterexamples.empty()) << rule.name();
        }
        const ImplicationSummary id = verify_implications(IrrelevantDictatorRule(), batch);
        EXPECT_TRUE(id.counterexamples.empty());
        EXPECT_EQ(id.osp_holds, batch.size());
        EXPECT_LT(id.oiia_holds, batch.size());

        const ImplicationSummary empty = verify_implications(TsdRule(), std::span<const Instance>{});
        EXPECT_EQ(empty.instances, 0U);
        EXPECT_TRUE(empty.counterexamples.empty());
}
