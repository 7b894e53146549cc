#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempvote/model.hpp"
#include "tempvote/rule.hpp"

namespace tempvote {

enum class Property { SP, OSP, PrefixOSP, OIIA, OIIAAddition, Monotonicity };

inline std::string property_name(Property p) {
        switch (p) {
        case Property::SP: return "sp";
        case Property::OSP: return "osp";
        case Property::PrefixOSP: return "prefix-osp";
        case Property::OIIA: return "oiia";
        case Property::OIIAAddition: return "oiia-addition";
        case Property::Monotonicity: return "monotonicity";
        }
        return "?";
}

inline Property parse_property(const std::string& s) {
        for (Property p : {Property::SP, Property::OSP, Property::PrefixOSP, Property::OIIA, Property::OIIAAddition,
                           Property::Monotonicity})
                if (property_name(p) == s)
                        return p;
        throw std::invalid_argument("unknown property '" + s + "'");
}

inline constexpr std::size_t kDefaultStrategyCap = 1'000'000;

struct Caps {
        std::size_t groups = kDefaultGroupCap;
        std::size_t strategies = kDefaultStrategyCap;
};

/*
 * A replayable deviation by one voter. The deviation covers rounds
 * [0, round_count); both outcome sequences cover the same rounds.
 * Satisfactions are measured against the voter's truthful ballots: over
 * `round` alone when set, otherwise over the whole covered horizon.
 */
struct ManipulationFinding {
        VoterId voter = 0;
        std::optional<RoundIndex> round;
        Deviation deviation;
        OutcomeSequence truthful;
        OutcomeSequence deviated;
        int truthful_satisfaction = 0;
        int deviated_satisfaction = 0;

        friend bool operator==(const ManipulationFinding&, const ManipulationFinding&) = default;
};

struct PropertyVerdict {
        Property property = Property::SP;
        bool holds = true;
        std::optional<ManipulationFinding> witness; // set iff !holds
        bool exhaustive = true;                     // the whole candidate space was searched
        std::size_t candidates = 0;                 // deviations evaluated
};

/// Number of full-horizon ballot tuples: prod over rounds of (2^|C_t| - 1), saturating.
inline std::size_t strategy_space_size(const Instance& instance, std::size_t rounds) {
        std::size_t total = 1;
        for (RoundIndex t = 0; t < rounds; ++t) {
                const std::size_t k = instance.rounds()[t].alternative_count();
                const std::size_t options = k >= 63 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << k) - 1;
                if (options != 0 && total > std::numeric_limits<std::size_t>::max() / options)
                        return std::numeric_limits<std::size_t>::max();
                total *= options;
        }
        return total;
}

inline std::size_t strategy_space_size(const Instance& instance) {
        return strategy_space_size(instance, instance.horizon());
}

namespace detail {

inline int voter_sat(const Instance& instance, VoterId v, const OutcomeSequence& outcomes, RoundIndex t) {
        const Winner& w = outcomes[t];
        return w && instance.rounds()[t].approvals[v].contains(*w) ? 1 : 0;
}

inline int voter_sat_total(const Instance& instance, VoterId v, const OutcomeSequence& outcomes) {
        int s = 0;
        for (RoundIndex t = 0; t < outcomes.size(); ++t)
                s += voter_sat(instance, v, outcomes, t);
        return s;
}

/// Rule states before each round of the truthful run, plus the truthful outcomes.
template <OnlineRule R>
struct TruthfulRun {
        std::vector<state_of<R>> before;
        OutcomeSequence outcomes;

        TruthfulRun(const R& rule, const Instance& instance) {
                auto s = rule.start(instance.voters(), instance.horizon());
                for (const RoundSpec& r : instance.rounds()) {
                        before.push_back(s);
                        outcomes.winners.push_back(s.step(r));
                }
        }
};

inline std::vector<ApprovalSet> truthful_ballots(const Instance& instance, VoterId v, std::size_t rounds) {
        std::vector<ApprovalSet> out;
        for (RoundIndex t = 0; t < rounds; ++t)
                out.push_back(instance.rounds()[t].approvals[v]);
        return out;
}

inline bool voters_in_range(const Instance& instance, std::optional<VoterId> only) {
        return !only || *only < instance.voters();
}

} // namespace detail

/// Recomputes a finding from scratch: both runs, both satisfactions.
template <OnlineRule R>
ManipulationFinding replay(const R& rule, const Instance& instance, const ManipulationFinding& f) {
        const std::size_t len = f.deviation.approvals.size();
        ManipulationFinding out = f;
        out.truthful = run_prefix(rule, instance, len);
        out.deviated = run_prefix(rule, with_deviation(instance, f.deviation), len);
        if (f.round) {
                out.truthful_satisfaction = detail::voter_sat(instance, f.voter, out.truthful, *f.round);
                out.deviated_satisfaction = detail::voter_sat(instance, f.voter, out.deviated, *f.round);
        } else {
                out.truthful_satisfaction = detail::voter_sat_total(instance, f.voter, out.truthful);
                out.deviated_satisfaction = detail::voter_sat_total(instance, f.voter, out.deviated);
        }
        return out;
}

/// Full-horizon evaluation of a given deviation (replayable input from a file).
template <OnlineRule R>
ManipulationFinding evaluate_deviation(const R& rule, const Instance& instance, Deviation dev) {
        if (dev.approvals.size() != instance.horizon())
                throw InvalidInstance("deviation must cover every round");
        ManipulationFinding f{dev.voter, std::nullopt, std::move(dev), {}, {}, 0, 0};
        return replay(rule, instance, f);
}

namespace detail {

/// Single-ballot edits at one round: remove (OIIA), add (addition lemma), add the winner (monotonicity).
template <OnlineRule R, class Edits, class Violates>
PropertyVerdict check_single_edits(const R& rule, const Instance& instance, Property property, Edits&& edits,
                                   Violates&& violates) {
        PropertyVerdict verdict{property, true, std::nullopt, true, 0};
        const detail::TruthfulRun<R> truth(rule, instance);
        for (VoterId v = 0; v < instance.voters(); ++v) {
                for (RoundIndex t = 0; t < instance.horizon(); ++t) {
                        const RoundSpec& round = instance.rounds()[t];
                        const Winner w = truth.outcomes[t];
                        RoundSpec edited = round;
                        for (ApprovalSet ballot : edits(round.approvals[v], w, round.alternative_count())) {
                                ++verdict.candidates;
                                edited.approvals[v] = ballot;
                                auto s = truth.before[t];
                                const Winner w2 = s.step(edited);
                                if (!violates(round.approvals[v], ballot, w, w2))
                                        continue;
                                Deviation dev{v, truthful_ballots(instance, v, t + 1)};
                                dev.approvals[t] = ballot;
                                ManipulationFinding f{v, t, std::move(dev), {}, {}, 0, 0};
                                verdict.holds = false;
                                verdict.exhaustive = false;
                                verdict.witness = replay(rule, instance, f);
                                return verdict;
                        }
                }
        }
        return verdict;
}

} // namespace detail

/// Adding the round winner to any voter's ballot must keep the winner.
template <OnlineRule R>
PropertyVerdict check_monotonicity(const R& rule, const Instance& instance) {
        return detail::check_single_edits(
            rule, instance, Property::Monotonicity,
            [](ApprovalSet ballot, Winner w, std::size_t) {
                    std::vector<ApprovalSet> out;
                    if (w && !ballot.contains(*w))
                            out.push_back(ballot.with(*w));
                    return out;
            },
            [](ApprovalSet, ApprovalSet, Winner w, Winner w2) { return w2 != w; });
}

/// Removing a non-winning alternative from one ballot must keep the winner.
template <OnlineRule R>
PropertyVerdict check_oiia(const R& rule, const Instance& instance) {
        return detail::check_single_edits(
            rule, instance, Property::OIIA,
            [](ApprovalSet ballot, Winner w, std::size_t) {
                    std::vector<ApprovalSet> out;
                    if (ballot.size() < 2)
                            return out;
                    for (AltIndex d : ballot.members())
                            if (!w || d != *w)
                                    out.push_back(ballot.without(d));
                    return out;
            },
            [](ApprovalSet, ApprovalSet, Winner w, Winner w2) { return w2 != w; });
}

/// Adding an unapproved d may only change the winner to d.
template <OnlineRule R>
PropertyVerdict check_oiia_addition_lemma(const R& rule, const Instance& instance) {
        return detail::check_single_edits(
            rule, instance, Property::OIIAAddition,
            [](ApprovalSet ballot, Winner, std::size_t alternatives) {
                    std::vector<ApprovalSet> out;
                    for (AltIndex d = 0; d < alternatives; ++d)
                            if (!ballot.contains(d))
                                    out.push_back(ballot.with(d));
                    return out;
            },
            [](ApprovalSet before, ApprovalSet after, Winner w, Winner w2) {
                    const AltIndex added = ApprovalSet(after.bits() & ~before.bits()).first();
                    return w2 != w && w2 != Winner(added);
            });
}

/*
 * Online strategyproofness: earlier rounds stay truthful, the voter swaps its
 * round-t ballot for any other non-empty set; the round-t winner must not move
 * to one the voter truthfully approves unless it already was one.
 */
template <OnlineRule R>
PropertyVerdict check_osp(const R& rule, const Instance& instance) {
        PropertyVerdict verdict{Property::OSP, true, std::nullopt, true, 0};
        const detail::TruthfulRun<R> truth(rule, instance);
        for (VoterId v = 0; v < instance.voters(); ++v) {
                for (RoundIndex t = 0; t < instance.horizon(); ++t) {
                        const RoundSpec& round = instance.rounds()[t];
                        const ApprovalSet honest = round.approvals[v];
                        const int base = detail::voter_sat(instance, v, truth.outcomes, t);
                        RoundSpec edited = round;
                        const std::uint64_t limit = ApprovalSet::all(round.alternative_count()).bits();
                        for (std::uint64_t mask = 1; mask <= limit; ++mask) {
                                ++verdict.candidates;
                                if (mask == honest.bits())
                                        continue;
                                edited.approvals[v] = ApprovalSet(mask);
                                auto s = truth.before[t];
                                const Winner w2 = s.step(edited);
                                const int gained = w2 && honest.contains(*w2) ? 1 : 0;
                                if (gained <= base)
                                        continue;
                                Deviation dev{v, detail::truthful_ballots(instance, v, t + 1)};
                                dev.approvals[t] = ApprovalSet(mask);
                                verdict.holds = false;
                                verdict.exhaustive = false;
                                verdict.witness = replay(rule, instance, ManipulationFinding{v, t, std::move(dev), {}, {}, 0, 0});
                                return verdict;
                        }
                }
        }
        return verdict;
}

namespace detail {

/*
 * Depth-first walk over ballot tuples of one voter for rounds [0, depth_limit),
 * round 0 most significant, each round's sets in increasing bitmask order
 * (bit i = i-th declared alternative). on_node(t, ballots, state_after, winner)
 * is called for every prefix; it returns false to stop the walk.
 */
template <OnlineRule R, class OnNode>
bool walk_ballots(const R& rule, const Instance& instance, VoterId v, std::size_t depth_limit, OnNode&& on_node) {
        std::vector<ApprovalSet> ballots(depth_limit);
        std::vector<RoundSpec> edited(instance.rounds().begin(),
                                      instance.rounds().begin() + static_cast<std::ptrdiff_t>(depth_limit));
        auto recurse = [&](auto&& self, RoundIndex t, const state_of<R>& before) -> bool {
                const std::uint64_t limit = ApprovalSet::all(edited[t].alternative_count()).bits();
                for (std::uint64_t mask = 1; mask <= limit; ++mask) {
                        ballots[t] = ApprovalSet(mask);
                        edited[t].approvals[v] = ballots[t];
                        auto s = before;
                        const Winner w = s.step(edited[t]);
                        if (!on_node(t, std::span<const ApprovalSet>(ballots.data(), t + 1), w))
                                return false;
                        if (t + 1 < depth_limit && !self(self, t + 1, s))
                                return false;
                }
                return true;
        };
        return recurse(recurse, 0, rule.start(instance.voters(), instance.horizon()));
}

inline void require_strategy_cap(std::size_t size, const Caps& caps) {
        if (size > caps.strategies)
                throw CapExceeded("strategy space", size, caps.strategies);
}

} // namespace detail

/*
 * OSP with the whole prefix deviating (a strictly larger space than check_osp):
 * any ballots for rounds 1..t, judged by round-t satisfaction.
 */
template <OnlineRule R>
PropertyVerdict check_prefix_osp(const R& rule, const Instance& instance, const Caps& caps = {}) {
        detail::require_strategy_cap(strategy_space_size(instance), caps);
        PropertyVerdict verdict{Property::PrefixOSP, true, std::nullopt, true, 0};
        const OutcomeSequence truth = run(rule, instance);
        for (VoterId v = 0; v < instance.voters() && verdict.holds; ++v) {
                std::vector<bool> differs(instance.horizon() + 1, false);
                detail::walk_ballots(rule, instance, v, instance.horizon(),
                                     [&](RoundIndex t, std::span<const ApprovalSet> ballots, Winner w) {
                                             ++verdict.candidates;
                                             const ApprovalSet honest = instance.rounds()[t].approvals[v];
                                             differs[t + 1] = differs[t] || ballots[t] != honest;
                                             if (!differs[t + 1])
                                                     return true;
                                             const int base = detail::voter_sat(instance, v, truth, t);
                                             const int gained = w && honest.contains(*w) ? 1 : 0;
                                             if (gained <= base)
                                                     return true;
                                             Deviation dev{v, std::vector<ApprovalSet>(ballots.begin(), ballots.end())};
                                             verdict.holds = false;
                                             verdict.exhaustive = false;
                                             verdict.witness =
                                                 replay(rule, instance, ManipulationFinding{v, t, std::move(dev), {}, {}, 0, 0});
                                             return false;
                                     });
        }
        return verdict;
}

/*
 * Visits every strictly improving full-horizon deviation of the selected
 * voters (all voters when `only` is empty) in canonical order: voter index,
 * then ballot enumeration order. on_finding returns false to stop. Returns
 * the number of candidate tuples visited.
 */
template <OnlineRule R, class OnFinding>
std::size_t for_each_sp_violation(const R& rule, const Instance& instance, const Caps& caps, std::optional<VoterId> only,
                                  OnFinding&& on_finding, bool& stopped) {
        if (!detail::voters_in_range(instance, only))
                throw std::out_of_range("voter out of range");
        detail::require_strategy_cap(strategy_space_size(instance), caps);
        const std::size_t T = instance.horizon();
        const OutcomeSequence truth = run(rule, instance);
        std::size_t visited = 0;
        stopped = false;
        for (VoterId v = 0; v < instance.voters() && !stopped; ++v) {
                if (only && *only != v)
                        continue;
                const int base = detail::voter_sat_total(instance, v, truth);
                std::vector<int> sat_prefix(T + 1, 0);
                std::vector<bool> differs(T + 1, false);
                std::vector<Winner> winners(T);
                const bool completed = detail::walk_ballots(
                    rule, instance, v, T, [&](RoundIndex t, std::span<const ApprovalSet> ballots, Winner w) {
                            const ApprovalSet honest = instance.rounds()[t].approvals[v];
                            winners[t] = w;
                            sat_prefix[t + 1] = sat_prefix[t] + (w && honest.contains(*w) ? 1 : 0);
                            differs[t + 1] = differs[t] || ballots[t] != honest;
                            if (t + 1 < T)
                                    return true;
                            ++visited;
                            if (!differs[T] || sat_prefix[T] <= base)
                                    return true;
                            ManipulationFinding f{v,
                                                  std::nullopt,
                                                  Deviation{v, std::vector<ApprovalSet>(ballots.begin(), ballots.end())},
                                                  truth,
                                                  OutcomeSequence{winners},
                                                  base,
                                                  sat_prefix[T]};
                            return static_cast<bool>(on_finding(std::move(f)));
                    });
                stopped = !completed;
        }
        return visited;
}

/// First strictly improving full-horizon deviation in canonical order, or HOLDS.
template <OnlineRule R>
PropertyVerdict find_sp_violation(const R& rule, const Instance& instance, const Caps& caps = {},
                                  std::optional<VoterId> only = std::nullopt) {
        PropertyVerdict verdict{Property::SP, true, std::nullopt, true, 0};
        bool stopped = false;
        verdict.candidates = for_each_sp_violation(
            rule, instance, caps, only,
            [&](ManipulationFinding f) {
                    verdict.witness = std::move(f);
                    return false;
            },
            stopped);
        verdict.holds = !verdict.witness.has_value();
        verdict.exhaustive = !stopped;
        return verdict;
}

/// Every strictly improving full-horizon deviation, canonical order.
template <OnlineRule R>
std::vector<ManipulationFinding> all_sp_violations(const R& rule, const Instance& instance, const Caps& caps = {},
                                                   std::optional<VoterId> only = std::nullopt) {
        std::vector<ManipulationFinding> out;
        bool stopped = false;
        for_each_sp_violation(
            rule, instance, caps, only,
            [&](ManipulationFinding f) {
                    out.push_back(std::move(f));
                    return true;
            },
            stopped);
        return out;
}

template <OnlineRule R>
PropertyVerdict check_property(Property p, const R& rule, const Instance& instance, const Caps& caps = {}) {
        switch (p) {
        case Property::SP: return find_sp_violation(rule, instance, caps);
        case Property::OSP: return check_osp(rule, instance);
        case Property::PrefixOSP: return check_prefix_osp(rule, instance, caps);
        case Property::OIIA: return check_oiia(rule, instance);
        case Property::OIIAAddition: return check_oiia_addition_lemma(rule, instance);
        case Property::Monotonicity: return check_monotonicity(rule, instance);
        }
        throw std::invalid_argument("unknown property");
}

struct ImplicationCounterexample {
        std::size_t instance_index = 0;
        std::string relation; // "oiia=>osp" or "osp=>monotonicity"
};

struct ImplicationSummary {
        std::size_t instances = 0;
        std::size_t oiia_holds = 0;
        std::size_t osp_holds = 0;
        std::size_t monotone = 0;
        std::vector<ImplicationCounterexample> counterexamples;
};

/// Per instance: OIIA holds => OSP holds, and OSP holds => monotonicity holds.
template <OnlineRule R>
ImplicationSummary verify_implications(const R& rule, std::span<const Instance> batch) {
        ImplicationSummary s;
        for (std::size_t i = 0; i < batch.size(); ++i) {
                const bool oiia = check_oiia(rule, batch[i]).holds;
                const bool osp = check_osp(rule, batch[i]).holds;
                const bool mono = check_monotonicity(rule, batch[i]).holds;
                ++s.instances;
                s.oiia_holds += oiia ? 1 : 0;
                s.osp_holds += osp ? 1 : 0;
                s.monotone += mono ? 1 : 0;
                if (oiia && !osp)
                        s.counterexamples.push_back({i, "oiia=>osp"});
                if (osp && !mono)
                        s.counterexamples.push_back({i, "osp=>monotonicity"});
        }
        return s;
}

} // namespace tempvote
