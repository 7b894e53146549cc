#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"

namespace tempvote {

/// Winning group of a Phragmen round and the load each member ends up with.
struct GroupChoice {
        VoterGroup group;
        Rational load;

        friend bool operator==(const GroupChoice&, const GroupChoice&) = default;
};

enum class PhragmenSolver { fast, oracle };

struct PhragmenState {
        std::vector<Rational> loads;
        PhragmenSolver solver = PhragmenSolver::fast;
        std::size_t group_cap = kDefaultGroupCap;

        Winner step(const RoundSpec& round);
        [[nodiscard]] const std::vector<Rational>& values() const { return loads; }
};

namespace detail {

inline Rational potential_load(const std::vector<Rational>& loads, VoterGroup g) {
        Rational sum(1);
        for (VoterId v : g.members())
                sum += loads[v];
        return sum / Rational(static_cast<Rational::int_type>(g.size()));
}

} // namespace detail

/*
 * Exhaustive reference: every group whose round approvals share an
 * alternative, in lexicographic order; keeps the first group with the
 * smallest average potential load (1 + sum of loads) / |S|.
 */
inline GroupChoice phragmen_best_group_oracle(const PhragmenState& state, const RoundSpec& round,
                                              std::size_t cap = kDefaultGroupCap) {
        const std::size_t n = state.loads.size();
        require_group_cap(n, cap);
        std::optional<GroupChoice> best;
        auto recurse = [&](auto&& self, VoterGroup g, ApprovalSet inter, Rational load_sum, VoterId next) -> void {
                for (VoterId v = next; v < n; ++v) {
                        ApprovalSet cur = inter & round.approvals[v];
                        if (cur.empty())
                                continue; // every superset is empty as well
                        VoterGroup h = g.with(v);
                        Rational sum = load_sum + state.loads[v];
                        Rational value = (Rational(1) + sum) / Rational(static_cast<Rational::int_type>(h.size()));
                        if (!best || value < best->load)
                                best = GroupChoice{h, value};
                        self(self, h, cur, sum, v + 1);
                }
        };
        recurse(recurse, VoterGroup{}, ApprovalSet::all(round.alternative_count()), Rational(0), 0);
        if (!best)
                throw InvalidInstance("Phragmen round without any cohesive group");
        return *best;
}

/*
 * Polynomial solver. For a fixed alternative c the best group of size k is
 * the k approvers of c with the smallest loads, so the optimum value v* is
 * the minimum over c of the best prefix average. Among all groups attaining
 * v* inside the approvers of c, writing w_i = load_i - v*, a group attains
 * v* iff its w-sum is exactly -1; since no group does better, those are
 * exactly {w < 0} plus any subset of {w = 0}. The lexicographically first of
 * them adds the zero-slack approvers below the largest strictly-under voter.
 */
inline GroupChoice phragmen_best_group_fast(const PhragmenState& state, const RoundSpec& round) {
        const std::size_t n = state.loads.size();
        const std::size_t m = round.alternative_count();
        std::vector<std::vector<VoterId>> approvers(m);
        for (VoterId v = 0; v < n; ++v)
                for (AltIndex c : round.approvals[v].members())
                        approvers[c].push_back(v);

        std::optional<Rational> optimum;
        for (AltIndex c = 0; c < m; ++c) {
                auto& a = approvers[c];
                std::stable_sort(a.begin(), a.end(), [&](VoterId x, VoterId y) { return state.loads[x] < state.loads[y]; });
                Rational prefix(1);
                for (std::size_t k = 0; k < a.size(); ++k) {
                        prefix += state.loads[a[k]];
                        Rational value = prefix / Rational(static_cast<Rational::int_type>(k + 1));
                        if (!optimum || value < *optimum)
                                optimum = value;
                }
        }
        if (!optimum)
                throw InvalidInstance("Phragmen round without any cohesive group");

        std::optional<VoterGroup> best;
        for (AltIndex c = 0; c < m; ++c) {
                std::uint64_t under = 0, tight = 0;
                Rational under_sum(0);
                for (VoterId v : approvers[c]) {
                        if (state.loads[v] < *optimum) {
                                under |= std::uint64_t{1} << v;
                                under_sum += state.loads[v] - *optimum;
                        } else if (state.loads[v] == *optimum) {
                                tight |= std::uint64_t{1} << v;
                        }
                }
                if (under == 0 || under_sum != Rational(-1))
                        continue;
                const VoterGroup strict(under);
                const std::uint64_t below_last = (std::uint64_t{1} << strict.last()) - 1;
                const VoterGroup candidate(under | (tight & below_last));
                if (!best || lex_less(candidate, *best))
                        best = candidate;
        }
        return GroupChoice{*best, *optimum};
}

inline Winner PhragmenState::step(const RoundSpec& round) {
        GroupChoice choice = solver == PhragmenSolver::oracle ? phragmen_best_group_oracle(*this, round, group_cap)
                                                              : phragmen_best_group_fast(*this, round);
        ApprovalSet inter = ApprovalSet::all(round.alternative_count());
        for (VoterId v : choice.group.members()) {
                inter = inter & round.approvals[v];
                loads[v] = choice.load;
        }
        return inter.first();
}

inline std::pair<AltIndex, PhragmenState> phragmen_step(PhragmenState state, const RoundSpec& round) {
        Winner w = state.step(round);
        return {*w, std::move(state)};
}

/// Perpetual Phragmen: sequential load balancing over cohesive groups.
class PhragmenRule {
public:
        explicit PhragmenRule(PhragmenSolver solver = PhragmenSolver::fast, std::size_t group_cap = kDefaultGroupCap)
            : solver_(solver), group_cap_(group_cap) {}

        [[nodiscard]] PhragmenSolver solver() const { return solver_; }
        [[nodiscard]] std::size_t group_cap() const { return group_cap_; }
        [[nodiscard]] std::string name() const { return solver_ == PhragmenSolver::oracle ? "phragmen-oracle" : "phragmen"; }

        [[nodiscard]] PhragmenState start(std::size_t n, std::size_t /*horizon*/) const {
                if (solver_ == PhragmenSolver::oracle)
                        require_group_cap(n, group_cap_);
                return PhragmenState{std::vector<Rational>(n, Rational(0)), solver_, group_cap_};
        }

private:
        PhragmenSolver solver_;
        std::size_t group_cap_;
};

} // namespace tempvote
