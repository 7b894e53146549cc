#pragma once

#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"

namespace tempvote {

/// Choice function applied to the dictator's ballot.
enum class ChoiceFunction { first, last };

inline AltIndex choose(ChoiceFunction chi, ApprovalSet ballot) {
        return chi == ChoiceFunction::first ? ballot.first() : ballot.last();
}

struct TsdState {
        std::vector<VoterId> permutation;
        ChoiceFunction choice = ChoiceFunction::first;
        std::size_t round = 0;

        [[nodiscard]] VoterId dictator() const { return permutation[round % permutation.size()]; }

        Winner step(const RoundSpec& r) {
                AltIndex w = choose(choice, r.approvals[dictator()]);
                ++round;
                return w;
        }
        [[nodiscard]] std::vector<Rational> values() const { return {}; }
};

inline std::pair<AltIndex, TsdState> tsd_step(TsdState state, const RoundSpec& round) {
        Winner w = state.step(round);
        return {*w, std::move(state)};
}

/// Temporal serial dictator: round t is decided by voter permutation[t mod n].
class TsdRule {
public:
        TsdRule() = default;
        explicit TsdRule(std::vector<VoterId> permutation, ChoiceFunction choice = ChoiceFunction::first)
            : permutation_(std::move(permutation)), choice_(choice) {}

        [[nodiscard]] const std::vector<VoterId>& permutation() const { return permutation_; }
        [[nodiscard]] ChoiceFunction choice() const { return choice_; }
        [[nodiscard]] std::string name() const { return "tsd"; }

        [[nodiscard]] TsdState start(std::size_t n, std::size_t /*horizon*/) const {
                std::vector<VoterId> perm = permutation_;
                if (perm.empty()) {
                        perm.resize(n);
                        std::iota(perm.begin(), perm.end(), VoterId{0});
                }
                std::vector<bool> seen(n, false);
                if (perm.size() != n)
                        throw std::invalid_argument("TSD permutation has " + std::to_string(perm.size()) + " entries for " +
                                                    std::to_string(n) + " voters");
                for (VoterId v : perm) {
                        if (v >= n || seen[v])
                                throw std::invalid_argument("TSD permutation is not a permutation of the voters");
                        seen[v] = true;
                }
                return TsdState{std::move(perm), choice_, 0};
        }

private:
        std::vector<VoterId> permutation_;
        ChoiceFunction choice_ = ChoiceFunction::first;
};

/*
 * v1 dictates every round. Rounds with exactly three alternatives a, b, c
 * (declared order) use a fixed table instead of the first approved one:
 *   {a}->a {b}->b {c}->c {a,b}->a {a,c}->a {b,c}->b {a,b,c}->c
 */
inline AltIndex irrelevant_dictator_choice(const RoundSpec& round) {
        const ApprovalSet ballot = round.approvals.front();
        if (round.alternative_count() != 3)
                return ballot.first();
        static constexpr AltIndex table[8] = {0, /*{a}*/ 0, /*{b}*/ 1, /*{a,b}*/ 0,
                                              /*{c}*/ 2, /*{a,c}*/ 0, /*{b,c}*/ 1, /*{a,b,c}*/ 2};
        return table[ballot.bits()];
}

struct IrrelevantDictatorState {
        Winner step(const RoundSpec& round) { return irrelevant_dictator_choice(round); }
        [[nodiscard]] std::vector<Rational> values() const { return {}; }
};

inline AltIndex irrelevant_dictator_step(const IrrelevantDictatorState&, const RoundSpec& round) {
        return irrelevant_dictator_choice(round);
}

class IrrelevantDictatorRule {
public:
        [[nodiscard]] std::string name() const { return "irrelevant-dictator"; }
        [[nodiscard]] IrrelevantDictatorState start(std::size_t, std::size_t) const { return {}; }
};

} // namespace tempvote
