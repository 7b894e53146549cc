#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"

namespace tempvote {

/// x -> slope * x + offset
struct AffineMap {
        Rational slope{1};
        Rational offset{0};

        [[nodiscard]] Rational operator()(const Rational& x) const { return slope * x + offset; }

        static AffineMap identity() { return {Rational(1), Rational(0)}; }
        static AffineMap constant(Rational c) { return {Rational(0), c}; }
        static AffineMap shift(Rational d) { return {Rational(1), d}; }

        friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

struct WamState {
        std::vector<Rational> weights;
        AffineMap winner_update; // f, applied to approvers of the winner
        AffineMap other_update;  // g, applied to everyone else

        Winner step(const RoundSpec& round);
        [[nodiscard]] const std::vector<Rational>& values() const { return weights; }
};

/// Score of alternative c: sum of max(0, weight) over voters approving c.
inline Rational wam_score(const WamState& state, const RoundSpec& round, AltIndex c) {
        if (c >= round.alternative_count())
                throw std::out_of_range("unknown alternative index " + std::to_string(c));
        Rational score(0);
        for (VoterId v = 0; v < round.approvals.size(); ++v)
                if (round.approvals[v].contains(c) && state.weights[v] > Rational(0))
                        score += state.weights[v];
        return score;
}

inline Winner WamState::step(const RoundSpec& round) {
        AltIndex best = 0;
        Rational best_score = wam_score(*this, round, 0);
        for (AltIndex c = 1; c < round.alternative_count(); ++c) {
                Rational s = wam_score(*this, round, c);
                if (s > best_score) {
                        best = c;
                        best_score = s;
                }
        }
        for (VoterId v = 0; v < weights.size(); ++v)
                weights[v] = round.approvals[v].contains(best) ? winner_update(weights[v]) : other_update(weights[v]);
        return best;
}

inline std::pair<AltIndex, WamState> wam_step(WamState state, const RoundSpec& round) {
        Winner w = state.step(round);
        return {*w, std::move(state)};
}

/// Weighted approval method: argmax of clamped weight sums, then f on the
/// winner's approvers and g on the rest.
class WamRule {
public:
        WamRule(std::string name, AffineMap f, AffineMap g, Rational initial = Rational(1))
            : name_(std::move(name)), f_(f), g_(g), uniform_initial_(initial) {
                validate();
        }
        WamRule(std::string name, AffineMap f, AffineMap g, std::vector<Rational> initial)
            : name_(std::move(name)), f_(f), g_(g), per_voter_initial_(std::move(initial)) {
                validate();
        }

        static WamRule approval_voting() { return {"av", AffineMap::identity(), AffineMap::identity()}; }
        static WamRule greedy_jr() { return {"greedyjr", AffineMap::constant(Rational(0)), AffineMap::identity()}; }
        static WamRule unit_gain() { return {"unit-gain", AffineMap::shift(Rational(-1)), AffineMap::shift(Rational(1))}; }
        static WamRule reset_grow() {
                return {"reset-grow", AffineMap::constant(Rational(0)), AffineMap::shift(Rational(1))};
        }

        [[nodiscard]] const std::string& name() const { return name_; }
        [[nodiscard]] const AffineMap& winner_update() const { return f_; }
        [[nodiscard]] const AffineMap& other_update() const { return g_; }
        [[nodiscard]] const Rational& uniform_initial() const { return uniform_initial_; }
        [[nodiscard]] const std::vector<Rational>& per_voter_initial() const { return per_voter_initial_; }

        [[nodiscard]] WamState start(std::size_t n, std::size_t /*horizon*/) const {
                WamState s{{}, f_, g_};
                if (per_voter_initial_.empty()) {
                        s.weights.assign(n, uniform_initial_);
                } else {
                        if (per_voter_initial_.size() != n)
                                throw std::invalid_argument("WAM '" + name_ + "': " + std::to_string(per_voter_initial_.size()) +
                                                            " initial weights for " + std::to_string(n) + " voters");
                        s.weights = per_voter_initial_;
                }
                return s;
        }

        /// f(x) <= x and g(x) >= x at every weight reachable within `depth` updates of an initial weight.
        [[nodiscard]] bool updates_valid_from(const Rational& initial, int depth) const {
                std::set<Rational> frontier{initial}, seen{initial};
                for (int d = 0; d <= depth && !frontier.empty(); ++d) {
                        std::set<Rational> next;
                        for (const Rational& x : frontier) {
                                Rational fx = f_(x), gx = g_(x);
                                if (fx > x || gx < x)
                                        return false;
                                if (seen.size() < 4096) {
                                        if (seen.insert(fx).second)
                                                next.insert(fx);
                                        if (seen.insert(gx).second)
                                                next.insert(gx);
                                }
                        }
                        frontier = std::move(next);
                }
                return true;
        }

private:
        void validate() const {
                constexpr int kDepth = 12;
                auto check = [&](const Rational& w) {
                        if (!updates_valid_from(w, kDepth))
                                throw std::invalid_argument("WAM '" + name_ +
                                                            "': update functions violate f(x) <= x or g(x) >= x on reachable weights");
                };
                if (per_voter_initial_.empty())
                        check(uniform_initial_);
                for (const Rational& w : per_voter_initial_)
                        check(w);
        }

        std::string name_;
        AffineMap f_;
        AffineMap g_;
        Rational uniform_initial_{1};
        std::vector<Rational> per_voter_initial_;
};

/// The built-in WAM presets.
inline std::vector<WamRule> wam_catalog() {
        return {WamRule::approval_voting(), WamRule::greedy_jr(), WamRule::unit_gain(), WamRule::reset_grow()};
}

} // namespace tempvote
