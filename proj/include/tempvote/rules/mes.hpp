#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"

namespace tempvote {

/*
 * Least rho with sum_i min(b_i, rho) >= price, by water-filling over the
 * budgets in ascending order. nullopt when the approvers cannot afford the
 * price at all (sum of budgets < price, or nobody approves).
 */
inline std::optional<Rational> minimal_rho(std::span<const Rational> budgets, const Rational& price) {
        if (budgets.empty())
                return std::nullopt;
        std::vector<Rational> sorted(budgets.begin(), budgets.end());
        std::sort(sorted.begin(), sorted.end());
        Rational paid_in_full(0); // budgets strictly below the current level are spent completely
        const auto k = static_cast<Rational::int_type>(sorted.size());
        for (Rational::int_type j = 0; j < k; ++j) {
                const Rational& b = sorted[static_cast<std::size_t>(j)];
                const Rational remaining_payers(k - j);
                if (paid_in_full + remaining_payers * b >= price)
                        return (price - paid_in_full) / remaining_payers;
                paid_in_full += b;
        }
        return std::nullopt;
}

struct MesState {
        std::vector<Rational> budgets;
        Rational price;
        bool terminated = false;

        Winner step(const RoundSpec& round) {
                if (terminated)
                        return std::nullopt;
                std::optional<AltIndex> best;
                Rational best_rho;
                std::vector<Rational> approver_budgets;
                for (AltIndex c = 0; c < round.alternative_count(); ++c) {
                        approver_budgets.clear();
                        for (VoterId v = 0; v < budgets.size(); ++v)
                                if (round.approvals[v].contains(c))
                                        approver_budgets.push_back(budgets[v]);
                        auto rho = minimal_rho(approver_budgets, price);
                        if (rho && (!best || *rho < best_rho)) {
                                best = c;
                                best_rho = *rho;
                        }
                }
                if (!best) {
                        terminated = true; // no completion procedure: every later round is ABSENT as well
                        return std::nullopt;
                }
                for (VoterId v = 0; v < budgets.size(); ++v)
                        if (round.approvals[v].contains(*best))
                                budgets[v] -= min(budgets[v], best_rho);
                return best;
        }

        [[nodiscard]] const std::vector<Rational>& values() const { return budgets; }
};

inline std::pair<Winner, MesState> mes_step(MesState state, const RoundSpec& round) {
        Winner w = state.step(round);
        return {w, std::move(state)};
}

/// Method of Equal Shares with a fixed price n/T and no completion procedure.
/// Semi-online: the horizon is part of the rule. Without an explicit horizon
/// the rule binds to the horizon of whatever instance it is started on.
class MesRule {
public:
        MesRule() = default;
        explicit MesRule(std::size_t horizon) : horizon_(horizon) {}

        [[nodiscard]] std::optional<std::size_t> horizon() const { return horizon_; }
        [[nodiscard]] std::string name() const { return "mes"; }

        [[nodiscard]] MesState start(std::size_t n, std::size_t horizon) const {
                if (horizon_ && *horizon_ != horizon)
                        throw HorizonMismatch("MES built for T=" + std::to_string(*horizon_) + " started on an instance with T=" +
                                              std::to_string(horizon));
                if (horizon == 0)
                        throw HorizonMismatch("MES needs a positive horizon");
                return MesState{std::vector<Rational>(n, Rational(1)),
                                Rational(static_cast<Rational::int_type>(n), static_cast<Rational::int_type>(horizon)), false};
        }

private:
        std::optional<std::size_t> horizon_;
};

} // namespace tempvote
