#pragma once

#include <concepts>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"
#include "tempvote/rules/dictator.hpp"
#include "tempvote/rules/mes.hpp"
#include "tempvote/rules/phragmen.hpp"
#include "tempvote/rules/wam.hpp"

namespace tempvote {

/// Per-rule evolving state: a copyable value whose step consumes one round.
template <class S>
concept RuleState = std::copyable<S> && requires(S s, const RoundSpec& r) {
        { s.step(r) } -> std::same_as<Winner>;
};

/// Anything that can start a RuleState for n voters over a horizon of T rounds.
template <class R>
concept OnlineRule = requires(const R& rule, std::size_t n, std::size_t horizon) {
        { rule.start(n, horizon) } -> RuleState;
};

template <OnlineRule R>
using state_of = std::remove_cvref_t<decltype(std::declval<const R&>().start(0, 0))>;

using AnyState = std::variant<WamState, MesState, PhragmenState, TsdState, IrrelevantDictatorState>;

/// Closed set of rules, selected by name in configs and on the command line.
class AnyRule {
public:
        using Variant = std::variant<WamRule, MesRule, PhragmenRule, TsdRule, IrrelevantDictatorRule>;

        template <class R>
                requires std::constructible_from<Variant, R>
        AnyRule(R rule) : rule_(std::move(rule)) {} // NOLINT(implicit)

        [[nodiscard]] const Variant& variant() const { return rule_; }
        [[nodiscard]] std::string name() const {
                return std::visit([](const auto& r) { return std::string(r.name()); }, rule_);
        }

        class State {
        public:
                explicit State(AnyState s) : state_(std::move(s)) {}
                Winner step(const RoundSpec& r) {
                        return std::visit([&](auto& s) { return s.step(r); }, state_);
                }
                /// Weights, budgets or loads; empty for rules without numeric state.
                [[nodiscard]] std::vector<Rational> values() const {
                        return std::visit([](const auto& s) { return std::vector<Rational>(s.values()); }, state_);
                }
                [[nodiscard]] const AnyState& variant() const { return state_; }

        private:
                AnyState state_;
        };

        [[nodiscard]] State start(std::size_t n, std::size_t horizon) const {
                return std::visit([&](const auto& r) { return State(AnyState(r.start(n, horizon))); }, rule_);
        }

private:
        Variant rule_;
};

/// Name of the vector exposed by State::values() for a rule.
inline std::string state_label(const AnyRule& rule) {
        return std::visit(
            [](const auto& r) -> std::string {
                    using R = std::remove_cvref_t<decltype(r)>;
                    if constexpr (std::is_same_v<R, WamRule>)
                            return "weights";
                    else if constexpr (std::is_same_v<R, MesRule>)
                            return "budgets";
                    else if constexpr (std::is_same_v<R, PhragmenRule>)
                            return "loads";
                    else
                            return "";
            },
            rule.variant());
}

/// Outcomes of the first `length` rounds, the rule started for the full horizon.
template <OnlineRule R>
OutcomeSequence run_prefix(const R& rule, const Instance& instance, std::size_t length) {
        if (length > instance.horizon())
                throw std::out_of_range("prefix longer than the instance");
        auto state = rule.start(instance.voters(), instance.horizon());
        OutcomeSequence out;
        out.winners.reserve(length);
        for (RoundIndex t = 0; t < length; ++t)
                out.winners.push_back(state.step(instance.rounds()[t]));
        return out;
}

template <OnlineRule R>
OutcomeSequence run(const R& rule, const Instance& instance) {
        return run_prefix(rule, instance, instance.horizon());
}

struct TraceRow {
        Winner winner;
        std::vector<Rational> state; // after the round
};

/// Winners plus the rule's numeric state after each round.
inline std::vector<TraceRow> trace(const AnyRule& rule, const Instance& instance) {
        auto state = rule.start(instance.voters(), instance.horizon());
        std::vector<TraceRow> rows;
        for (const RoundSpec& r : instance.rounds()) {
                Winner w = state.step(r);
                rows.push_back({w, state.values()});
        }
        return rows;
}

/// Every built-in rule: the WAM presets, MES, Phragmen, TSD and the irrelevant dictator.
inline std::vector<AnyRule> builtin_rules() {
        std::vector<AnyRule> out;
        for (auto& w : wam_catalog())
                out.emplace_back(std::move(w));
        out.emplace_back(MesRule{});
        out.emplace_back(PhragmenRule{});
        out.emplace_back(PhragmenRule{PhragmenSolver::oracle});
        out.emplace_back(TsdRule{});
        out.emplace_back(IrrelevantDictatorRule{});
        return out;
}

/// Looks a built-in rule up by name; throws std::invalid_argument for unknown names.
inline AnyRule rule_by_name(const std::string& name) {
        for (auto& r : builtin_rules())
                if (r.name() == name)
                        return r;
        throw std::invalid_argument("unknown rule '" + name + "'");
}

} // namespace tempvote
