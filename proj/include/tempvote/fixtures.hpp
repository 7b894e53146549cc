#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempvote/io.hpp"
#include "tempvote/model.hpp"

namespace tempvote {

struct Fixture {
        std::string name;
        std::string summary;
        Instance instance;
        json rule;
        std::optional<Deviation> deviation;

        [[nodiscard]] std::string text() const { return serialize_instance(instance, rule, deviation); }
};

namespace detail {

inline RoundSpec round_of(std::vector<std::string> alts, const std::vector<std::vector<std::string>>& ballots) {
        RoundSpec r{std::move(alts), {}};
        for (const auto& b : ballots) {
                ApprovalSet s;
                for (const auto& label : b)
                        s = s.with(*r.find(label));
                r.approvals.push_back(s);
        }
        return r;
}

inline ApprovalSet ballot_in(const RoundSpec& r, const std::vector<std::string>& labels) {
        ApprovalSet s;
        for (const auto& label : labels)
                s = s.with(*r.find(label));
        return s;
}

inline json kind(const char* k) { return json{{"kind", k}}; }

} // namespace detail

/*
 * Small worked instances. Where a table breaks a tie "without loss of
 * generality", the alternative order below is chosen so that the declared
 * order realizes the stated winner.
 */
inline std::vector<Fixture> builtin_fixtures() {
        using detail::round_of;
        std::vector<Fixture> out;

        {
                // c3 is declared before c2 so that it wins the round-2 tie.
                const std::vector<std::string> alts{"c1", "c3", "c2", "c4"};
                std::vector<RoundSpec> rounds{round_of(alts, {{"c1"}, {"c1"}, {"c1"}, {"c2"}, {"c3"}}),
                                              round_of(alts, {{"c1"}, {"c1"}, {"c2"}, {"c2"}, {"c3"}})};
                Instance inst(5, rounds);
                Deviation dev{2, {detail::ballot_in(rounds[0], {"c4"}), detail::ballot_in(rounds[1], {"c2"})}};
                out.push_back({"greedyjr_nonSP", "GreedyJR is not strategyproof: v3 hides c1 in round 1", inst,
                               detail::kind("greedyjr"), dev});
        }
        {
                const std::vector<std::string> alts{"c1", "c2", "c3"};
                std::vector<RoundSpec> rounds{round_of(alts, {{"c1"}, {"c1"}, {"c1"}}), round_of(alts, {{"c1"}, {"c1"}, {"c1"}}),
                                              round_of(alts, {{"c1"}, {"c1"}, {"c1"}}), round_of(alts, {{"c1"}, {"c2"}, {"c3"}})};
                Instance inst(3, rounds);
                Deviation dev{2,
                              {detail::ballot_in(rounds[0], {"c1"}), detail::ballot_in(rounds[1], {"c2"}),
                               detail::ballot_in(rounds[2], {"c2"}), detail::ballot_in(rounds[3], {"c3"})}};
                out.push_back({"mes_nonSP", "MES is not strategyproof: v3 free-rides in rounds 2 and 3", inst,
                               detail::kind("mes"), dev});
        }
        {
                const std::vector<std::string> alts{"c1", "c2"};
                Instance inst(2, {round_of(alts, {{"c1"}, {"c1"}}), round_of(alts, {{"c1"}, {"c2"}})});
                out.push_back({"mes_two_voter", "MES terminates in round 2 with budgets 1/2 each", inst, detail::kind("mes"),
                               std::nullopt});
        }
        {
                const std::vector<std::string> alts{"a", "b", "c"};
                std::vector<RoundSpec> rounds{round_of(alts, {{"a"}, {"a"}, {"a"}}), round_of(alts, {{"a"}, {"b"}, {"c"}})};
                Instance inst(3, rounds);
                Deviation dev{2, {detail::ballot_in(rounds[0], {"b"}), detail::ballot_in(rounds[1], {"c"})}};
                out.push_back({"pp_nonSP", "Perpetual Phragmen is not strategyproof: v3 declares {b} in round 1", inst,
                               detail::kind("phragmen"), dev});
        }
        {
                // G = {v3..v6} shares x in both rounds; v1 and v2 dictate and only approve outside A(G).
                const std::vector<std::string> alts{"x", "y", "z"};
                const std::vector<std::vector<std::string>> ballots{{"y"}, {"y", "z"}, {"x"}, {"x"}, {"x"}, {"x"}};
                Instance inst(6, {round_of(alts, ballots), round_of(alts, ballots)});
                out.push_back({"tsd_not_wjr", "Serial dictator leaves a 2-cohesive group of 4 of 6 voters unsatisfied", inst,
                               detail::kind("tsd"), std::nullopt});
        }
        {
                const std::vector<std::string> alts{"a", "b", "c"};
                Instance inst(2, {round_of(alts, {{"a", "b", "c"}, {"a"}})});
                out.push_back({"irrelevant_dictator", "v1 declares {a,b,c}; dropping b moves the winner from c to a", inst,
                               detail::kind("irrelevant-dictator"), std::nullopt});
        }
        return out;
}

inline std::optional<Fixture> find_fixture(const std::string& name) {
        for (auto& f : builtin_fixtures())
                if (f.name == name)
                        return f;
        return std::nullopt;
}

} // namespace tempvote
