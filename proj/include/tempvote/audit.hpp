#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "tempvote/model.hpp"

namespace tempvote {

enum class Axiom { JR, PJR, EJR, wJR, wPJR, wEJR };

inline constexpr std::array<Axiom, 6> kAllAxioms = {Axiom::JR, Axiom::PJR, Axiom::EJR, Axiom::wJR, Axiom::wPJR, Axiom::wEJR};

inline std::string axiom_name(Axiom a) {
        switch (a) {
        case Axiom::JR: return "JR";
        case Axiom::PJR: return "PJR";
        case Axiom::EJR: return "EJR";
        case Axiom::wJR: return "wJR";
        case Axiom::wPJR: return "wPJR";
        case Axiom::wEJR: return "wEJR";
        }
        return "?";
}

/// Case-insensitive: "jr", "PJR", "wejr", ...
inline Axiom parse_axiom(const std::string& text) {
        std::string s;
        for (char c : text)
                s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        for (Axiom a : kAllAxioms) {
                std::string name = axiom_name(a);
                std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
                if (name == s)
                        return a;
        }
        throw std::invalid_argument("unknown axiom '" + text + "'");
}

inline constexpr bool is_weak(Axiom a) { return a == Axiom::wJR || a == Axiom::wPJR || a == Axiom::wEJR; }
inline constexpr Axiom strong_form(Axiom a) {
        switch (a) {
        case Axiom::wJR: return Axiom::JR;
        case Axiom::wPJR: return Axiom::PJR;
        case Axiom::wEJR: return Axiom::EJR;
        default: return a;
        }
}

/// Lower satisfaction bound for an l-cohesive group: min(1, floor(l|G|/n)) for JR, floor(l|G|/n) otherwise.
inline std::size_t bound(Axiom axiom, std::size_t group_size, std::size_t level, std::size_t n) {
        if (n == 0 || group_size == 0 || group_size > n)
                throw std::invalid_argument("bound: need 1 <= |G| <= n");
        const std::size_t proportional = level * group_size / n;
        return strong_form(axiom) == Axiom::JR ? std::min<std::size_t>(1, proportional) : proportional;
}

struct AuditRow {
        VoterGroup group;
        std::size_t level = 0;
        std::size_t bound = 0;
        std::size_t achieved = 0;
        std::optional<VoterId> witness; // EJR family: lowest-index best-satisfied member
        bool pass = false;
};

struct AuditReport {
        Axiom axiom = Axiom::JR;
        std::vector<AuditRow> rows; // lexicographic group order
        bool pass = true;

        [[nodiscard]] std::size_t failures() const {
                return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const AuditRow& r) { return !r.pass; }));
        }
};

/*
 * Checks every non-empty group at its maximal cohesion level l*. The bound is
 * non-decreasing in l, so passing at l* covers every smaller l. Weak forms only
 * look at groups cohesive in all T rounds.
 */
inline AuditReport audit(Axiom axiom, const Instance& instance, const OutcomeSequence& outcomes,
                         std::size_t group_cap = kDefaultGroupCap) {
        require_outcome_shape(instance, outcomes);
        const std::size_t n = instance.voters();
        const std::size_t T = instance.horizon();
        const std::vector<std::uint64_t> sat = satisfied_rounds(instance, outcomes);
        const bool ejr = strong_form(axiom) == Axiom::EJR;

        AuditReport report{axiom, {}, true};
        for_each_group(instance, group_cap, [&](VoterGroup g, std::span<const ApprovalSet> inter) {
                std::size_t level = 0;
                for (const ApprovalSet& s : inter)
                        level += s.empty() ? 0 : 1;
                if (is_weak(axiom) && level != T)
                        return level == T; // supersets cannot regain full cohesion
                const std::size_t b = bound(axiom, g.size(), level, n);
                if (b == 0)
                        return true;
                AuditRow row{g, level, b, 0, std::nullopt, false};
                if (ejr) {
                        for (VoterId v : g.members()) {
                                const auto s = static_cast<std::size_t>(std::popcount(sat[v]));
                                if (!row.witness || s > row.achieved) {
                                        row.witness = v;
                                        row.achieved = s;
                                }
                        }
                } else {
                        std::uint64_t any = 0;
                        for (VoterId v : g.members())
                                any |= sat[v];
                        row.achieved = static_cast<std::size_t>(std::popcount(any));
                }
                row.pass = row.achieved >= row.bound;
                report.pass = report.pass && row.pass;
                report.rows.push_back(std::move(row));
                return true;
        });
        return report;
}

struct ImplicationMatrix {
        std::array<bool, 6> pass{}; // indexed like kAllAxioms
        std::vector<std::string> violations; // logically impossible; non-empty means a harness bug

        [[nodiscard]] bool passes(Axiom a) const { return pass[static_cast<std::size_t>(a)]; }
};

/// Audits all six axioms and checks EJR => PJR => JR, the weak chain, and strong => weak.
inline ImplicationMatrix implication_matrix(const Instance& instance, const OutcomeSequence& outcomes,
                                            std::size_t group_cap = kDefaultGroupCap) {
        ImplicationMatrix m;
        for (Axiom a : kAllAxioms)
                m.pass[static_cast<std::size_t>(a)] = audit(a, instance, outcomes, group_cap).pass;
        const std::pair<Axiom, Axiom> edges[] = {{Axiom::EJR, Axiom::PJR},   {Axiom::PJR, Axiom::JR},
                                                 {Axiom::wEJR, Axiom::wPJR}, {Axiom::wPJR, Axiom::wJR},
                                                 {Axiom::JR, Axiom::wJR},    {Axiom::PJR, Axiom::wPJR},
                                                 {Axiom::EJR, Axiom::wEJR}};
        for (auto [from, to] : edges)
                if (m.passes(from) && !m.passes(to))
                        m.violations.push_back(axiom_name(from) + " holds but " + axiom_name(to) + " fails");
        return m;
}

} // namespace tempvote
