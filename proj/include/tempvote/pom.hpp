#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempvote/audit.hpp"
#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"
#include "tempvote/rule.hpp"
#include "tempvote/rules/dictator.hpp"
#include "tempvote/strategy.hpp"

namespace tempvote {

/// Guaranteed satisfaction of an l-cohesive group after one member manipulates:
/// q|G| - q + 1 with q = floor(l / n).
inline std::size_t pjr_floor(std::size_t group_size, std::size_t level, std::size_t n) {
        if (n == 0)
                throw std::invalid_argument("pjr_floor: n must be positive");
        if (group_size < 2)
                throw std::invalid_argument("pjr_floor: group must keep a member besides the manipulator");
        const std::size_t q = level / n;
        return q * group_size - q + 1;
}

struct PomRow {
        VoterGroup group;
        std::size_t level = 0;       // truthful l*
        std::size_t jr_bound = 0;    // truthful
        std::size_t pjr_bound = 0;   // truthful
        std::size_t truthful_satisfaction = 0;
        std::size_t manipulated_satisfaction = 0; // against truthful ballots
        bool contains_manipulator = false;
        bool jr_ok = true;
        std::optional<std::size_t> pjr_floor; // only for groups with the manipulator and |G| >= 2
        bool pjr_floor_ok = true;
        Rational ratio; // manipulated satisfaction / truthful PJR bound

        friend bool operator==(const PomRow&, const PomRow&) = default;
};

struct PomReport {
        ManipulationFinding finding;
        std::vector<PomRow> rows;
        Rational min_ratio{1};
        std::size_t jr_violations = 0;
        std::size_t pjr_floor_violations = 0;
};

namespace detail {

inline std::size_t group_sat(const std::vector<std::uint64_t>& masks, VoterGroup g) {
        std::uint64_t any = 0;
        for (VoterId v : g.members())
                any |= masks[v];
        return static_cast<std::size_t>(std::popcount(any));
}

inline OutcomeSequence padded(const OutcomeSequence& o, std::size_t T) {
        OutcomeSequence out = o;
        out.winners.resize(T);
        return out;
}

} // namespace detail

/// Price-of-manipulability row set for one replayed deviation.
inline PomReport pom_rows(const Instance& instance, const ManipulationFinding& finding, const Caps& caps = {}) {
        const std::size_t n = instance.voters();
        const std::size_t T = instance.horizon();
        const auto truthful = satisfied_rounds(instance, detail::padded(finding.truthful, T));
        const auto manipulated = satisfied_rounds(instance, detail::padded(finding.deviated, T));
        PomReport report{finding, {}, Rational(1), 0, 0};
        for (const CohesionRecord& rec : enumerate_cohesive_groups(instance, 1, caps.groups)) {
                const std::size_t jr = bound(Axiom::JR, rec.group.size(), rec.level, n);
                if (jr == 0)
                        continue;
                PomRow row;
                row.group = rec.group;
                row.level = rec.level;
                row.jr_bound = jr;
                row.pjr_bound = bound(Axiom::PJR, rec.group.size(), rec.level, n);
                row.truthful_satisfaction = detail::group_sat(truthful, rec.group);
                row.manipulated_satisfaction = detail::group_sat(manipulated, rec.group);
                row.contains_manipulator = rec.group.contains(finding.voter);
                row.jr_ok = row.manipulated_satisfaction >= row.jr_bound;
                if (row.contains_manipulator && rec.group.size() >= 2) {
                        row.pjr_floor = pjr_floor(rec.group.size(), rec.level, n);
                        row.pjr_floor_ok = row.manipulated_satisfaction >= *row.pjr_floor;
                }
                row.ratio = Rational(static_cast<Rational::int_type>(row.manipulated_satisfaction),
                                     static_cast<Rational::int_type>(row.pjr_bound));
                report.min_ratio = min(report.min_ratio, row.ratio);
                report.jr_violations += row.jr_ok ? 0 : 1;
                report.pjr_floor_violations += row.pjr_floor_ok ? 0 : 1;
                report.rows.push_back(std::move(row));
        }
        return report;
}

/// One report per strictly improving single-voter deviation, canonical order.
template <OnlineRule R>
std::vector<PomReport> pom_report(const R& rule, const Instance& instance, const Caps& caps = {}) {
        std::vector<PomReport> out;
        for (const ManipulationFinding& f : all_sp_violations(rule, instance, caps))
                out.push_back(pom_rows(instance, f, caps));
        return out;
}

// ---------------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------------

struct ConvergencePoint {
        std::size_t n = 0;
        std::size_t horizon = 0; // T = q n
        std::size_t q = 0;
        Rational ratio;       // min over groups of sat / ((q+1)|G|)
        Rational bound_ratio; // min over groups of sat / PJR bound
};

/*
 * Worst case for the serial dictator: the last g = max(1, floor(fraction n))
 * voters form a group that always approves x, everyone else approves only y,
 * and the identity permutation hands the non-members their turns first.
 */
inline Instance tsd_worst_case_instance(std::size_t n, std::size_t group_size, std::size_t horizon) {
        std::vector<RoundSpec> rounds(horizon);
        for (auto& r : rounds) {
                r.alternatives = {"x", "y"};
                for (VoterId v = 0; v < n; ++v)
                        r.approvals.push_back(v + group_size >= n ? ApprovalSet::single(0) : ApprovalSet::single(1));
        }
        return Instance(n, std::move(rounds));
}

inline std::size_t fraction_of(std::size_t n, const Rational& fraction) {
        if (fraction <= Rational(0) || fraction > Rational(1))
                throw std::invalid_argument("group fraction must lie in (0, 1]");
        const auto g = (fraction * Rational(static_cast<Rational::int_type>(n))).floor();
        return std::max<std::size_t>(1, static_cast<std::size_t>(g));
}

/// Worst-group ratio of a serial-dictator run over every group with positive PJR bound.
inline ConvergencePoint tsd_ratio(const Instance& instance, const TsdRule& rule, std::size_t group_cap) {
        const std::size_t n = instance.voters();
        const std::size_t T = instance.horizon();
        const std::size_t q = T / n;
        const auto sat = satisfied_rounds(instance, run(rule, instance));
        ConvergencePoint p{n, T, q, Rational(1), Rational(1)};
        bool any = false;
        for (const CohesionRecord& rec : enumerate_cohesive_groups(instance, 1, group_cap)) {
                const std::size_t b = bound(Axiom::PJR, rec.group.size(), rec.level, n);
                if (b == 0)
                        continue;
                const auto s = static_cast<Rational::int_type>(detail::group_sat(sat, rec.group));
                const Rational ceiling = Rational(static_cast<Rational::int_type>((q + 1) * rec.group.size()));
                const Rational r = Rational(s) / ceiling;
                const Rational br = Rational(s) / Rational(static_cast<Rational::int_type>(b));
                p.ratio = any ? min(p.ratio, r) : r;
                p.bound_ratio = any ? min(p.bound_ratio, br) : br;
                any = true;
        }
        return p;
}

inline std::vector<ConvergencePoint> tsd_convergence(std::size_t n, const Rational& group_fraction, std::size_t q_max,
                                                     std::size_t group_cap = kDefaultGroupCap) {
        if (n < 2)
                throw std::invalid_argument("tsd_convergence needs n >= 2");
        if (q_max < 1)
                throw std::invalid_argument("tsd_convergence needs q_max >= 1");
        const std::size_t g = fraction_of(n, group_fraction);
        std::vector<ConvergencePoint> out;
        for (std::size_t q = 1; q <= q_max; ++q)
                out.push_back(tsd_ratio(tsd_worst_case_instance(n, g, q * n), TsdRule{}, group_cap));
        return out;
}

/// "n,T,q,ratio_num,ratio_den" with a header line.
inline std::string convergence_csv(const std::vector<ConvergencePoint>& points) {
        std::string out = "n,T,q,ratio_num,ratio_den\n";
        for (const auto& p : points)
                out += std::to_string(p.n) + "," + std::to_string(p.horizon) + "," + std::to_string(p.q) + "," +
                       std::to_string(p.ratio.num()) + "," + std::to_string(p.ratio.den()) + "\n";
        return out;
}

struct FloorCheckSummary {
        std::size_t instances = 0;
        std::size_t profiles = 0;          // truthful runs plus replayed single-voter deviations
        std::size_t floor_violations = 0;  // a voter below q = floor(T/n)
        std::size_t ratio_violations = 0;  // a group below q / ((q+1)|G|)
        std::optional<Rational> min_group_ratio; // sat(G) / ((q+1)|G|)
};

/*
 * Individual floor for a PJR rule: every voter is a T-cohesive singleton, so it
 * is owed q = floor(T/n) rounds. Checked on the truthful run and, when
 * `with_manipulations`, on every strictly improving single-voter deviation
 * (satisfaction against truthful ballots).
 */
template <OnlineRule R>
FloorCheckSummary pjr_individual_floor_check(const R& rule, std::span<const Instance> batch, const Caps& caps = {},
                                             bool with_manipulations = true) {
        FloorCheckSummary s;
        for (const Instance& instance : batch) {
                ++s.instances;
                const std::size_t n = instance.voters();
                const std::size_t T = instance.horizon();
                const std::size_t q = T / n;
                std::vector<OutcomeSequence> profiles{run(rule, instance)};
                if (with_manipulations)
                        for (auto& f : all_sp_violations(rule, instance, caps))
                                profiles.push_back(std::move(f.deviated));
                for (const OutcomeSequence& o : profiles) {
                        ++s.profiles;
                        const auto sat = satisfied_rounds(instance, o);
                        for (VoterId v = 0; v < n; ++v)
                                if (static_cast<std::size_t>(std::popcount(sat[v])) < q)
                                        ++s.floor_violations;
                        for (const CohesionRecord& rec : enumerate_cohesive_groups(instance, 1, caps.groups)) {
                                if (bound(Axiom::PJR, rec.group.size(), rec.level, n) == 0)
                                        continue;
                                const auto gs = static_cast<Rational::int_type>(detail::group_sat(sat, rec.group));
                                const auto ceiling = static_cast<Rational::int_type>((q + 1) * rec.group.size());
                                const Rational r(gs, ceiling);
                                if (r < Rational(static_cast<Rational::int_type>(q), ceiling))
                                        ++s.ratio_violations;
                                s.min_group_ratio = s.min_group_ratio ? min(*s.min_group_ratio, r) : r;
                        }
                }
        }
        return s;
}

} // namespace tempvote
