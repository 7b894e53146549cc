#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tempvote/tempvote.hpp"

namespace tempvote::testing {

using Ballots = std::vector<std::vector<std::string>>;

inline RoundSpec round_of(std::vector<std::string> alts, const Ballots& ballots) {
        RoundSpec r{std::move(alts), {}};
        for (const auto& b : ballots) {
                ApprovalSet s;
                for (const auto& label : b)
                        s = s.with(*r.find(label));
                r.approvals.push_back(s);
        }
        return r;
}

inline ApprovalSet set_of(const RoundSpec& r, const std::vector<std::string>& labels) {
        ApprovalSet s;
        for (const auto& label : labels)
                s = s.with(*r.find(label));
        return s;
}

inline Winner alt(const Instance& inst, RoundIndex t, const std::string& label) { return inst.round(t).find(label); }

inline std::vector<Winner> winners_of(const Instance& inst, const std::vector<std::string>& labels) {
        std::vector<Winner> out;
        for (RoundIndex t = 0; t < labels.size(); ++t)
                out.push_back(labels[t].empty() ? Winner{} : alt(inst, t, labels[t]));
        return out;
}

inline std::vector<Rational> rationals(std::initializer_list<const char*> xs) {
        std::vector<Rational> out;
        for (const char* x : xs)
                out.push_back(Rational::parse(x));
        return out;
}

inline Fixture fixture(const std::string& name) { return *find_fixture(name); }

/// Random instances with n, T and alternative counts drawn per seed from [1, max].
inline std::vector<Instance> random_batch(std::size_t count, std::size_t n_max, std::size_t t_max, std::size_t alts_max,
                                          std::uint64_t salt = 0) {
        std::vector<Instance> out;
        out.reserve(count);
        for (std::uint64_t seed = 0; seed < count; ++seed) {
                std::mt19937_64 pick(seed * 7919 + salt);
                const std::size_t n = 1 + pick() % n_max;
                const std::size_t T = 1 + pick() % t_max;
                out.push_back(generate_random(n, T, alts_max, seed + salt * 100003));
        }
        return out;
}

/// Winner of round t after replaying the rule from scratch on a modified instance.
template <OnlineRule R>
Winner rerun_winner(const R& rule, const Instance& instance, RoundIndex t) {
        return run_prefix(rule, instance, t + 1)[t];
}

/// Instance with one ballot replaced.
inline Instance with_ballot(const Instance& instance, RoundIndex t, VoterId v, ApprovalSet ballot) {
        std::vector<RoundSpec> rounds = instance.rounds();
        rounds[t].approvals[v] = ballot;
        return Instance(instance.voters(), rounds);
}

/// Baseline rule used to exercise negative paths: winner = least-approved alternative
/// among those approved by someone (first on ties). Neither monotone nor OSP.
struct LeastApprovedState {
        Winner step(const RoundSpec& r) {
                std::optional<AltIndex> best;
                std::size_t best_count = 0;
                for (AltIndex c = 0; c < r.alternative_count(); ++c) {
                        std::size_t k = 0;
                        for (ApprovalSet a : r.approvals)
                                k += a.contains(c) ? 1 : 0;
                        if (k > 0 && (!best || k < best_count)) {
                                best = c;
                                best_count = k;
                        }
                }
                return best;
        }
};

struct LeastApprovedRule {
        [[nodiscard]] std::string name() const { return "least-approved"; }
        [[nodiscard]] LeastApprovedState start(std::size_t, std::size_t) const { return {}; }
};

/// Anti-plurality over the whole round: the alternative with the fewest approvals (ties to the first).
struct AntiPluralityState {
        Winner step(const RoundSpec& r) {
                AltIndex best = 0;
                std::size_t best_count = SIZE_MAX;
                for (AltIndex c = 0; c < r.alternative_count(); ++c) {
                        std::size_t k = 0;
                        for (ApprovalSet a : r.approvals)
                                k += a.contains(c) ? 1 : 0;
                        if (k < best_count) {
                                best = c;
                                best_count = k;
                        }
                }
                return best;
        }
};

struct AntiPluralityRule {
        [[nodiscard]] std::string name() const { return "anti-plurality"; }
        [[nodiscard]] AntiPluralityState start(std::size_t, std::size_t) const { return {}; }
};

} // namespace tempvote::testing
