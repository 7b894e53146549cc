#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tempvote/error.hpp"

namespace tempvote {

/// 0-based voter index. Files label voters 1-based ("v1".."vn").
using VoterId = std::size_t;
/// 0-based round index.
using RoundIndex = std::size_t;
/// Position of an alternative in its round's declared list; that order is the tie-break order.
using AltIndex = std::size_t;

inline constexpr std::size_t kMaxAlternatives = 63;
inline constexpr std::size_t kMaxVoters = 63;
inline constexpr std::size_t kMaxRounds = 64;

/// Set of alternatives of one round, as a bitmask over declared positions.
class ApprovalSet {
public:
        constexpr ApprovalSet() = default;
        constexpr explicit ApprovalSet(std::uint64_t bits) : bits_(bits) {}

        static constexpr ApprovalSet single(AltIndex a) { return ApprovalSet(std::uint64_t{1} << a); }
        static constexpr ApprovalSet all(std::size_t alternatives) {
                return ApprovalSet(alternatives >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << alternatives) - 1);
        }

        [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
        [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
        [[nodiscard]] constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
        [[nodiscard]] constexpr bool contains(AltIndex a) const { return a < 64 && ((bits_ >> a) & 1U) != 0; }
        [[nodiscard]] constexpr bool subset_of(ApprovalSet o) const { return (bits_ & ~o.bits_) == 0; }

        /// Lowest declared position; precondition: non-empty.
        [[nodiscard]] constexpr AltIndex first() const { return static_cast<AltIndex>(std::countr_zero(bits_)); }
        /// Highest declared position; precondition: non-empty.
        [[nodiscard]] constexpr AltIndex last() const { return static_cast<AltIndex>(63 - std::countl_zero(bits_)); }

        [[nodiscard]] constexpr ApprovalSet with(AltIndex a) const { return ApprovalSet(bits_ | (std::uint64_t{1} << a)); }
        [[nodiscard]] constexpr ApprovalSet without(AltIndex a) const { return ApprovalSet(bits_ & ~(std::uint64_t{1} << a)); }

        [[nodiscard]] std::vector<AltIndex> members() const {
                std::vector<AltIndex> out;
                for (std::uint64_t b = bits_; b != 0; b &= b - 1)
                        out.push_back(static_cast<AltIndex>(std::countr_zero(b)));
                return out;
        }

        friend constexpr ApprovalSet operator|(ApprovalSet a, ApprovalSet b) { return ApprovalSet(a.bits_ | b.bits_); }
        friend constexpr ApprovalSet operator&(ApprovalSet a, ApprovalSet b) { return ApprovalSet(a.bits_ & b.bits_); }
        friend constexpr bool operator==(ApprovalSet, ApprovalSet) = default;

private:
        std::uint64_t bits_ = 0;
};

/// Non-empty set of voters. Ordered as sorted member-index sequences (see lex_less).
class VoterGroup {
public:
        constexpr VoterGroup() = default;
        constexpr explicit VoterGroup(std::uint64_t bits) : bits_(bits) {}

        static VoterGroup of(std::initializer_list<VoterId> members) {
                std::uint64_t b = 0;
                for (VoterId v : members)
                        b |= std::uint64_t{1} << v;
                return VoterGroup(b);
        }
        static constexpr VoterGroup single(VoterId v) { return VoterGroup(std::uint64_t{1} << v); }
        static constexpr VoterGroup everyone(std::size_t n) {
                return VoterGroup(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
        }

        [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
        [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
        [[nodiscard]] constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
        [[nodiscard]] constexpr bool contains(VoterId v) const { return v < 64 && ((bits_ >> v) & 1U) != 0; }
        [[nodiscard]] constexpr bool subset_of(VoterGroup o) const { return (bits_ & ~o.bits_) == 0; }
        [[nodiscard]] constexpr VoterGroup with(VoterId v) const { return VoterGroup(bits_ | (std::uint64_t{1} << v)); }
        [[nodiscard]] constexpr VoterGroup without(VoterId v) const { return VoterGroup(bits_ & ~(std::uint64_t{1} << v)); }
        [[nodiscard]] constexpr VoterId first() const { return static_cast<VoterId>(std::countr_zero(bits_)); }
        [[nodiscard]] constexpr VoterId last() const { return static_cast<VoterId>(63 - std::countl_zero(bits_)); }

        [[nodiscard]] std::vector<VoterId> members() const {
                std::vector<VoterId> out;
                for (std::uint64_t b = bits_; b != 0; b &= b - 1)
                        out.push_back(static_cast<VoterId>(std::countr_zero(b)));
                return out;
        }

        friend constexpr bool operator==(VoterGroup, VoterGroup) = default;

private:
        std::uint64_t bits_ = 0;
};

/// Lexicographic order of groups compared as sorted member-index sequences;
/// a proper prefix sorts first ({0} < {0,1} < {0,2} < {1}).
constexpr bool lex_less(VoterGroup a, VoterGroup b) {
        std::uint64_t x = a.bits(), y = b.bits();
        while (x != 0 && y != 0) {
                int ax = std::countr_zero(x), by = std::countr_zero(y);
                if (ax != by)
                        return ax < by;
                x &= x - 1;
                y &= y - 1;
        }
        return x == 0 && y != 0;
}

struct RoundSpec {
        std::vector<std::string> alternatives;
        std::vector<ApprovalSet> approvals; // one per voter

        [[nodiscard]] std::size_t alternative_count() const { return alternatives.size(); }
        [[nodiscard]] std::optional<AltIndex> find(std::string_view label) const {
                for (AltIndex i = 0; i < alternatives.size(); ++i)
                        if (alternatives[i] == label)
                                return i;
                return std::nullopt;
        }

        friend bool operator==(const RoundSpec&, const RoundSpec&) = default;
};

/// n voters, T = rounds.size() rounds. Validated on construction; immutable afterwards.
class Instance {
public:
        Instance(std::size_t voters, std::vector<RoundSpec> rounds) : n_(voters), rounds_(std::move(rounds)) { validate(); }

        [[nodiscard]] std::size_t voters() const { return n_; }
        [[nodiscard]] std::size_t horizon() const { return rounds_.size(); }
        [[nodiscard]] const std::vector<RoundSpec>& rounds() const { return rounds_; }
        [[nodiscard]] const RoundSpec& round(RoundIndex t) const {
                if (t >= rounds_.size())
                        throw std::out_of_range("round index " + std::to_string(t) + " out of range [0, " +
                                                std::to_string(rounds_.size()) + ")");
                return rounds_[t];
        }
        [[nodiscard]] ApprovalSet approvals(RoundIndex t, VoterId v) const {
                const RoundSpec& r = round(t);
                if (v >= n_)
                        throw std::out_of_range("voter index " + std::to_string(v) + " out of range");
                return r.approvals[v];
        }

        /// First t rounds as a standalone instance.
        [[nodiscard]] Instance truncated(std::size_t t) const {
                if (t == 0 || t > rounds_.size())
                        throw std::out_of_range("truncation length out of range");
                return Instance(n_, std::vector<RoundSpec>(rounds_.begin(), rounds_.begin() + static_cast<std::ptrdiff_t>(t)));
        }

        friend bool operator==(const Instance&, const Instance&) = default;

private:
        void validate() const {
                if (n_ == 0)
                        throw InvalidInstance("instance needs at least one voter");
                if (n_ > kMaxVoters)
                        throw InvalidInstance("too many voters (max " + std::to_string(kMaxVoters) + ")");
                if (rounds_.empty())
                        throw InvalidInstance("instance needs at least one round");
                if (rounds_.size() > kMaxRounds)
                        throw InvalidInstance("too many rounds (max " + std::to_string(kMaxRounds) + ")");
                for (RoundIndex t = 0; t < rounds_.size(); ++t) {
                        const RoundSpec& r = rounds_[t];
                        const std::string where = "round " + std::to_string(t + 1);
                        if (r.alternatives.empty())
                                throw InvalidInstance(where + ": no alternatives");
                        if (r.alternatives.size() > kMaxAlternatives)
                                throw InvalidInstance(where + ": too many alternatives");
                        std::unordered_set<std::string> seen;
                        for (const auto& label : r.alternatives) {
                                if (label.empty())
                                        throw InvalidInstance(where + ": empty alternative label");
                                if (!seen.insert(label).second)
                                        throw InvalidInstance(where + ": duplicate alternative '" + label + "'");
                        }
                        if (r.approvals.size() != n_)
                                throw InvalidInstance(where + ": expected " + std::to_string(n_) + " approval sets, got " +
                                                      std::to_string(r.approvals.size()));
                        const ApprovalSet universe = ApprovalSet::all(r.alternatives.size());
                        for (VoterId v = 0; v < n_; ++v) {
                                if (r.approvals[v].empty())
                                        throw InvalidInstance(where + ", voter v" + std::to_string(v + 1) + ": empty approval set");
                                if (!r.approvals[v].subset_of(universe))
                                        throw InvalidInstance(where + ", voter v" + std::to_string(v + 1) +
                                                              ": approval outside the round's alternatives");
                        }
                }
        }

        std::size_t n_;
        std::vector<RoundSpec> rounds_;
};

/// Winner of one round; nullopt is ABSENT (no alternative chosen).
using Winner = std::optional<AltIndex>;

struct OutcomeSequence {
        std::vector<Winner> winners;

        [[nodiscard]] std::size_t size() const { return winners.size(); }
        [[nodiscard]] const Winner& operator[](RoundIndex t) const { return winners[t]; }

        friend bool operator==(const OutcomeSequence&, const OutcomeSequence&) = default;
};

/// A single voter's replacement ballots for rounds [0, approvals.size()).
struct Deviation {
        VoterId voter = 0;
        std::vector<ApprovalSet> approvals;

        friend bool operator==(const Deviation&, const Deviation&) = default;
};

/// The instance with the deviating voter's ballots substituted; later rounds stay truthful.
inline Instance with_deviation(const Instance& instance, const Deviation& dev) {
        if (dev.voter >= instance.voters())
                throw InvalidInstance("deviation voter out of range");
        if (dev.approvals.size() > instance.horizon())
                throw InvalidInstance("deviation longer than the instance");
        std::vector<RoundSpec> rounds = instance.rounds();
        for (RoundIndex t = 0; t < dev.approvals.size(); ++t)
                rounds[t].approvals[dev.voter] = dev.approvals[t];
        return Instance(instance.voters(), std::move(rounds));
}

// ---------------------------------------------------------------------------
// Group approvals and satisfaction
// ---------------------------------------------------------------------------

inline void require_group(const Instance& instance, VoterGroup group) {
        if (group.empty())
                throw std::invalid_argument("voter group must be non-empty");
        if (!group.subset_of(VoterGroup::everyone(instance.voters())))
                throw std::invalid_argument("voter group has members outside [0, n)");
}

inline ApprovalSet approval_union(const Instance& instance, VoterGroup group, RoundIndex t) {
        require_group(instance, group);
        const RoundSpec& r = instance.round(t);
        ApprovalSet out;
        for (VoterId v : group.members())
                out = out | r.approvals[v];
        return out;
}

inline ApprovalSet approval_intersection(const Instance& instance, VoterGroup group, RoundIndex t) {
        require_group(instance, group);
        const RoundSpec& r = instance.round(t);
        ApprovalSet out = ApprovalSet::all(r.alternative_count());
        for (VoterId v : group.members())
                out = out & r.approvals[v];
        return out;
}

inline void require_outcome_shape(const Instance& instance, const OutcomeSequence& outcomes) {
        if (outcomes.size() != instance.horizon())
                throw std::invalid_argument("outcome sequence length " + std::to_string(outcomes.size()) +
                                            " does not match horizon " + std::to_string(instance.horizon()));
}

/// 1 if some member approves the round-t winner; ABSENT rounds give 0.
inline int satisfaction_at(const Instance& instance, VoterGroup group, const OutcomeSequence& outcomes, RoundIndex t) {
        require_outcome_shape(instance, outcomes);
        const Winner& w = outcomes.winners.at(t);
        if (!w)
                return 0;
        return approval_union(instance, group, t).contains(*w) ? 1 : 0;
}

inline int satisfaction(const Instance& instance, VoterGroup group, const OutcomeSequence& outcomes) {
        require_outcome_shape(instance, outcomes);
        int total = 0;
        for (RoundIndex t = 0; t < instance.horizon(); ++t)
                total += satisfaction_at(instance, group, outcomes, t);
        return total;
}

/// Bitmask over rounds in which each voter approves the winner.
inline std::vector<std::uint64_t> satisfied_rounds(const Instance& instance, const OutcomeSequence& outcomes) {
        require_outcome_shape(instance, outcomes);
        std::vector<std::uint64_t> masks(instance.voters(), 0);
        for (RoundIndex t = 0; t < instance.horizon(); ++t) {
                const Winner& w = outcomes[t];
                if (!w)
                        continue;
                const RoundSpec& r = instance.rounds()[t];
                for (VoterId v = 0; v < instance.voters(); ++v)
                        if (r.approvals[v].contains(*w))
                                masks[v] |= std::uint64_t{1} << t;
        }
        return masks;
}

// ---------------------------------------------------------------------------
// Cohesion
// ---------------------------------------------------------------------------

struct CohesionRecord {
        VoterGroup group;
        std::size_t level = 0;
        std::vector<RoundIndex> witness_rounds; // increasing

        friend bool operator==(const CohesionRecord&, const CohesionRecord&) = default;
};

/// Maximal l for which the group is l-cohesive, with the rounds witnessing it.
inline CohesionRecord cohesion_level(const Instance& instance, VoterGroup group) {
        CohesionRecord rec{group, 0, {}};
        for (RoundIndex t = 0; t < instance.horizon(); ++t)
                if (!approval_intersection(instance, group, t).empty())
                        rec.witness_rounds.push_back(t);
        rec.level = rec.witness_rounds.size();
        return rec;
}

inline constexpr std::size_t kDefaultGroupCap = 16;

inline void require_group_cap(std::size_t n, std::size_t cap) {
        if (n > cap || n > kMaxVoters)
                throw CapExceeded("group enumeration over n voters", n, std::min(cap, kMaxVoters));
}

/// Visits every non-empty group over n voters in lexicographic order, carrying the
/// per-round approval intersection. The visitor returns false to prune the subtree
/// (all supersets extending the current sequence).
template <class Visitor>
void for_each_group(const Instance& instance, std::size_t cap, Visitor&& visit) {
        const std::size_t n = instance.voters();
        require_group_cap(n, cap);
        const std::size_t T = instance.horizon();
        std::vector<std::vector<ApprovalSet>> stack(n + 1, std::vector<ApprovalSet>(T));
        for (RoundIndex t = 0; t < T; ++t)
                stack[0][t] = ApprovalSet::all(instance.rounds()[t].alternative_count());

        auto recurse = [&](auto&& self, VoterGroup group, std::size_t depth, VoterId next) -> void {
                for (VoterId v = next; v < n; ++v) {
                        auto& cur = stack[depth + 1];
                        for (RoundIndex t = 0; t < T; ++t)
                                cur[t] = stack[depth][t] & instance.rounds()[t].approvals[v];
                        VoterGroup g = group.with(v);
                        if (visit(g, std::span<const ApprovalSet>(cur)))
                                self(self, g, depth + 1, v + 1);
                }
        };
        recurse(recurse, VoterGroup{}, 0, 0);
}

/// All non-empty groups with cohesion level >= min_level, in lexicographic group order.
inline std::vector<CohesionRecord> enumerate_cohesive_groups(const Instance& instance, std::size_t min_level,
                                                             std::size_t cap = kDefaultGroupCap) {
        std::vector<CohesionRecord> out;
        for_each_group(instance, cap, [&](VoterGroup g, std::span<const ApprovalSet> inter) {
                CohesionRecord rec{g, 0, {}};
                for (RoundIndex t = 0; t < inter.size(); ++t)
                        if (!inter[t].empty())
                                rec.witness_rounds.push_back(t);
                rec.level = rec.witness_rounds.size();
                const bool keep_going = rec.level >= min_level; // levels only drop for supersets
                if (keep_going)
                        out.push_back(std::move(rec));
                return keep_going;
        });
        return out;
}

} // namespace tempvote
