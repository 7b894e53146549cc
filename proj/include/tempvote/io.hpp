#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempvote/error.hpp"
#include "tempvote/model.hpp"
#include "tempvote/rational.hpp"
#include "tempvote/rule.hpp"

namespace tempvote {

using json = nlohmann::ordered_json;

/// Instance document plus its optional rule and deviation blocks.
struct InstanceFile {
        Instance instance;
        std::optional<json> rule;       // raw rule block; see rule_from_json
        std::optional<Deviation> deviation;
};

inline std::string voter_label(VoterId v) { return "v" + std::to_string(v + 1); }

inline VoterId parse_voter_label(const std::string& s, std::size_t n) {
        std::string digits = s;
        if (!digits.empty() && (digits[0] == 'v' || digits[0] == 'V'))
                digits.erase(0, 1);
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
                v = std::stoul(digits, &pos);
        } catch (const std::exception&) {
                throw ParseError("malformed voter label '" + s + "'");
        }
        if (pos != digits.size() || v < 1 || v > n)
                throw ParseError("voter label '" + s + "' out of range v1..v" + std::to_string(n));
        return static_cast<VoterId>(v - 1);
}

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
                bool ok = false;
                for (const char* a : allowed)
                        ok = ok || it.key() == a;
                if (!ok)
                        throw ParseError(where + ": unknown field '" + it.key() + "'");
        }
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end())
                throw ParseError(where + ": missing field '" + key + "'");
        return *it;
}

inline std::size_t positive_int(const json& j, const std::string& where) {
        if (!j.is_number_integer() || j.get<long long>() < 1)
                throw ParseError(where + ": expected a positive integer");
        return j.get<std::size_t>();
}

inline ApprovalSet parse_ballot(const json& j, const RoundSpec& round, const std::string& where) {
        if (!j.is_array())
                throw ParseError(where + ": approval set must be an array of labels");
        if (j.empty())
                throw ParseError(where + ": empty approval set (every voter must approve at least one alternative)");
        ApprovalSet s;
        for (const json& label : j) {
                if (!label.is_string())
                        throw ParseError(where + ": alternative labels must be strings");
                auto idx = round.find(label.get<std::string>());
                if (!idx)
                        throw ParseError(where + ": approval '" + label.get<std::string>() +
                                         "' is not one of the round's alternatives");
                if (s.contains(*idx))
                        throw ParseError(where + ": duplicate approval '" + label.get<std::string>() + "'");
                s = s.with(*idx);
        }
        return s;
}

inline json ballot_json(const RoundSpec& round, ApprovalSet s) {
        json arr = json::array();
        for (AltIndex a : s.members())
                arr.push_back(round.alternatives[a]);
        return arr;
}

} // namespace detail

/*
 * {"n": 3, "T": 2,
 *  "rounds": [{"alternatives": ["a","b"], "approvals": [["a"],["b"],["a","b"]]}, ...],
 *  "rule": {...},                                   optional
 *  "deviation": {"voter": "v3", "approvals": [...]}} optional, one ballot per round
 */
inline InstanceFile parse_instance(const std::string& text) {
        json doc;
        try {
                doc = json::parse(text);
        } catch (const json::parse_error& e) {
                throw ParseError(std::string("malformed document: ") + e.what());
        }
        if (!doc.is_object())
                throw ParseError("instance document must be a JSON object");
        detail::reject_unknown(doc, {"n", "T", "rounds", "rule", "deviation"}, "instance");
        const std::size_t n = detail::positive_int(detail::field(doc, "n", "instance"), "field 'n'");
        const std::size_t T = detail::positive_int(detail::field(doc, "T", "instance"), "field 'T'");
        const json& rounds_json = detail::field(doc, "rounds", "instance");
        if (!rounds_json.is_array())
                throw ParseError("field 'rounds' must be an array");
        if (rounds_json.size() != T)
                throw ParseError("T is " + std::to_string(T) + " but " + std::to_string(rounds_json.size()) + " rounds are given");
        if (n > kMaxVoters)
                throw ParseError("too many voters (max " + std::to_string(kMaxVoters) + ")");

        std::vector<RoundSpec> rounds;
        for (std::size_t t = 0; t < T; ++t) {
                const std::string where = "round " + std::to_string(t + 1);
                const json& rj = rounds_json[t];
                if (!rj.is_object())
                        throw ParseError(where + ": must be an object");
                detail::reject_unknown(rj, {"alternatives", "approvals"}, where);
                RoundSpec r;
                const json& alts = detail::field(rj, "alternatives", where);
                if (!alts.is_array() || alts.empty())
                        throw ParseError(where + ": 'alternatives' must be a non-empty array");
                if (alts.size() > kMaxAlternatives)
                        throw ParseError(where + ": too many alternatives");
                for (const json& a : alts) {
                        if (!a.is_string() || a.get<std::string>().empty())
                                throw ParseError(where + ": alternative labels must be non-empty strings");
                        if (r.find(a.get<std::string>()))
                                throw ParseError(where + ": duplicate alternative '" + a.get<std::string>() + "'");
                        r.alternatives.push_back(a.get<std::string>());
                }
                const json& apps = detail::field(rj, "approvals", where);
                if (!apps.is_array() || apps.size() != n)
                        throw ParseError(where + ": 'approvals' must list exactly " + std::to_string(n) + " approval sets");
                for (std::size_t v = 0; v < n; ++v)
                        r.approvals.push_back(detail::parse_ballot(apps[v], r, where + ", voter " + voter_label(v)));
                rounds.push_back(std::move(r));
        }

        InstanceFile file{Instance(n, std::move(rounds)), std::nullopt, std::nullopt};
        if (auto it = doc.find("rule"); it != doc.end()) {
                if (!it->is_object())
                        throw ParseError("field 'rule' must be an object");
                file.rule = *it;
        }
        if (auto it = doc.find("deviation"); it != doc.end()) {
                if (!it->is_object())
                        throw ParseError("field 'deviation' must be an object");
                detail::reject_unknown(*it, {"voter", "approvals"}, "deviation");
                const json& vj = detail::field(*it, "voter", "deviation");
                if (!vj.is_string())
                        throw ParseError("deviation: 'voter' must be a label like \"v3\"");
                Deviation dev{parse_voter_label(vj.get<std::string>(), n), {}};
                const json& aj = detail::field(*it, "approvals", "deviation");
                if (!aj.is_array() || aj.size() != T)
                        throw ParseError("deviation: 'approvals' must give one approval set per round");
                for (std::size_t t = 0; t < T; ++t)
                        dev.approvals.push_back(detail::parse_ballot(aj[t], file.instance.rounds()[t],
                                                                     "deviation, round " + std::to_string(t + 1)));
                file.deviation = std::move(dev);
        }
        return file;
}

inline json deviation_json(const Instance& instance, const Deviation& dev) {
        json d = json::object();
        d["voter"] = voter_label(dev.voter);
        json arr = json::array();
        for (RoundIndex t = 0; t < dev.approvals.size(); ++t)
                arr.push_back(detail::ballot_json(instance.rounds()[t], dev.approvals[t]));
        d["approvals"] = arr;
        return d;
}

inline json instance_json(const Instance& instance) {
        json doc = json::object();
        doc["n"] = instance.voters();
        doc["T"] = instance.horizon();
        json rounds = json::array();
        for (const RoundSpec& r : instance.rounds()) {
                json rj = json::object();
                rj["alternatives"] = r.alternatives;
                json apps = json::array();
                for (ApprovalSet s : r.approvals)
                        apps.push_back(detail::ballot_json(r, s));
                rj["approvals"] = apps;
                rounds.push_back(rj);
        }
        doc["rounds"] = rounds;
        return doc;
}

/// Canonical text: header fields on their own lines, one compact line per round.
inline std::string serialize_instance(const Instance& instance, const std::optional<json>& rule = std::nullopt,
                                      const std::optional<Deviation>& deviation = std::nullopt) {
        const json doc = instance_json(instance);
        std::string out = "{\n";
        out += "  \"n\": " + doc["n"].dump() + ",\n";
        out += "  \"T\": " + doc["T"].dump() + ",\n";
        out += "  \"rounds\": [\n";
        const json& rounds = doc["rounds"];
        for (std::size_t i = 0; i < rounds.size(); ++i)
                out += "    " + rounds[i].dump() + (i + 1 < rounds.size() ? ",\n" : "\n");
        out += "  ]";
        if (rule)
                out += ",\n  \"rule\": " + rule->dump();
        if (deviation)
                out += ",\n  \"deviation\": " + deviation_json(instance, *deviation).dump();
        out += "\n}\n";
        return out;
}

// ---------------------------------------------------------------------------
// Rule configuration
// ---------------------------------------------------------------------------

namespace detail {

inline Rational rational_field(const json& j, const std::string& where) {
        if (j.is_number_integer())
                return Rational(j.get<std::int64_t>());
        if (!j.is_string())
                throw ParseError(where + ": expected a rational \"num/den\"");
        try {
                return Rational::parse(j.get<std::string>());
        } catch (const std::exception& e) {
                throw ParseError(where + ": " + e.what());
        }
}

inline AffineMap affine_field(const json& j, const std::string& where) {
        if (!j.is_object())
                throw ParseError(where + ": expected {\"slope\": ..., \"offset\": ...}");
        reject_unknown(j, {"slope", "offset"}, where);
        return {rational_field(field(j, "slope", where), where + ".slope"),
                rational_field(field(j, "offset", where), where + ".offset")};
}

inline std::string string_value(const json& j, const std::string& where) {
        if (!j.is_string())
                throw ParseError(where + ": expected a string");
        return j.get<std::string>();
}

inline json affine_json(const AffineMap& m) {
        json j = json::object();
        j["slope"] = m.slope.to_string();
        j["offset"] = m.offset.to_string();
        return j;
}

} // namespace detail

/*
 * {"kind": "greedyjr"} for any built-in name, or
 * {"kind": "wam", "name": ..., "f": {"slope": "0", "offset": "0"}, "g": {...}, "initial": "1" | [...]}
 * {"kind": "mes", "horizon": 4}
 * {"kind": "phragmen", "solver": "fast" | "oracle"}
 * {"kind": "tsd", "permutation": ["v2", "v1"], "choice": "first" | "last"}
 */
inline AnyRule rule_from_json(const json& j, std::size_t n) {
        if (!j.is_object())
                throw ParseError("rule: must be an object");
        const json& kind_json = detail::field(j, "kind", "rule");
        if (!kind_json.is_string())
                throw ParseError("rule: 'kind' must be a string");
        const std::string kind = kind_json.get<std::string>();
        if (kind == "wam") {
                detail::reject_unknown(j, {"kind", "name", "f", "g", "initial"}, "rule");
                std::string name = "wam";
                if (auto it = j.find("name"); it != j.end())
                        name = detail::string_value(*it, "rule.name");
                AffineMap f = detail::affine_field(detail::field(j, "f", "rule"), "rule.f");
                AffineMap g = detail::affine_field(detail::field(j, "g", "rule"), "rule.g");
                try {
                        if (auto it = j.find("initial"); it != j.end() && it->is_array()) {
                                std::vector<Rational> w;
                                for (const json& x : *it)
                                        w.push_back(detail::rational_field(x, "rule.initial"));
                                return WamRule(name, f, g, std::move(w));
                        } else if (it != j.end()) {
                                return WamRule(name, f, g, detail::rational_field(*it, "rule.initial"));
                        }
                        return WamRule(name, f, g);
                } catch (const std::invalid_argument& e) {
                        throw ParseError(std::string("rule: ") + e.what());
                }
        }
        if (kind == "mes") {
                detail::reject_unknown(j, {"kind", "horizon"}, "rule");
                if (auto it = j.find("horizon"); it != j.end())
                        return MesRule(detail::positive_int(*it, "rule.horizon"));
                return MesRule{};
        }
        if (kind == "phragmen" || kind == "phragmen-oracle") {
                detail::reject_unknown(j, {"kind", "solver"}, "rule");
                PhragmenSolver solver = kind == "phragmen" ? PhragmenSolver::fast : PhragmenSolver::oracle;
                if (auto it = j.find("solver"); it != j.end()) {
                        const std::string s = detail::string_value(*it, "rule.solver");
                        if (s != "fast" && s != "oracle")
                                throw ParseError("rule.solver: expected \"fast\" or \"oracle\"");
                        solver = s == "fast" ? PhragmenSolver::fast : PhragmenSolver::oracle;
                }
                return PhragmenRule(solver);
        }
        if (kind == "tsd") {
                detail::reject_unknown(j, {"kind", "permutation", "choice"}, "rule");
                std::vector<VoterId> perm;
                if (auto it = j.find("permutation"); it != j.end()) {
                        if (!it->is_array())
                                throw ParseError("rule.permutation: expected an array of voter labels");
                        for (const json& v : *it)
                                perm.push_back(parse_voter_label(detail::string_value(v, "rule.permutation"), n));
                }
                ChoiceFunction chi = ChoiceFunction::first;
                if (auto it = j.find("choice"); it != j.end()) {
                        const std::string c = detail::string_value(*it, "rule.choice");
                        if (c != "first" && c != "last")
                                throw ParseError("rule.choice: expected \"first\" or \"last\"");
                        chi = c == "first" ? ChoiceFunction::first : ChoiceFunction::last;
                }
                return TsdRule(std::move(perm), chi);
        }
        detail::reject_unknown(j, {"kind"}, "rule");
        try {
                return rule_by_name(kind);
        } catch (const std::invalid_argument& e) {
                throw ParseError(std::string("rule: ") + e.what());
        }
}

/// Inverse of rule_from_json; permutations are written as voter labels.
inline json rule_json(const AnyRule& rule) {
        return std::visit(
            [](const auto& r) -> json {
                    using R = std::remove_cvref_t<decltype(r)>;
                    json j = json::object();
                    if constexpr (std::is_same_v<R, WamRule>) {
                            j["kind"] = "wam";
                            j["name"] = r.name();
                            j["f"] = detail::affine_json(r.winner_update());
                            j["g"] = detail::affine_json(r.other_update());
                            if (r.per_voter_initial().empty()) {
                                    j["initial"] = r.uniform_initial().to_string();
                            } else {
                                    json w = json::array();
                                    for (const auto& x : r.per_voter_initial())
                                            w.push_back(x.to_string());
                                    j["initial"] = w;
                            }
                    } else if constexpr (std::is_same_v<R, MesRule>) {
                            j["kind"] = "mes";
                            if (r.horizon())
                                    j["horizon"] = *r.horizon();
                    } else if constexpr (std::is_same_v<R, PhragmenRule>) {
                            j["kind"] = "phragmen";
                            j["solver"] = r.solver() == PhragmenSolver::fast ? "fast" : "oracle";
                    } else if constexpr (std::is_same_v<R, TsdRule>) {
                            j["kind"] = "tsd";
                            json p = json::array();
                            for (VoterId v : r.permutation())
                                    p.push_back(voter_label(v));
                            j["permutation"] = p;
                            j["choice"] = r.choice() == ChoiceFunction::first ? "first" : "last";
                    } else {
                            j["kind"] = r.name();
                    }
                    return j;
            },
            rule.variant());
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Deterministic in the seed: each round gets 1..max_alts alternatives c1..ck
/// and every voter a uniformly random non-empty subset of them.
inline Instance generate_random(std::size_t n, std::size_t horizon, std::size_t max_alts, std::uint64_t seed) {
        if (n < 1 || horizon < 1 || max_alts < 1)
                throw std::invalid_argument("generate_random: n, T and max_alts must be >= 1");
        if (max_alts > kMaxAlternatives)
                throw std::invalid_argument("generate_random: max_alts too large");
        std::mt19937_64 rng(seed);
        std::vector<RoundSpec> rounds(horizon);
        for (auto& r : rounds) {
                const auto k = static_cast<std::size_t>(std::uniform_int_distribution<std::size_t>(1, max_alts)(rng));
                for (std::size_t a = 0; a < k; ++a)
                        r.alternatives.push_back("c" + std::to_string(a + 1));
                std::uniform_int_distribution<std::uint64_t> ballot(1, ApprovalSet::all(k).bits());
                for (std::size_t v = 0; v < n; ++v)
                        r.approvals.emplace_back(ballot(rng));
        }
        return Instance(n, std::move(rounds));
}

} // namespace tempvote
