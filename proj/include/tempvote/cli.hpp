#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempvote/audit.hpp"
#include "tempvote/fixtures.hpp"
#include "tempvote/io.hpp"
#include "tempvote/pom.hpp"
#include "tempvote/rule.hpp"
#include "tempvote/strategy.hpp"

namespace tempvote::cli {

/// Exit codes: property holds / audit passes, usage or parse error, violation found.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kViolation = 2;

struct SeedRange {
        std::uint64_t first = 0;
        std::uint64_t last = 0;
};

/// "a..b" (inclusive) or a single seed "a".
inline SeedRange parse_seeds(const std::string& s) {
        auto to_u64 = [&](const std::string& part) {
                std::size_t pos = 0;
                unsigned long long v = 0;
                try {
                        v = std::stoull(part, &pos);
                } catch (const std::exception&) {
                        throw std::invalid_argument("malformed seed range '" + s + "'");
                }
                if (pos != part.size())
                        throw std::invalid_argument("malformed seed range '" + s + "'");
                return static_cast<std::uint64_t>(v);
        };
        auto dots = s.find("..");
        if (dots == std::string::npos) {
                auto v = to_u64(s);
                return {v, v};
        }
        SeedRange r{to_u64(s.substr(0, dots)), to_u64(s.substr(dots + 2))};
        if (r.last < r.first)
                throw std::invalid_argument("empty seed range '" + s + "'");
        return r;
}

namespace detail {

struct Options {
        std::string rule;
        std::string instance;
        std::string axiom = "all";
        std::string property;
        std::string voter;
        std::string seeds;
        std::size_t n = 4;
        std::size_t t = 4;
        std::size_t max_alts = 3;
        std::size_t q_max = 10;
        std::string fraction = "1/2";
        Caps caps;
        std::string out;
        std::string extract;
};

struct Source {
        std::string label; // "fixture:NAME", "file:PATH" or "seed:N"
        InstanceFile file;
};

inline std::string read_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
                throw ParseError("cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
}

inline std::vector<Source> sources(const Options& o) {
        std::vector<Source> out;
        if (!o.seeds.empty()) {
                if (!o.instance.empty())
                        throw std::invalid_argument("--instance and --seeds are mutually exclusive");
                const SeedRange r = parse_seeds(o.seeds);
                for (std::uint64_t s = r.first;; ++s) {
                        out.push_back({"seed:" + std::to_string(s),
                                       InstanceFile{generate_random(o.n, o.t, o.max_alts, s), std::nullopt, std::nullopt}});
                        if (s == r.last)
                                break;
                }
                return out;
        }
        if (o.instance.empty())
                throw std::invalid_argument("need --instance NAME|PATH or --seeds A..B");
        if (auto f = find_fixture(o.instance))
                out.push_back({"fixture:" + f->name, InstanceFile{f->instance, f->rule, f->deviation}});
        else
                out.push_back({"file:" + o.instance, parse_instance(read_file(o.instance))});
        return out;
}

inline AnyRule resolve_rule(const Options& o, const Source& src) {
        if (!o.rule.empty()) {
                if (o.rule == "wam") {
                        if (!src.file.rule)
                                throw std::invalid_argument("--rule wam needs a rule block in the instance file");
                        return rule_from_json(*src.file.rule, src.file.instance.voters());
                }
                return rule_by_name(o.rule);
        }
        if (src.file.rule)
                return rule_from_json(*src.file.rule, src.file.instance.voters());
        throw std::invalid_argument("no rule: pass --rule or add a rule block to the instance");
}

inline json winner_json(const Instance& inst, RoundIndex t, const Winner& w) {
        return w ? json(inst.rounds()[t].alternatives[*w]) : json(nullptr);
}

inline json winners_json(const Instance& inst, const OutcomeSequence& o) {
        json arr = json::array();
        for (RoundIndex t = 0; t < o.size(); ++t)
                arr.push_back(winner_json(inst, t, o[t]));
        return arr;
}

inline json satisfaction_json(const Instance& inst, const OutcomeSequence& o) {
        json j = json::object();
        const auto masks = satisfied_rounds(inst, o);
        for (VoterId v = 0; v < inst.voters(); ++v)
                j[voter_label(v)] = std::popcount(masks[v]);
        return j;
}

inline json trace_json(const AnyRule& rule, const Instance& inst) {
        const std::string label = state_label(rule);
        json arr = json::array();
        const auto rows = trace(rule, inst);
        for (RoundIndex t = 0; t < rows.size(); ++t) {
                json row = json::object();
                row["round"] = t + 1;
                row["winner"] = winner_json(inst, t, rows[t].winner);
                if (!label.empty()) {
                        json vals = json::array();
                        for (const auto& v : rows[t].state)
                                vals.push_back(v.to_string());
                        row[label] = vals;
                }
                arr.push_back(row);
        }
        return arr;
}

inline OutcomeSequence padded(const OutcomeSequence& o, std::size_t T) {
        OutcomeSequence out = o;
        out.winners.resize(T);
        return out;
}

inline json finding_json(const Instance& inst, const AnyRule& rule, const ManipulationFinding& f) {
        json j = json::object();
        j["voter"] = voter_label(f.voter);
        j["round"] = f.round ? json(*f.round + 1) : json(nullptr);
        j["deviation"] = deviation_json(inst, f.deviation);
        j["truthful_winners"] = winners_json(inst, f.truthful);
        j["deviated_winners"] = winners_json(inst, f.deviated);
        j["truthful_satisfaction"] = f.truthful_satisfaction;
        j["deviated_satisfaction"] = f.deviated_satisfaction;
        // Replayable: the instance with a full-horizon deviation block (truthful after the deviated prefix).
        Deviation full = f.deviation;
        for (RoundIndex t = full.approvals.size(); t < inst.horizon(); ++t)
                full.approvals.push_back(inst.rounds()[t].approvals[f.voter]);
        j["instance"] = json::parse(serialize_instance(inst, rule_json(rule), full));
        return j;
}

inline json verdict_json(const Instance& inst, const AnyRule& rule, const PropertyVerdict& v) {
        json j = json::object();
        j["property"] = property_name(v.property);
        j["holds"] = v.holds;
        j["exhaustive"] = v.exhaustive;
        j["candidates"] = v.candidates;
        if (v.witness)
                j["witness"] = finding_json(inst, rule, *v.witness);
        return j;
}

inline json caps_json(const Caps& c) {
        json j = json::object();
        j["groups"] = c.groups;
        j["strategies"] = c.strategies;
        return j;
}

inline json group_json(VoterGroup g) {
        json arr = json::array();
        for (VoterId v : g.members())
                arr.push_back(voter_label(v));
        return arr;
}

inline json audit_json(const AuditReport& r) {
        json rows = json::array();
        for (const auto& row : r.rows) {
                json j = json::object();
                j["group"] = group_json(row.group);
                j["level"] = row.level;
                j["bound"] = row.bound;
                j["achieved"] = row.achieved;
                if (row.witness)
                        j["witness"] = voter_label(*row.witness);
                j["pass"] = row.pass;
                rows.push_back(j);
        }
        json j = json::object();
        j["axiom"] = axiom_name(r.axiom);
        j["pass"] = r.pass;
        j["failures"] = r.failures();
        j["rows"] = rows;
        return j;
}

inline json pom_json(const Instance& inst, const AnyRule& rule, const PomReport& r) {
        json rows = json::array();
        for (const PomRow& row : r.rows) {
                json j = json::object();
                j["group"] = group_json(row.group);
                j["level"] = row.level;
                j["jr_bound"] = row.jr_bound;
                j["pjr_bound"] = row.pjr_bound;
                j["truthful_satisfaction"] = row.truthful_satisfaction;
                j["manipulated_satisfaction"] = row.manipulated_satisfaction;
                j["contains_manipulator"] = row.contains_manipulator;
                j["jr_ok"] = row.jr_ok;
                j["pjr_floor"] = row.pjr_floor ? json(*row.pjr_floor) : json(nullptr);
                j["pjr_floor_ok"] = row.pjr_floor_ok;
                j["ratio"] = row.ratio.to_string();
                rows.push_back(j);
        }
        json j = json::object();
        j["manipulator"] = voter_label(r.finding.voter);
        j["finding"] = finding_json(inst, rule, r.finding);
        j["min_ratio"] = r.min_ratio.to_string();
        j["jr_violations"] = r.jr_violations;
        j["pjr_floor_violations"] = r.pjr_floor_violations;
        j["rows"] = rows;
        return j;
}

inline json header(const std::string& command, const Options& o) {
        json j = json::object();
        j["command"] = command;
        j["seed"] = o.seeds.empty() ? json(nullptr) : json(o.seeds);
        j["caps"] = caps_json(o.caps);
        return j;
}

class Output {
public:
        Output(const Options& o, std::ostream& fallback) : path_(o.out), fallback_(fallback) {}
        void write(const std::string& text) {
                if (path_.empty()) {
                        fallback_ << text;
                        return;
                }
                std::ofstream f(path_, std::ios::binary);
                if (!f)
                        throw std::runtime_error("cannot write '" + path_ + "'");
                f << text;
        }
        void write(const json& doc) { write(doc.dump(2) + "\n"); }

private:
        std::string path_;
        std::ostream& fallback_;
};

inline int cmd_run(const Options& o, Output& out) {
        json doc = header("run", o);
        json results = json::array();
        for (const Source& src : sources(o)) {
                const Instance& inst = src.file.instance;
                const AnyRule rule = resolve_rule(o, src);
                const OutcomeSequence outcome = run(rule, inst);
                json r = json::object();
                r["source"] = src.label;
                r["rule"] = rule_json(rule);
                r["winners"] = winners_json(inst, outcome);
                r["satisfaction"] = satisfaction_json(inst, outcome);
                r["trace"] = trace_json(rule, inst);
                if (src.file.deviation) {
                        const ManipulationFinding f = evaluate_deviation(rule, inst, *src.file.deviation);
                        const Instance declared = with_deviation(inst, *src.file.deviation);
                        json d = json::object();
                        d["voter"] = voter_label(f.voter);
                        d["winners"] = winners_json(inst, f.deviated);
                        d["satisfaction"] = satisfaction_json(inst, f.deviated);
                        d["trace"] = trace_json(rule, declared);
                        d["truthful_satisfaction"] = f.truthful_satisfaction;
                        d["deviated_satisfaction"] = f.deviated_satisfaction;
                        r["deviation"] = d;
                }
                results.push_back(r);
        }
        doc["results"] = results;
        out.write(doc);
        return kOk;
}

inline int cmd_audit(const Options& o, Output& out) {
        std::vector<Axiom> axioms;
        if (o.axiom == "all")
                axioms.assign(kAllAxioms.begin(), kAllAxioms.end());
        else
                axioms.push_back(parse_axiom(o.axiom));
        json doc = header("audit", o);
        json results = json::array();
        bool pass = true;
        for (const Source& src : sources(o)) {
                const AnyRule rule = resolve_rule(o, src);
                const OutcomeSequence outcome = run(rule, src.file.instance);
                json r = json::object();
                r["source"] = src.label;
                r["rule"] = rule_json(rule);
                json reports = json::array();
                for (Axiom a : axioms) {
                        AuditReport rep = audit(a, src.file.instance, outcome, o.caps.groups);
                        pass = pass && rep.pass;
                        reports.push_back(audit_json(rep));
                }
                r["reports"] = reports;
                results.push_back(r);
        }
        doc["pass"] = pass;
        doc["results"] = results;
        out.write(doc);
        return pass ? kOk : kViolation;
}

inline int cmd_check(const Options& o, Output& out) {
        if (o.property.empty())
                throw std::invalid_argument("check needs --property");
        const Property p = parse_property(o.property);
        json doc = header("check", o);
        json verdicts = json::array();
        bool holds = true;
        std::size_t violated = 0;
        for (const Source& src : sources(o)) {
                const AnyRule rule = resolve_rule(o, src);
                const PropertyVerdict v = check_property(p, rule, src.file.instance, o.caps);
                holds = holds && v.holds;
                violated += v.holds ? 0 : 1;
                json j = verdict_json(src.file.instance, rule, v);
                j["source"] = src.label;
                verdicts.push_back(j);
        }
        doc["property"] = property_name(p);
        doc["holds"] = holds;
        doc["instances"] = verdicts.size();
        doc["violated"] = violated;
        doc["verdicts"] = verdicts;
        out.write(doc);
        return holds ? kOk : kViolation;
}

inline int cmd_manipulate(const Options& o, Output& out) {
        json doc = header("manipulate", o);
        json verdicts = json::array();
        bool holds = true;
        for (const Source& src : sources(o)) {
                const AnyRule rule = resolve_rule(o, src);
                std::optional<VoterId> only;
                if (!o.voter.empty())
                        only = parse_voter_label(o.voter, src.file.instance.voters());
                const PropertyVerdict v = find_sp_violation(rule, src.file.instance, o.caps, only);
                holds = holds && v.holds;
                json j = verdict_json(src.file.instance, rule, v);
                j["source"] = src.label;
                verdicts.push_back(j);
        }
        doc["holds"] = holds;
        doc["verdicts"] = verdicts;
        out.write(doc);
        return holds ? kOk : kViolation;
}

inline int cmd_pom(const Options& o, Output& out) {
        json doc = header("pom", o);
        json results = json::array();
        std::size_t jr = 0, pjr = 0;
        for (const Source& src : sources(o)) {
                const AnyRule rule = resolve_rule(o, src);
                json reports = json::array();
                for (const PomReport& r : pom_report(rule, src.file.instance, o.caps)) {
                        jr += r.jr_violations;
                        pjr += r.pjr_floor_violations;
                        reports.push_back(pom_json(src.file.instance, rule, r));
                }
                json j = json::object();
                j["source"] = src.label;
                j["rule"] = rule_json(rule);
                j["reports"] = reports;
                results.push_back(j);
        }
        doc["jr_violations"] = jr;
        doc["pjr_floor_violations"] = pjr;
        doc["results"] = results;
        out.write(doc);
        return jr + pjr == 0 ? kOk : kViolation;
}

inline int cmd_converge(const Options& o, Output& out) {
        const Rational fraction = Rational::parse(o.fraction);
        const auto points = tsd_convergence(o.n, fraction, o.q_max, o.caps.groups);
        bool ok = true;
        for (const auto& p : points)
                ok = ok && p.ratio >= Rational(static_cast<Rational::int_type>(p.q), static_cast<Rational::int_type>(p.q + 1));
        out.write(convergence_csv(points));
        return ok ? kOk : kViolation;
}

inline int cmd_gen(const Options& o, Output& out) {
        if (o.seeds.empty())
                throw std::invalid_argument("gen needs --seeds N");
        const SeedRange r = parse_seeds(o.seeds);
        if (r.first != r.last)
                throw std::invalid_argument("gen takes a single seed");
        out.write(serialize_instance(generate_random(o.n, o.t, o.max_alts, r.first)));
        return kOk;
}

inline int cmd_fixtures(const Options& o, Output& out) {
        if (!o.extract.empty()) {
                auto f = find_fixture(o.extract);
                if (!f)
                        throw std::invalid_argument("unknown fixture '" + o.extract + "'");
                out.write(f->text());
                return kOk;
        }
        std::string list;
        for (const Fixture& f : builtin_fixtures())
                list += f.name + "\t" + f.summary + "\n";
        out.write(list);
        return kOk;
}

} // namespace detail

/// Entry point shared by the executable and the tests. args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
        detail::Options o;
        CLI::App app{"Online temporal voting: rules, proportionality audits, manipulation search"};
        app.require_subcommand(1);

        auto add_rule = [&](CLI::App* c) { c->add_option("--rule", o.rule, "Rule name (av, greedyjr, unit-gain, reset-grow, mes, phragmen, phragmen-oracle, tsd, irrelevant-dictator, wam)"); };
        auto add_source = [&](CLI::App* c) {
                c->add_option("--instance", o.instance, "Bundled fixture name or instance file path");
                c->add_option("--seeds", o.seeds, "Seed or inclusive range A..B of random instances");
                c->add_option("--n", o.n, "Voters for random instances");
                c->add_option("--t", o.t, "Rounds for random instances");
                c->add_option("--max-alts", o.max_alts, "Maximum alternatives per round for random instances");
        };
        auto add_caps = [&](CLI::App* c) {
                c->add_option("--cap-groups", o.caps.groups, "Maximum voters for 2^n group enumeration");
                c->add_option("--cap-strategies", o.caps.strategies, "Maximum strategy-space size");
        };
        auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Write the report here instead of stdout"); };

        CLI::App* run = app.add_subcommand("run", "Run a rule and print outcomes, satisfaction and state trace");
        add_rule(run); add_source(run); add_caps(run); add_out(run);
        CLI::App* aud = app.add_subcommand("audit", "Audit JR/PJR/EJR and weak forms");
        add_rule(aud); add_source(aud); add_caps(aud); add_out(aud);
        aud->add_option("--axiom", o.axiom, "jr, pjr, ejr, wjr, wpjr, wejr or all");
        CLI::App* chk = app.add_subcommand("check", "Check a strategic property on instances");
        add_rule(chk); add_source(chk); add_caps(chk); add_out(chk);
        chk->add_option("--property", o.property, "sp, osp, prefix-osp, oiia, oiia-addition, monotonicity")->required();
        CLI::App* man = app.add_subcommand("manipulate", "Search for a strictly improving deviation");
        add_rule(man); add_source(man); add_caps(man); add_out(man);
        man->add_option("--voter", o.voter, "Restrict the search to one voter (v1..vn)");
        CLI::App* pom = app.add_subcommand("pom", "Price-of-manipulability reports for every improving deviation");
        add_rule(pom); add_source(pom); add_caps(pom); add_out(pom);
        CLI::App* conv = app.add_subcommand("converge", "Serial-dictator convergence series as CSV");
        conv->add_option("--n", o.n, "Voters");
        conv->add_option("--q-max", o.q_max, "Largest cycle count q");
        conv->add_option("--fraction", o.fraction, "Group size as a fraction of n");
        add_caps(conv); add_out(conv);
        CLI::App* gen = app.add_subcommand("gen", "Write a random instance");
        gen->add_option("--seeds", o.seeds, "Seed")->required();
        gen->add_option("--n", o.n, "Voters");
        gen->add_option("--t", o.t, "Rounds");
        gen->add_option("--max-alts", o.max_alts, "Maximum alternatives per round");
        add_out(gen);
        CLI::App* fix = app.add_subcommand("fixtures", "List or extract bundled fixtures");
        fix->add_option("--extract", o.extract, "Fixture to print as an instance file");
        add_out(fix);

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
                app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
                out << app.help();
                return kOk;
        } catch (const CLI::ParseError& e) {
                std::ostringstream msg;
                app.exit(e, msg, msg);
                err << msg.str();
                return e.get_exit_code() == 0 ? kOk : kUsage;
        }

        detail::Output sink(o, out);
        try {
                if (*run) return detail::cmd_run(o, sink);
                if (*aud) return detail::cmd_audit(o, sink);
                if (*chk) return detail::cmd_check(o, sink);
                if (*man) return detail::cmd_manipulate(o, sink);
                if (*pom) return detail::cmd_pom(o, sink);
                if (*conv) return detail::cmd_converge(o, sink);
                if (*gen) return detail::cmd_gen(o, sink);
                if (*fix) return detail::cmd_fixtures(o, sink);
        } catch (const CapExceeded& e) {
                err << "error: " << e.what() << " (raise --cap-groups/--cap-strategies or use a smaller instance)\n";
                return kUsage;
        } catch (const std::exception& e) {
                err << "error: " << e.what() << "\n";
                return kUsage;
        }
        return kUsage;
}

} // namespace tempvote::cli
