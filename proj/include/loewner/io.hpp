#pragma once

// Control files, builtin controls, and report serialization.
//
// Controls travel as versioned JSON objects ({"schema": 1}).  Parsing is
// strict: unknown keys are rejected, every piece must be well formed, and
// the parsed control must pass full admissibility validation.  Dumps are
// canonical (sorted keys, shortest round-trip numbers), so equal controls
// serialize to byte-identical text and a stable content hash.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "loewner/errors.hpp"
#include "loewner/herglotz.hpp"
#include "loewner/integrate.hpp"
#include "loewner/optimize.hpp"
#include "loewner/pontryagin.hpp"
#include "loewner/schiffer.hpp"
#include "loewner/version.hpp"

namespace loewner {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j,
                       std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional,
                       const char* where) {
    if (!j.is_object())
        throw ValidationError(std::string(where) + " must be a JSON object");
    for (const char* k : required)
        if (!j.contains(k))
            throw ValidationError(std::string("missing key '") + k + "' in " +
                                  where);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : required) known = known || it.key() == k;
        for (const char* k : optional) known = known || it.key() == k;
        if (!known)
            throw ValidationError("unknown key '" + it.key() + "' in " + where);
    }
}

inline double get_number(const json& j, const char* key, const char* where) {
    if (!j.at(key).is_number())
        throw ValidationError(std::string("'") + key + "' in " + where +
                              " must be a number");
    return j.at(key).get<double>();
}

inline cx get_complex(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
        !j[1].is_number())
        throw ValidationError(std::string(where) +
                              " must be a [re, im] number pair");
    return cx{j[0].get<double>(), j[1].get<double>()};
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline double parse_double_arg(const std::string& s, const std::string& name) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError("bad numeric argument in '" + name + "'");
    }
    if (pos != s.size())
        throw ValidationError("bad numeric argument in '" + name + "'");
    return v;
}

inline std::uint64_t parse_seed_arg(const std::string& s,
                                    const std::string& name) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError("bad seed argument in '" + name + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ValidationError("bad seed argument in '" + name + "'");
    }
}

}  // namespace detail

inline json complex_to_json(cx v) { return json::array({v.real(), v.imag()}); }

inline json control_to_json(const DrivingControl& c,
                            const std::string& comment = "") {
    json out;
    out["schema"] = kSchemaVersion;
    if (!comment.empty()) out["comment"] = comment;
    out["horizon"] = c.horizon;
    out["breakpoints"] = c.breakpoints;
    json pieces = json::array();
    for (const auto& piece : c.pieces) {
        json p;
        if (const auto* v1 = std::get_if<ControlValue1>(&piece)) {
            json atoms = json::array();
            for (const auto& a : v1->atoms)
                atoms.push_back(
                    {{"kappa_arg", a.kappa_arg}, {"weight", a.weight}});
            p["atoms"] = atoms;
        } else {
            const auto& vn = std::get<ControlValueN>(piece);
            json terms = json::array();
            for (const auto& t : vn.terms)
                terms.push_back({{"alpha", json::array({t.deg1, t.deg2})},
                                 {"coeff", json::array({complex_to_json(t.coeff[0]),
                                                        complex_to_json(t.coeff[1])})}});
            p["poly"] = terms;
        }
        pieces.push_back(p);
    }
    out["pieces"] = pieces;
    return out;
}

inline DrivingControl control_from_json(const json& j) {
    detail::check_keys(j, {"schema", "horizon", "breakpoints", "pieces"},
                       {"comment"}, "control");
    if (!j["schema"].is_number_integer() ||
        j["schema"].get<int>() != kSchemaVersion)
        throw ValidationError("unsupported schema version");
    if (j.contains("comment") && !j["comment"].is_string())
        throw ValidationError("'comment' must be a string");

    DrivingControl c;
    c.horizon = detail::get_number(j, "horizon", "control");

    if (!j["breakpoints"].is_array() || j["breakpoints"].empty())
        throw ValidationError("'breakpoints' must be a nonempty array");
    c.breakpoints.clear();
    for (const auto& b : j["breakpoints"]) {
        if (!b.is_number())
            throw ValidationError("'breakpoints' must contain numbers");
        c.breakpoints.push_back(b.get<double>());
    }
    if (std::abs(c.breakpoints.front()) <= 1e-12) c.breakpoints.front() = 0.0;
    if (std::abs(c.breakpoints.back() - c.horizon) <= 1e-12)
        c.breakpoints.back() = c.horizon;

    if (!j["pieces"].is_array())
        throw ValidationError("'pieces' must be an array");
    for (std::size_t k = 0; k < j["pieces"].size(); ++k) {
        const json& p = j["pieces"][k];
        std::string where = "piece " + std::to_string(k);
        if (!p.is_object() || p.size() != 1 ||
            (!p.contains("atoms") && !p.contains("poly")))
            throw ValidationError(where +
                                  " must hold exactly one of 'atoms' or 'poly'");
        if (p.contains("atoms")) {
            if (!p["atoms"].is_array() || p["atoms"].empty())
                throw ValidationError("'atoms' in " + where +
                                      " must be a nonempty array");
            ControlValue1 v;
            for (const auto& a : p["atoms"]) {
                detail::check_keys(a, {"kappa_arg", "weight"}, {},
                                   ("atom in " + where).c_str());
                v.atoms.push_back({detail::get_number(a, "kappa_arg", "atom"),
                                   detail::get_number(a, "weight", "atom")});
            }
            c.pieces.push_back(v);
        } else {
            if (!p["poly"].is_array() || p["poly"].empty())
                throw ValidationError("'poly' in " + where +
                                      " must be a nonempty array");
            ControlValueN v;
            for (const auto& t : p["poly"]) {
                detail::check_keys(t, {"alpha", "coeff"}, {},
                                   ("term in " + where).c_str());
                if (!t["alpha"].is_array() || t["alpha"].size() != 2 ||
                    !t["alpha"][0].is_number_integer() ||
                    !t["alpha"][1].is_number_integer())
                    throw ValidationError("'alpha' in " + where +
                                          " must be an integer pair");
                if (!t["coeff"].is_array() || t["coeff"].size() != 2)
                    throw ValidationError("'coeff' in " + where +
                                          " must hold two complex entries");
                PolyTerm2 term;
                term.deg1 = t["alpha"][0].get<int>();
                term.deg2 = t["alpha"][1].get<int>();
                term.coeff = {detail::get_complex(t["coeff"][0], "coeff"),
                              detail::get_complex(t["coeff"][1], "coeff")};
                v.terms.push_back(term);
            }
            c.pieces.push_back(v);
        }
    }

    validate_control(c);
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return j;
}

inline DrivingControl load_control(const std::string& path) {
    return control_from_json(read_json_file(path));
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

inline void save_control(const std::string& path, const DrivingControl& c,
                         const std::string& comment = "") {
    write_text_file(path, control_to_json(c, comment).dump(2) + "\n");
}

// FNV-1a over the canonical dump; stable content reference for CSV rows.
inline std::string control_hash(const DrivingControl& c) {
    std::string s = control_to_json(c).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Named controls used by tests and demos.
//   koebe             constant atom at angle pi, weight 1, horizon 20
//   koebe-rotated:t   constant atom at angle pi - t, so the limit map is the
//                     Koebe map precomposed with the rotation e^{it}
//   rotating:w        80 quarter-length pieces sweeping angle w * midpoint
//   random:s          seeded draw, horizon in [2, 8], five pieces
inline DrivingControl builtin_control(const std::string& name) {
    std::size_t colon = name.find(':');
    std::string head = colon == std::string::npos ? name : name.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);

    auto constant_control = [](double angle, double horizon) {
        DrivingControl c;
        c.horizon = horizon;
        c.breakpoints = {0.0, horizon};
        c.pieces = {ControlValue1{{{angle, 1.0}}}};
        return c;
    };

    if (head == "koebe" && arg.empty())
        return constant_control(std::numbers::pi, 20.0);
    if (head == "koebe-rotated" && !arg.empty()) {
        double theta = detail::parse_double_arg(arg, name);
        return constant_control(std::numbers::pi - theta, 20.0);
    }
    if (head == "rotating" && !arg.empty()) {
        double omega = detail::parse_double_arg(arg, name);
        DrivingControl c;
        c.horizon = 20.0;
        c.breakpoints = {0.0};
        for (int k = 0; k < 80; ++k) {
            c.breakpoints.push_back(0.25 * (k + 1));
            c.pieces.push_back(
                ControlValue1{{{omega * 0.25 * (k + 0.5), 1.0}}});
        }
        c.breakpoints.back() = 20.0;
        return c;
    }
    if (head == "random" && !arg.empty()) {
        std::uint64_t seed = detail::parse_seed_arg(arg, name);
        Rng r(split_seed(seed, 0));
        double horizon = 2.0 + 6.0 * r.uniform();
        return random_control(1, horizon, 5, split_seed(seed, 1));
    }
    throw ValidationError("unknown builtin control '" + name + "'");
}

// --------------------------------------------------------------------------
// report serialization

inline json jet_to_json(const Jet1& a) {
    json coeffs = json::array();
    for (int k = 0; k <= a.order(); ++k) coeffs.push_back(complex_to_json(a.coeff(k)));
    return json{{"order", a.order()}, {"coefficients", coeffs}};
}

inline json limit_map_to_json(const LimitMap& f) {
    json j = jet_to_json(f.jet);
    j["horizon"] = f.horizon;
    j["tail_estimate"] = f.tail_estimate;
    return j;
}

inline json jet2_to_json(const Jet2Vec& a) {
    json coeffs = json::array();
    for (int total = 0; total <= a.order(); ++total)
        for (int i = total; i >= 0; --i) {
            int j = total - i;
            coeffs.push_back({{"alpha", json::array({i, j})},
                              {"x1", complex_to_json(a.x1.coeff(i, j))},
                              {"x2", complex_to_json(a.x2.coeff(i, j))}});
        }
    return json{{"order", a.order()}, {"coefficients", coeffs}};
}

inline json limit_map2_to_json(const LimitMap2& f) {
    json j = jet2_to_json(f.jet);
    j["horizon"] = f.horizon;
    j["tail_estimate"] = f.tail_estimate;
    return j;
}

inline json schiffer_report_to_json(const SchifferReport& r) {
    json residual = json::array();
    for (int k = r.residual.low(); k <= r.residual.high(); ++k)
        residual.push_back(complex_to_json(r.residual.coeff(k)));
    return json{{"target_index", r.target_index},
                {"effective_order", r.effective_order},
                {"residual_window_low", r.residual.low()},
                {"residual", residual},
                {"residual_norm", r.residual_norm},
                {"boundary_min", r.boundary_min},
                {"boundary_argmin", r.boundary_argmin},
                {"boundary_max_imag", r.boundary_max_imag},
                {"equation_ok", r.equation_ok},
                {"positivity_ok", r.positivity_ok},
                {"satisfied", r.satisfied()}};
}

inline json pmp_report_to_json(const PmpReport& r) {
    json samples = json::array();
    for (std::size_t i = 0; i < r.times.size(); ++i)
        samples.push_back({{"t", r.times[i]},
                           {"achieved", r.achieved[i]},
                           {"optimal", r.optimal[i]},
                           {"argmax", r.argmax[i]}});
    return json{{"target_index", r.target_index},
                {"max_gap", r.max_gap},
                {"samples", samples}};
}

inline std::string pmp_report_to_csv(const PmpReport& r) {
    std::string out = "t,achieved,optimal,gap,argmax\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        out += detail::fmt(r.times[i]) + ',' + detail::fmt(r.achieved[i]) +
               ',' + detail::fmt(r.optimal[i]) + ',' +
               detail::fmt(r.optimal[i] - r.achieved[i]) + ',' +
               detail::fmt(r.argmax[i]) + '\n';
    }
    return out;
}

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t";
    for (int k = 1; k <= traj.order; ++k) {
        out += ",re_c" + std::to_string(k) + ",im_c" + std::to_string(k);
    }
    out += '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += detail::fmt(traj.times[i]);
        for (int k = 1; k <= traj.order; ++k) {
            cx v = traj.jets[i].coeff(k);
            out += ',' + detail::fmt(v.real()) + ',' + detail::fmt(v.imag());
        }
        out += '\n';
    }
    return out;
}

inline json optimize_result_to_json(const OptimizeResult& r) {
    json history = json::array();
    for (const auto& trace : r.history) {
        json h = json::array();
        for (double v : trace.history) h.push_back(v);
        history.push_back(
            {{"restart", trace.restart}, {"value", trace.value}, {"history", h}});
    }
    json coeffs = json::array();
    for (cx v : r.best_coefficients) coeffs.push_back(complex_to_json(v));
    json out{{"best_value", r.best_value},
             {"constraint_violation", r.constraint_violation},
             {"best_control", control_to_json(r.best_control)},
             {"best_coefficients", coeffs},
             {"history", history}};
    if (r.pmp_gap_at_best) out["pmp_gap_at_best"] = *r.pmp_gap_at_best;
    if (r.schiffer_at_best)
        out["schiffer_at_best"] = schiffer_report_to_json(*r.schiffer_at_best);
    return out;
}

namespace detail {
inline std::string reachable_column(const ReachableSample& s, std::size_t t) {
    if (s.dimension == 1) return "a" + std::to_string(s.targets[t]);
    return "a_" + std::to_string(s.targets2[t][0]) + "_" +
           std::to_string(s.targets2[t][1]);
}
}  // namespace detail

inline json reachable_to_json(const ReachableSample& s) {
    std::size_t n_targets =
        s.dimension == 1 ? s.targets.size() : s.targets2.size();
    json max_abs = json::array();
    for (std::size_t t = 0; t < n_targets; ++t) {
        double m = 0.0;
        for (const auto& pt : s.points) m = std::max(m, std::abs(pt.values[t]));
        max_abs.push_back({{"target", detail::reachable_column(s, t)},
                           {"max_abs", m}});
    }
    return json{{"dimension", s.dimension},
                {"horizon", s.horizon},
                {"pieces", s.pieces},
                {"seed", s.seed},
                {"count", s.points.size()},
                {"max_abs", max_abs}};
}

inline std::string reachable_to_csv(const ReachableSample& s) {
    std::size_t n_targets =
        s.dimension == 1 ? s.targets.size() : s.targets2.size();
    std::string out = "id,control_hash";
    for (std::size_t t = 0; t < n_targets; ++t) {
        std::string col = detail::reachable_column(s, t);
        out += ",re_" + col + ",im_" + col;
    }
    out += '\n';
    for (const auto& pt : s.points) {
        DrivingControl c = random_control(
            s.dimension, s.horizon, s.pieces,
            split_seed(s.seed, static_cast<std::uint64_t>(pt.id)));
        out += std::to_string(pt.id) + ',' + control_hash(c);
        for (cx v : pt.values)
            out += ',' + detail::fmt(v.real()) + ',' + detail::fmt(v.imag());
        out += '\n';
    }
    return out;
}

inline json teichmueller_report_to_json(const TeichmuellerReport& r) {
    json samples = json::array();
    for (const auto& s : r.samples)
        samples.push_back({{"id", s.id},
                           {"feasibility", s.feasibility},
                           {"value", s.value},
                           {"feasible", s.feasible}});
    json lower = json::array();
    for (cx v : r.reference_lower) lower.push_back(complex_to_json(v));
    return json{{"target_index", r.target_index},
                {"horizon", r.horizon},
                {"pieces", r.pieces},
                {"reference_value", complex_to_json(r.reference_value)},
                {"reference_lower", lower},
                {"requested", r.requested},
                {"feasible", r.feasible},
                {"violations", r.violations},
                {"max_excess", r.max_excess},
                {"inconclusive", r.inconclusive},
                {"samples", samples}};
}

// Wrapper common to every CLI report: schema, tool version, and the echoed
// run configuration.
inline json report_envelope(const std::string& command, const json& config) {
    return json{{"schema", kSchemaVersion},
                {"tool_version", kVersion},
                {"command", command},
                {"config", config}};
}

}  // namespace loewner
