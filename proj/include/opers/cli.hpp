#pragma once

// JSON job runner behind the `opers` command-line tool. Kept out of opers.hpp
// so the numerical headers do not pull in the JSON dependency.

#include "opers/opers.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace opers::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

// Input error tied to a JSON pointer into the job document.
struct JobError : invalid_input {
    std::string pointer;
    JobError(std::string ptr, const std::string& msg)
        : invalid_input((ptr.empty() ? std::string("job") : ptr) + ": " + msg), pointer(std::move(ptr)) {}
};

enum class Status : int { pass = 0, fail = 1, invalid = 2 };

struct JobSpec {
    std::string command;
    std::string corner;          // empty when the command has no corner
    json parameter;              // q or eps; null when absent
    json twist, momenta;         // scalar arrays
    json lambda_roots, lambda_coeffs;
    std::string level;           // verify-rankone constructor: q, eps, rational
    std::string mode;            // eps-level frame: tCM or rRS
    std::string source, target;  // limit edge
    json R;                      // limit scale sequence
    json point;                  // verify-rankone explicit CM point
    std::string trig_form = "euler";  // verify-bethe on trigonometric frames
    double tol = 1e-10;
    std::uint64_t seed = 0;
    int starts = 0;
    std::string frames = "identity";
    std::string arithmetic = "float";
    std::string output = "json";

    bool exact() const { return arithmetic == "exact"; }
};

struct Report {
    json doc;
    Status status = Status::pass;
    std::string csv;  // filled when output == "csv"
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"lax",  "solve",  "verify-qq", "verify-bethe", "verify-rankone",
                                            "mirror", "bispectral", "limit"};
    return c;
}

// ---------------------------------------------------------------------------
// Scalars

namespace detail {

inline std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
inline std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

// "3", "-2/5", "0.125", "1e-3", "2.5E+2" as an exact rational.
inline Rational parse_rational(std::string s, const std::string& ptr) {
    auto bad = [&] { return JobError(ptr, "cannot read '" + s + "' as a number"); };
    if (s.empty()) throw bad();
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const Rational n = parse_rational(s.substr(0, slash), ptr), d = parse_rational(s.substr(slash + 1), ptr);
        if (d == 0) throw JobError(ptr, "zero denominator in '" + s + "'");
        return n / d;
    }
    bool negative = false;
    std::size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        pos = 1;
    }
    boost::multiprecision::cpp_int mantissa = 0;
    long exponent = 0;
    bool digits = false, dot = false;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            digits = true;
            if (dot) --exponent;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!digits) throw bad();
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') throw bad();
        const std::string e = s.substr(pos + 1);
        std::size_t used = 0;
        long ev = 0;
        try {
            ev = std::stol(e, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != e.size() || std::labs(ev) > 4000) throw bad();
        exponent += ev;
    }
    Rational r(mantissa);
    const boost::multiprecision::cpp_int ten = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                          static_cast<unsigned>(std::labs(exponent)));
    r = exponent >= 0 ? r * Rational(ten) : r / Rational(ten);
    return negative ? Rational(-r) : r;
}

// JSON numbers are read through their shortest decimal form, so 0.4 is 2/5 in
// exact mode.
inline Rational real_part(const json& j, const std::string& ptr) {
    if (j.is_number_integer() || j.is_number_unsigned() || j.is_number_float()) {
        if (j.is_number_float() && !std::isfinite(j.get<double>())) throw JobError(ptr, "non-finite number");
        return parse_rational(j.dump(), ptr);
    }
    if (j.is_string()) return parse_rational(j.get<std::string>(), ptr);
    throw JobError(ptr, "expected a number or a numeric string");
}

template <class S>
S scalar(const json& j, const std::string& ptr) {
    ExactComplex z;
    if (j.is_array()) {
        if (j.size() != 2) throw JobError(ptr, "complex numbers are written [re, im]");
        z = ExactComplex(real_part(j[0], child(ptr, 0)), real_part(j[1], child(ptr, 1)));
    } else {
        z = ExactComplex(real_part(j, ptr));
    }
    if constexpr (is_exact_v<S>) return z;
    else return to_complex(z);
}

template <class S>
std::vector<S> vector_of(const json& j, const std::string& ptr) {
    if (!j.is_array()) throw JobError(ptr, "expected an array of numbers");
    std::vector<S> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar<S>(j[i], child(ptr, i)));
    return out;
}

inline std::string rational_text(const Rational& r) { return r.str(); }

// adding 0.0 turns -0.0 into 0.0
inline json emit(const Complex& z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }
inline json emit(const ExactComplex& z) {
    return json::array({rational_text(z.real()), rational_text(z.imag())});
}

template <class S>
json emit(const std::vector<S>& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back(emit(z));
    return out;
}

template <class S>
json emit(const Poly<S>& p) {
    return emit(p.coeffs());
}

template <class S>
json emit(const DenseMatrix<S>& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(emit(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

template <class S>
DenseMatrix<S> matrix_of(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) throw JobError(ptr, "expected a non-empty array of rows");
    const std::size_t n = j.size();
    DenseMatrix<S> m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = vector_of<S>(j[i], child(ptr, i));
        if (row.size() != n) throw JobError(child(ptr, i), "matrix must be square");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
    }
    return m;
}

// Pass/fail records; every verdict carries the number it was decided on.
struct Checks {
    json list = json::array();
    bool all = true;

    void add(const std::string& name, double value, double tol, bool passed) {
        list.push_back({{"name", name}, {"value", value}, {"tol", tol}, {"passed", passed}});
        all = all && passed;
    }
    void below(const std::string& name, double value, double tol) {
        add(name, value, tol, std::isfinite(value) && value <= tol);
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// JobSpec <-> JSON

inline JobSpec parse_job(const json& doc) {
    if (!doc.is_object()) throw JobError("", "the job must be a JSON object");
    JobSpec job;
    auto text = [](const json& v, const std::string& ptr) {
        if (!v.is_string()) throw JobError(ptr, "expected a string");
        return v.get<std::string>();
    };
    auto read_option = [&](const std::string& key, const json& v, const std::string& ptr) {
        if (key == "tol") {
            if (!v.is_number()) throw JobError(ptr, "expected a number");
            job.tol = v.get<double>();
            if (!(job.tol > 0) || !std::isfinite(job.tol)) throw JobError(ptr, "tol must be positive");
        } else if (key == "seed") {
            if (!v.is_number_integer() || v.get<long long>() < 0) throw JobError(ptr, "seed must be a non-negative integer");
            job.seed = v.get<std::uint64_t>();
        } else if (key == "starts") {
            if (!v.is_number_integer() || v.get<long long>() < 0) throw JobError(ptr, "starts must be a non-negative integer (0 = auto)");
            job.starts = v.get<int>();
        } else if (key == "frames") {
            job.frames = text(v, ptr);
            if (job.frames != "identity" && job.frames != "all") throw JobError(ptr, "frames is 'identity' or 'all'");
        } else if (key == "arithmetic") {
            job.arithmetic = text(v, ptr);
            if (job.arithmetic != "float" && job.arithmetic != "exact") throw JobError(ptr, "arithmetic is 'float' or 'exact'");
        } else if (key == "output") {
            job.output = text(v, ptr);
            if (job.output != "json" && job.output != "csv") throw JobError(ptr, "output is 'json' or 'csv'");
        } else if (key == "trig_form") {
            job.trig_form = text(v, ptr);
            if (job.trig_form != "euler" && job.trig_form != "printed") throw JobError(ptr, "trig_form is 'euler' or 'printed'");
        } else {
            return false;
        }
        return true;
    };

    for (const auto& [key, v] : doc.items()) {
        const std::string ptr = "/" + key;
        if (key == "command") {
            job.command = text(v, ptr);
            if (std::find(commands().begin(), commands().end(), job.command) == commands().end())
                throw JobError(ptr, "unknown command '" + job.command + "'");
        } else if (key == "corner") {
            job.corner = text(v, ptr);
            try {
                parse_corner(job.corner);
            } catch (const invalid_input& e) {
                throw JobError(ptr, e.what());
            }
        } else if (key == "q" || key == "eps" || key == "parameter") {
            if (!job.parameter.is_null()) throw JobError(ptr, "corner parameter given twice");
            job.parameter = v;
        } else if (key == "twist") job.twist = v;
        else if (key == "momenta") job.momenta = v;
        else if (key == "lambda_roots") job.lambda_roots = v;
        else if (key == "lambda_coeffs") job.lambda_coeffs = v;
        else if (key == "level") job.level = text(v, ptr);
        else if (key == "mode") job.mode = text(v, ptr);
        else if (key == "source") job.source = text(v, ptr);
        else if (key == "target") job.target = text(v, ptr);
        else if (key == "R") job.R = v;
        else if (key == "point") job.point = v;
        else if (key == "options") {
            if (!v.is_object()) throw JobError(ptr, "options must be an object");
            for (const auto& [k2, v2] : v.items())
                if (!read_option(k2, v2, ptr + "/" + k2)) throw JobError(ptr + "/" + k2, "unknown option");
        } else if (!read_option(key, v, ptr)) {
            throw JobError(ptr, "unknown field");
        }
    }
    if (job.command.empty()) throw JobError("/command", "missing; one of lax, solve, verify-qq, verify-bethe, "
                                                        "verify-rankone, mirror, bispectral, limit");
    return job;
}

inline json to_json(const JobSpec& job) {
    json j;
    j["command"] = job.command;
    if (!job.corner.empty()) j["corner"] = job.corner;
    if (!job.parameter.is_null()) {
        const bool eps = (!job.corner.empty() && parse_corner(job.corner) == CornerKind::EpsAdd) ||
                         job.command == "bispectral" || job.level == "eps";
        j[eps ? "eps" : (job.command == "limit" ? "parameter" : "q")] = job.parameter;
    }
    for (auto [key, value] : {std::pair<const char*, const json*>{"twist", &job.twist},
                              {"momenta", &job.momenta},
                              {"lambda_roots", &job.lambda_roots},
                              {"lambda_coeffs", &job.lambda_coeffs},
                              {"R", &job.R},
                              {"point", &job.point}})
        if (!value->is_null()) j[key] = *value;
    for (auto [key, value] : {std::pair<const char*, const std::string*>{"level", &job.level},
                              {"mode", &job.mode},
                              {"source", &job.source},
                              {"target", &job.target}})
        if (!value->empty()) j[key] = *value;
    j["options"] = {{"tol", job.tol},       {"seed", job.seed},     {"starts", job.starts},
                    {"frames", job.frames}, {"arithmetic", job.arithmetic}, {"output", job.output},
                    {"trig_form", job.trig_form}};
    return j;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline const json& require(const json& v, const char* key) {
    if (v.is_null()) throw JobError(std::string("/") + key, "required for this command");
    return v;
}

template <class S>
Corner<S> corner_of(const JobSpec& job) {
    if (job.corner.empty()) throw JobError("/corner", "required for this command");
    const CornerKind kind = parse_corner(job.corner);
    const bool shift = kind == CornerKind::QMult || kind == CornerKind::EpsAdd;
    if (!shift) {
        if (!job.parameter.is_null()) throw JobError("/q", "differential corners take no q or eps");
        return kind == CornerKind::RatDiff ? Corner<S>::rational() : Corner<S>::trigonometric();
    }
    const char* name = kind == CornerKind::QMult ? "q" : "eps";
    const S c = scalar<S>(require(job.parameter, name), std::string("/") + name);
    try {
        return kind == CornerKind::QMult ? Corner<S>::qmult(c) : Corner<S>::eps_add(c);
    } catch (const invalid_input& e) {
        throw JobError(std::string("/") + name, e.what());
    }
}

template <class S>
Frame<S> frame_of(const JobSpec& job) {
    const auto c = corner_of<S>(job);
    return Frame<S>::canonical(c, vector_of<S>(require(job.twist, "twist"), "/twist"),
                               vector_of<S>(require(job.momenta, "momenta"), "/momenta"));
}

inline void no_exact(const JobSpec& job) {
    if (job.exact()) throw JobError("/options/arithmetic", "exact arithmetic is not available for " + job.command);
}

template <class S>
double relative_gap(const Poly<S>& a, const Poly<S>& b) {
    return max_coeff_diff(a, b) / std::max(1.0, b.max_abs_coeff());
}

template <class S>
json lax_command(const JobSpec& job, Checks& checks) {
    const auto frame = frame_of<S>(job);
    const auto model = lax_for_corner(frame.corner, frame.twist, frame.momenta());
    const auto cp = char_poly(model.matrix);
    const auto h = hamiltonians(model);
    const auto w = full_determinant(frame);
    const double gap = relative_gap(cp, w);
    checks.below("spectral oracle: det(z - L) against the twisted Wronskian", gap, job.tol);
    json r;
    r["model"] = to_string(model.tag);
    r["matrix"] = emit(model.matrix);
    r["hamiltonians"] = emit(h);
    r["char_poly"] = emit(cp);
    r["wronskian_determinant"] = emit(w);
    r["spectral_residual"] = gap;
    r["warnings"] = model.warnings;
    return r;
}

template <class S>
json qq_command(const JobSpec& job, Checks& checks) {
    const auto frame = frame_of<S>(job);
    const auto d = qq_from_frame(frame);
    const auto res = qq_residual(d, frame.twist, frame.corner, QQOrientation::realized);
    json r;
    r["q_plus"] = json::array();
    r["q_minus"] = json::array();
    r["lambda"] = json::array();
    for (std::size_t k = 0; k < d.rank; ++k) {
        r["q_plus"].push_back(emit(d.q_plus[k]));
        r["q_minus"].push_back(emit(d.q_minus[k]));
        r["lambda"].push_back(emit(d.lambda[k]));
        checks.below("qq relation at node " + std::to_string(k + 1), res.relative[k], job.tol);
    }
    r["node_residuals"] = res.relative;
    r["max_residual"] = res.max_relative;
    return r;
}

template <class S>
json bethe_command(const JobSpec& job, Checks& checks) {
    const auto frame = frame_of<S>(job);
    const auto d = qq_from_frame(frame);
    const auto nd = nondegenerate(d, frame.twist, frame.corner);
    BetheOptions opt;
    opt.trig_form = job.trig_form == "printed" ? TrigBetheForm::printed : TrigBetheForm::euler_wronskian;
    json r;
    r["nondegenerate"] = nd.ok;
    r["flags"] = nd.violations;
    r["entries"] = json::array();
    std::size_t computed = 0;
    for (const auto& e : bethe_residual(d, frame.twist, frame.corner, opt)) {
        r["entries"].push_back({{"node", e.node},
                                {"root", emit(e.root)},
                                {"value", emit(e.value)},
                                {"relative", e.relative},
                                {"computed", e.computed},
                                {"note", e.note}});
        if (!e.computed) continue;
        ++computed;
        // degenerate data is flagged, not failed
        if (nd.ok)
            checks.below("Bethe equation at node " + std::to_string(e.node) + ", root " + opers::detail::describe(e.root), e.relative,
                         job.tol);
    }
    r["computed"] = computed;
    return r;
}

template <class S>
CMPoint<S> point_of(const JobSpec& job) {
    if (!job.point.is_null()) {
        const json& p = job.point;
        if (!p.is_object()) throw JobError("/point", "expected an object with level, M, T, u, v");
        auto field = [&](const char* key) -> const json& {
            if (!p.contains(key)) throw JobError(std::string("/point/") + key, "missing");
            return p.at(key);
        };
        CMPoint<S> pt;
        const std::string lv = field("level").is_string() ? field("level").template get<std::string>() : "";
        if (lv == "q") pt.level = CMLevel::q;
        else if (lv == "eps") pt.level = CMLevel::eps;
        else if (lv == "rational") pt.level = CMLevel::rational;
        else throw JobError("/point/level", "level is q, eps or rational");
        pt.M = matrix_of<S>(field("M"), "/point/M");
        pt.T = matrix_of<S>(field("T"), "/point/T");
        pt.u = vector_of<S>(field("u"), "/point/u");
        pt.v = vector_of<S>(field("v"), "/point/v");
        pt.deformation = pt.level == CMLevel::rational ? S(0) : scalar<S>(field("deformation"), "/point/deformation");
        if (pt.T.rows() != pt.M.rows() || pt.u.size() != pt.M.rows() || pt.v.size() != pt.M.rows())
            throw JobError("/point", "M, T, u, v sizes disagree");
        return pt;
    }
    const auto twist = vector_of<S>(require(job.twist, "twist"), "/twist");
    const auto p = vector_of<S>(require(job.momenta, "momenta"), "/momenta");
    if (job.level == "q") return build_T_from_diag(twist, p, scalar<S>(require(job.parameter, "q"), "/q"));
    if (job.level == "eps") {
        if (job.mode != "tCM" && job.mode != "rRS") throw JobError("/mode", "eps level needs mode tCM or rRS");
        return epsilon_level(job.mode == "tCM" ? EpsMode::tCM : EpsMode::rRS,
                             scalar<S>(require(job.parameter, "eps"), "/eps"), twist, p);
    }
    if (job.level == "rational") return rational_level(twist, p);
    throw JobError("/level", "give level q, eps or rational, or an explicit point");
}

template <class S>
json rankone_command(const JobSpec& job, Checks& checks) {
    const auto pt = point_of<S>(job);
    const double res = rank_one_residual(pt);
    checks.below("rank-one residual", res, job.tol);
    json r;
    r["level"] = to_string(pt.level);
    r["M"] = emit(pt.M);
    r["T"] = emit(pt.T);
    r["u"] = emit(pt.u);
    r["v"] = emit(pt.v);
    r["residual"] = res;
    return r;
}

inline json solution_json(const MomentumSolution& s) {
    json bethe = json::array();
    for (const auto& node : s.bethe_roots) bethe.push_back(emit(node));
    return {{"p", emit(s.p)},
            {"residual", s.residual},
            {"relation_residual", s.relation_residual},
            {"degenerate", s.degenerate},
            {"flags", s.flags},
            {"bethe_roots", bethe},
            {"origin", s.origin}};
}

inline SolveConfig config_of(const JobSpec& job) {
    SolveConfig cfg;
    cfg.seed = job.seed;
    cfg.starts = job.starts;
    cfg.tol = std::max(job.tol, 1e-14);
    cfg.frame_sweep = job.frames == "all";
    return cfg;
}

template <class S>
std::vector<S> singularities_of(const JobSpec& job) {
    if (!job.lambda_roots.is_null() && !job.lambda_coeffs.is_null())
        throw JobError("/lambda_coeffs", "give lambda_roots or lambda_coeffs, not both");
    if (!job.lambda_roots.is_null()) return vector_of<S>(job.lambda_roots, "/lambda_roots");
    if (job.lambda_coeffs.is_null()) throw JobError("/lambda_roots", "required (or lambda_coeffs)");
    if constexpr (is_exact_v<S>) {
        throw JobError("/lambda_coeffs", "exact mode needs lambda_roots");
    } else {
        const Poly<Complex> lam(vector_of<Complex>(job.lambda_coeffs, "/lambda_coeffs"));
        try {
            return singularity_roots(lam);
        } catch (const invalid_input& e) {
            throw JobError("/lambda_coeffs", e.what());
        }
    }
}

inline std::string csv_number(const Complex& z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << "," << z.imag();
    return os.str();
}
inline std::string csv_number(const ExactComplex& z) {
    return rational_text(z.real()) + "," + rational_text(z.imag());
}

inline json solve_float(const JobSpec& job, Checks& checks, std::string& csv) {
    const auto corner = corner_of<Complex>(job);
    const auto twist = vector_of<Complex>(require(job.twist, "twist"), "/twist");
    const auto a = singularities_of<Complex>(job);
    const auto rep = solve_momenta(corner, twist, a, config_of(job));
    json r;
    r["singularities"] = emit(rep.a);
    r["solutions"] = json::array();
    for (const auto& s : rep.solutions) r["solutions"].push_back(solution_json(s));
    r["stats"] = {{"starts", rep.stats.starts},
                  {"homotopy_paths", rep.stats.homotopy_paths},
                  {"paths_converged", rep.stats.paths_converged},
                  {"newton_converged", rep.stats.newton_converged},
                  {"iterations", rep.stats.iterations},
                  {"dedupe_radius", rep.stats.dedupe_radius}};
    const auto& c = rep.certification;
    r["certification"] = {{"attempted", c.attempted}, {"conclusive", c.conclusive}, {"complete", c.complete},
                          {"method", c.method},       {"oracle_count", c.oracle_count},
                          {"recovered", c.recovered}, {"note", c.note}};
    r["frames"] = json::array();
    for (const auto& f : rep.frames) {
        json sols = json::array();
        for (const auto& s : f.solutions) sols.push_back(solution_json(s));
        r["frames"].push_back({{"perm", f.perm}, {"solutions", sols}});
    }
    r["warnings"] = rep.warnings;

    checks.add("solutions found", static_cast<double>(rep.solutions.size()), 1.0, !rep.solutions.empty());
    double worst = 0;
    for (const auto& s : rep.solutions) worst = std::max({worst, s.residual, s.relation_residual});
    checks.below("max solution residual", worst, config_of(job).tol);
    if (c.attempted && c.conclusive)
        checks.add("oracle solution count", static_cast<double>(c.oracle_count),
                   static_cast<double>(rep.solutions.size()), c.oracle_count == rep.solutions.size());

    std::ostringstream os;
    os << "index";
    for (std::size_t i = 0; i < twist.size(); ++i) os << ",p" << i + 1 << "_re,p" << i + 1 << "_im";
    os << ",residual,relation_residual,degenerate\n";
    for (std::size_t k = 0; k < rep.solutions.size(); ++k) {
        const auto& s = rep.solutions[k];
        os << k;
        for (auto z : s.p) os << "," << csv_number(z);
        os << "," << s.residual << "," << s.relation_residual << "," << (s.degenerate ? 1 : 0) << "\n";
    }
    csv = os.str();
    return r;
}

inline json solve_exact(const JobSpec& job, Checks& checks, std::string& csv) {
    const auto corner = corner_of<ExactComplex>(job);
    const auto twist = vector_of<ExactComplex>(require(job.twist, "twist"), "/twist");
    const auto a = singularities_of<ExactComplex>(job);
    if (twist.size() > 2) throw JobError("/twist", "exact solving supports N <= 2");
    const auto res = solve_momenta_exact(corner, twist, a);
    const auto rel = energy_relation(corner, twist, a);
    json r;
    r["conclusive"] = res.conclusive;
    r["exact_roots"] = res.exact_roots;
    r["note"] = res.note;
    r["solutions"] = json::array();
    std::ostringstream os;
    os << "index";
    for (std::size_t i = 0; i < twist.size(); ++i) os << ",p" << i + 1 << "_re,p" << i + 1 << "_im";
    os << ",residual\n";
    for (std::size_t k = 0; k < res.solutions.size(); ++k) {
        const auto& p = res.solutions[k];
        const double resid = rel.relative_residual(p);
        r["solutions"].push_back({{"p", emit(p)}, {"residual", resid}});
        checks.add("exact residual of solution " + std::to_string(k), resid, 0.0,
                   res.exact_roots ? resid == 0.0 : resid < 1e-12);
        os << k;
        for (const auto& z : p) os << "," << csv_number(z);
        os << "," << resid << "\n";
    }
    checks.add("elimination conclusive", res.conclusive ? 1.0 : 0.0, 1.0, res.conclusive);
    csv = os.str();
    return r;
}

inline json mirror_command(const JobSpec& job, Checks& checks) {
    no_exact(job);
    const auto corner = corner_of<Complex>(job);
    const auto twist = vector_of<Complex>(require(job.twist, "twist"), "/twist");
    const auto a = singularities_of<Complex>(job);
    const auto rec = mirror_check(corner, twist, a, config_of(job), std::max(job.tol, 1e-8));
    json r;
    r["primal_count"] = rec.primal_count;
    r["dual_count"] = rec.dual_count;
    r["bijection"] = rec.bijection;
    r["dual_resonant"] = rec.dual_resonant;
    r["primal"] = json::array();
    for (const auto& s : rec.primal.solutions) r["primal"].push_back(emit(s.p));
    r["dual"] = json::array();
    for (const auto& s : rec.dual.solutions) r["dual"].push_back(emit(s.p));
    r["pairs"] = json::array();
    for (const auto& p : rec.pairs)
        r["pairs"].push_back({{"primal", p.primal},
                              {"dual", p.dual},
                              {"predicted", emit(p.predicted)},
                              {"mismatch", p.mismatch},
                              {"rank_one", p.rank_one}});
    r["notes"] = rec.notes;
    checks.add("solution counts agree", static_cast<double>(rec.dual_count), static_cast<double>(rec.primal_count),
               rec.primal_count == rec.dual_count);
    checks.add("bijection", rec.bijection ? 1.0 : 0.0, 1.0, rec.bijection);
    checks.below("max momentum mismatch", rec.pairs.empty() ? 0.0 : rec.max_mismatch, std::max(job.tol, 1e-8));
    checks.below("max rank-one residual", rec.max_rank_one, std::max(job.tol, 1e-8));
    return r;
}

inline json bispectral_command(const JobSpec& job, Checks& checks) {
    no_exact(job);
    if (job.mode != "tCM" && job.mode != "rRS") throw JobError("/mode", "bispectral needs mode tCM or rRS");
    const Complex eps = scalar<Complex>(require(job.parameter, "eps"), "/eps");
    const auto twist = vector_of<Complex>(require(job.twist, "twist"), "/twist");
    const auto p = vector_of<Complex>(require(job.momenta, "momenta"), "/momenta");
    const double tol = std::max(job.tol, 1e-8);
    const auto rec = bispectral_check(eps, job.mode == "tCM" ? EpsMode::tCM : EpsMode::rRS, twist, p, tol);
    json r;
    r["degenerate"] = rec.degenerate;
    r["rrs"] = {{"twist", emit(rec.rrs_twist)}, {"momenta", emit(rec.rrs_momenta)}};
    r["tcm"] = {{"twist", emit(rec.tcm_twist)}, {"momenta", emit(rec.tcm_momenta)}};
    r["rrs_cross_residual"] = rec.rrs_cross;
    r["tcm_cross_residual"] = rec.tcm_cross;
    r["rank_one"] = rec.rank_one;
    r["notes"] = rec.notes;
    checks.add("diagonalizable dual frame", rec.degenerate ? 0.0 : 1.0, 1.0, !rec.degenerate);
    if (!rec.degenerate) {
        checks.below("rRS Hamiltonians vs tCM spectrum", rec.rrs_cross, tol);
        checks.below("tCM Hamiltonians vs rRS spectrum", rec.tcm_cross, tol);
        checks.below("rank-one residual", rec.rank_one, tol);
    }
    return r;
}

inline json limit_command(const JobSpec& job, Checks& checks) {
    no_exact(job);
    if (job.source.empty()) throw JobError("/source", "required for limit");
    if (job.target.empty()) throw JobError("/target", "required for limit");
    CornerKind source, target;
    try {
        source = parse_corner(job.source);
    } catch (const invalid_input& e) {
        throw JobError("/source", e.what());
    }
    try {
        target = parse_corner(job.target);
    } catch (const invalid_input& e) {
        throw JobError("/target", e.what());
    }
    if (!limit_supported(source, target)) throw JobError("/target", "unsupported limit edge");
    LimitData data;
    data.twist = vector_of<Complex>(require(job.twist, "twist"), "/twist");
    data.momenta = vector_of<Complex>(require(job.momenta, "momenta"), "/momenta");
    if (!job.parameter.is_null()) data.parameter = scalar<Complex>(job.parameter, "/parameter");
    std::vector<double> R{1e-3, 1e-4};
    if (!job.R.is_null()) {
        R.clear();
        for (const auto& z : vector_of<Complex>(job.R, "/R")) R.push_back(z.real());
    }
    const auto rep = limit_check(source, target, data, R);
    json r;
    r["R"] = rep.R;
    r["deviation"] = rep.deviation;
    r["order"] = rep.order;
    r["min_order"] = rep.min_order;
    r["roundoff_dominated"] = rep.roundoff_dominated;
    r["notes"] = rep.notes;
    checks.add("convergence order >= 0.9", rep.min_order, 0.9, rep.min_order >= 0.9);
    checks.add("deviation above roundoff", rep.roundoff_dominated ? 1.0 : 0.0, 0.0, !rep.roundoff_dominated);
    return r;
}

}  // namespace detail

// Runs a parsed job. Input errors surface as JobError / invalid_input.
inline Report run(const JobSpec& job) {
    using namespace detail;
    const auto t0 = std::chrono::steady_clock::now();
    Checks checks;
    Report rep;
    json results;
    const bool ex = job.exact();
    if (job.output == "csv" && job.command != "solve")
        throw JobError("/options/output", "csv output is available for solution tables (command solve) only");

    if (job.command == "lax") results = ex ? lax_command<ExactComplex>(job, checks) : lax_command<Complex>(job, checks);
    else if (job.command == "verify-qq") results = ex ? qq_command<ExactComplex>(job, checks) : qq_command<Complex>(job, checks);
    else if (job.command == "verify-bethe")
        results = ex ? bethe_command<ExactComplex>(job, checks) : bethe_command<Complex>(job, checks);
    else if (job.command == "verify-rankone")
        results = ex ? rankone_command<ExactComplex>(job, checks) : rankone_command<Complex>(job, checks);
    else if (job.command == "solve") results = ex ? solve_exact(job, checks, rep.csv) : solve_float(job, checks, rep.csv);
    else if (job.command == "mirror") results = mirror_command(job, checks);
    else if (job.command == "bispectral") results = bispectral_command(job, checks);
    else if (job.command == "limit") results = limit_command(job, checks);
    else throw JobError("/command", "unknown command '" + job.command + "'");

    rep.doc["job"] = to_json(job);
    rep.doc["results"] = std::move(results);
    rep.doc["checks"] = checks.list;
    rep.doc["passed"] = checks.all;
    rep.doc["metadata"] = {
        {"program", "opers"},
        {"version", kVersion},
        {"arithmetic", job.arithmetic},
        {"qq_orientation", to_string(QQOrientation::realized)},
        {"trig_bethe_form",
         job.command == "verify-bethe" ? (job.trig_form == "printed" ? to_string(TrigBetheForm::printed)
                                                                     : to_string(TrigBetheForm::euler_wronskian))
                                       : to_string(TrigBetheForm::euler_wronskian)},
        {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    rep.status = checks.all ? Status::pass : Status::fail;
    return rep;
}

inline Report invalid_report(const std::string& pointer, const std::string& message, const json& job = nullptr) {
    Report rep;
    rep.status = Status::invalid;
    if (!job.is_null()) rep.doc["job"] = job;
    rep.doc["error"] = {{"pointer", pointer}, {"message", message}};
    rep.doc["passed"] = false;
    rep.doc["metadata"] = {{"program", "opers"}, {"version", kVersion}};
    return rep;
}

// Parse + run with every input problem mapped to status 2.
inline Report run_json(const json& doc) {
    try {
        return run(parse_job(doc));
    } catch (const JobError& e) {
        return invalid_report(e.pointer, e.what(), doc);
    } catch (const invalid_input& e) {
        return invalid_report("", e.what(), doc);
    } catch (const std::domain_error& e) {
        return invalid_report("", std::string("degenerate parameters: ") + e.what(), doc);
    }
}

inline Report run_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        return invalid_report("", std::string("malformed JSON: ") + e.what());
    }
    return run_json(doc);
}

}  // namespace opers::cli
