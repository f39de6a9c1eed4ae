#include "opers/cli.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <regex>

namespace {

using opers::cli::json;

// One list token from the command line: plain numbers stay numbers, "2/5"
// stays a string (read exactly later), "1.5+2i" / "-3i" become [re, im].
json token_value(const std::string& tok) {
    static const std::regex complex_re(R"(^([-+]?[0-9./eE]+)?([-+][0-9./eE]*)i$|^([-+]?[0-9./eE]*)i$)");
    std::smatch m;
    if (std::regex_match(tok, m, complex_re)) {
        std::string re = "0", im;
        if (m[3].matched) {
            im = m[3].str();
        } else {
            if (m[1].matched) re = m[1].str();
            im = m[2].str();
        }
        if (im.empty() || im == "+") im = "1";
        if (im == "-") im = "-1";
        return json::array({re, im});
    }
    if (json::accept(tok)) {
        json v = json::parse(tok);
        if (v.is_number()) return v;
    }
    return tok;
}

json list_value(const std::string& text) {
    json out = json::array();
    std::string tok;
    for (char c : text + ",") {
        if (c == ',') {
            if (!tok.empty()) out.push_back(token_value(tok));
            tok.clear();
        } else if (c != ' ') {
            tok += c;
        }
    }
    return out;
}

// Writes through a temporary file in the same directory and renames it over
// the destination.
void write_atomically(const std::string& path, const std::string& text) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twisted opers, Lax matrices and Calogero-Moser points from JSON jobs", "opers"};
    app.set_version_flag("--version", opers::cli::kVersion);

    std::string command, job_path, out_path;
    std::string corner, q, eps, twist, momenta, lambda_roots, lambda_coeffs, level, mode, source, target, R;
    std::string frames, output, trig_form;
    double tol = 0;
    long long seed = -1;
    int starts = -1;
    bool exact = false;

    app.add_option("command", command, "lax | solve | verify-qq | verify-bethe | verify-rankone | mirror | bispectral | limit");
    app.add_option("--job", job_path, "JobSpec JSON file ('-' for stdin); wins over flags");
    app.add_option("--out", out_path, "write the report to this file instead of stdout");
    app.add_option("--corner", corner, "q/tRS, eps/tCM, trig/rRS, rational/rCM");
    app.add_option("--q", q, "multiplicative deformation q");
    app.add_option("--eps", eps, "additive shift eps");
    app.add_option("--twist", twist, "comma-separated twist entries");
    app.add_option("--momenta", momenta, "comma-separated momenta");
    app.add_option("--lambda-roots", lambda_roots, "comma-separated roots of Lambda");
    app.add_option("--lambda-coeffs", lambda_coeffs, "comma-separated ascending coefficients of Lambda");
    app.add_option("--level", level, "verify-rankone level: q, eps or rational");
    app.add_option("--mode", mode, "eps-level frame: tCM or rRS");
    app.add_option("--source", source, "limit: source corner");
    app.add_option("--target", target, "limit: target corner");
    app.add_option("--R", R, "limit: comma-separated scales");
    app.add_option("--tol", tol, "verdict tolerance (default 1e-10)");
    app.add_option("--seed", seed, "solver seed (default 0)");
    app.add_option("--starts", starts, "random Newton starts (default: automatic)");
    app.add_option("--frames", frames, "identity or all");
    app.add_flag("--exact", exact, "exact rational arithmetic");
    app.add_option("--output", output, "json or csv");
    app.add_option("--trig-form", trig_form, "verify-bethe on trigonometric frames: euler or printed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    opers::cli::Report report;
    std::string output_format = output.empty() ? "json" : output;
    if (!job_path.empty() || command.empty()) {
        std::string text;
        if (job_path.empty() || job_path == "-") {
            text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
        } else {
            std::ifstream in(job_path);
            if (!in) {
                std::cerr << "opers: cannot read job file " << job_path << "\n";
                return 2;
            }
            text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        }
        report = opers::cli::run_text(text);
        if (report.doc.contains("job") && report.doc["job"].contains("options") &&
            report.doc["job"]["options"].contains("output"))
            output_format = report.doc["job"]["options"]["output"].get<std::string>();
    } else {
        json job;
        job["command"] = command;
        if (!corner.empty()) job["corner"] = corner;
        if (!q.empty()) job["q"] = token_value(q);
        if (!eps.empty()) job["eps"] = token_value(eps);
        for (auto [key, value] : {std::pair<const char*, std::string*>{"twist", &twist},
                                  {"momenta", &momenta},
                                  {"lambda_roots", &lambda_roots},
                                  {"lambda_coeffs", &lambda_coeffs},
                                  {"R", &R}})
            if (!value->empty()) job[key] = list_value(*value);
        for (auto [key, value] : {std::pair<const char*, std::string*>{"level", &level},
                                  {"mode", &mode},
                                  {"source", &source},
                                  {"target", &target},
                                  {"frames", &frames},
                                  {"output", &output},
                                  {"trig_form", &trig_form}})
            if (!value->empty()) job[key] = *value;
        if (tol != 0) job["tol"] = tol;
        if (seed >= 0) job["seed"] = seed;
        if (starts >= 0) job["starts"] = starts;
        if (exact) job["arithmetic"] = "exact";
        report = opers::cli::run_json(job);
    }

    std::string text;
    if (report.status != opers::cli::Status::invalid && output_format == "csv") text = report.csv;
    else text = report.doc.dump(2) + "\n";
    if (report.status == opers::cli::Status::invalid)
        std::cerr << "opers: " << report.doc["error"]["message"].get<std::string>() << "\n";

    try {
        if (out_path.empty()) std::cout << text;
        else write_atomically(out_path, text);
    } catch (const std::exception& e) {
        std::cerr << "opers: " << e.what() << "\n";
        return 2;
    }
    return static_cast<int>(report.status);
}
