// Command-line front end: run a named verification suite for one prime and
// emit the report as JSON or text, optionally comparing against a golden
// report (timings normalized away).
//
// Exit status: 0 all checks pass, 1 a check failed or the golden comparison
// differs, 2 configuration or budget errors.
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "su4check/report.hpp"
#include "su4check/suites.hpp"

namespace {

using namespace su4check;

int run_one(const std::string& suite, int prime, const SuiteConfig& cfg,
            const std::string& format, const std::string& golden_path,
            const std::string& out_path) {
    std::vector<SuiteReport> reports;
    auto needs_p5 = [&](const std::string& name) {
        if (prime == 3) {
            std::cerr << "suite '" << name
                      << "' asserts claims that require p >= 5; run the structure-oracle suite "
                         "at p = 3 instead\n";
            return true;
        }
        return false;
    };
    try {
        if (suite == "structure" || suite == "all") {
            if (suite != "all" && needs_p5("structure")) return 2;
            if (prime != 3) reports.push_back(run_structure(prime, cfg));
        }
        if (suite == "omega4" || suite == "all") {
            if (suite != "all" && needs_p5("omega4")) return 2;
            if (prime != 3) reports.push_back(run_omega4(prime, cfg));
        }
        if (suite == "outer-order" || suite == "all") {
            if (suite != "all" && needs_p5("outer-order")) return 2;
            if (prime != 3) reports.push_back(run_outer_order(prime, cfg));
        }
        if (suite == "essential" || suite == "all") {
            reports.push_back(run_essential(prime, cfg));
        }
        if (suite == "lifts" || suite == "all") {
            if (suite != "all" && needs_p5("lifts")) return 2;
            if (prime != 3) reports.push_back(run_lifts(prime, cfg));
        }
        if (suite == "counting" || suite == "all") {
            if (suite != "all" && needs_p5("counting")) return 2;
            if (prime != 3) reports.push_back(run_counting(prime, cfg));
        }
        if (suite == "sp4" || (suite == "all" && prime == 5)) {
            if (suite == "sp4" && prime != 5) {
                std::cerr << "the sp4 suite is within budget at p = 5 only\n";
                return 2;
            }
            if (prime == 5) reports.push_back(run_sp4(prime, cfg));
        }
        if (suite == "structure-oracle") {
            if (prime != 3) {
                std::cerr << "the structure-oracle suite records the p = 3 baseline only\n";
                return 2;
            }
            reports.push_back(run_structure_oracle(prime, cfg));
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << " (partial count " << e.partial_count
                  << ")\n";
        return 2;
    }
    if (reports.empty()) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return 2;
    }

    bool all_pass = true;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    std::string text;
    for (const auto& rep : reports) {
        all_pass = all_pass && rep.pass();
        out.push_back(report_to_json(rep));
        text += report_to_text(rep);
    }
    std::string payload =
        format == "json" ? (reports.size() == 1 ? out[0].dump(2) : out.dump(2)) + "\n" : text;
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "cannot open output file " << out_path << "\n";
            return 2;
        }
        f << payload;
    } else {
        std::cout << payload;
    }

    if (!golden_path.empty()) {
        std::ifstream f(golden_path);
        if (!f) {
            std::cerr << "cannot open golden file " << golden_path << "\n";
            return 2;
        }
        nlohmann::ordered_json golden;
        try {
            golden = nlohmann::ordered_json::parse(f);
        } catch (...) {
            std::cerr << "golden file is not valid JSON\n";
            return 2;
        }
        nlohmann::ordered_json mine = reports.size() == 1 ? out[0] : out;
        if (!reports_equal_modulo_timestamps(mine, golden)) {
            std::cerr << "golden comparison FAILED\n";
            return 1;
        }
        std::cerr << "golden comparison ok\n";
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"structural verification suites for the Sylow p-subgroup of SU4(p)"};
    int prime = 5;
    std::string suite = "all";
    std::string format = "json";
    std::string golden_path, out_path;
    su4check::SuiteConfig cfg;

    app.add_option("--prime", prime, "prime p (3, 5, 7, 11 or 13)")->required();
    app.add_option("--suite", suite,
                   "structure | omega4 | outer-order | essential | lifts | counting | sp4 | "
                   "structure-oracle | all");
    app.add_option("--format", format, "json | text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--max-order-exp", cfg.max_order_exp,
                   "essential scan lower bound exponent (2, 3 or 4)");
    app.add_option("--budget-elements", cfg.element_budget, "closure element budget");
    app.add_option("--golden", golden_path, "golden report to compare against (ms-normalized)");
    app.add_option("--out", out_path, "write the report here instead of stdout");
    CLI11_PARSE(app, argc, argv);

    if (!su4check::is_small_odd_prime(prime)) {
        std::cerr << "unsupported prime " << prime << "\n";
        return 2;
    }
    if (cfg.max_order_exp != 0 && (cfg.max_order_exp < 2 || cfg.max_order_exp > 4)) {
        std::cerr << "--max-order-exp must be 2, 3 or 4\n";
        return 2;
    }
    try {
        return run_one(suite, prime, cfg, format, golden_path, out_path);
    } catch (const su4check::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
