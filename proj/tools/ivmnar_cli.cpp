// ivmnar: simulate / identify / sensitivity / verify-counterexamples / catalog dump
#include "ivmnar/catalog.hpp"
#include "ivmnar/dataset.hpp"
#include "ivmnar/errors.hpp"
#include "ivmnar/fixtures.hpp"
#include "ivmnar/forward.hpp"
#include "ivmnar/identify.hpp"
#include "ivmnar/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace ivmnar;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kConditionViolated = 2;
constexpr int kNotIdentifiable = 3;
constexpr int kVerifyFailed = 4;

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::MechanismNotIdentifiable:
        case ErrorKind::NotIdentifiable:
        case ErrorKind::SidednessMismatch:
            return kNotIdentifiable;
        case ErrorKind::RegimeMismatch:
        case ErrorKind::PositivityViolated:
        case ErrorKind::DependenceViolated:
        case ErrorKind::InconsistentObservables:
        case ErrorKind::ZeroFirstStage:
        case ErrorKind::SingularSystem:
        case ErrorKind::NegativeOdds:
        case ErrorKind::NegativeStratumMass:
            return kConditionViolated;
        default:
            return kInputError;
    }
}

struct Common {
    std::uint64_t seed = 1;
    std::size_t n = 0;
    std::vector<std::string> mechanisms;
    bool oneSided = false;
    double tolDet = 1e-10;
    double tolProb = 1e-12;
    bool smooth = false;
    std::string out;
    Tolerances tol() const { return {tolDet, tolProb}; }
};

void add_tolerances(CLI::App* app, Common& c) {
    app->add_option("--tol-det", c.tolDet, "normalized-determinant threshold for dependence checks")->capture_default_str();
    app->add_option("--tol-prob", c.tolProb, "round-off band for probabilities")->capture_default_str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ParseError, "cannot write " + path);
    f << text;
}

template <class T> int print_identification(const std::string& mech, const ObservableDistribution<T>& obs, const Tolerances& tol,
                                            const std::string& out) {
    try {
        auto res = identify(mech, obs, tol);
        emit(result_to_json(res).dump(2) + "\n", out);
        return kOk;
    } catch (const Error& e) {
        json j = {{"mechanism", mech}, {"error", to_string(e.kind())}, {"detail", e.detail()}};
        if (e.kind() == ErrorKind::DependenceViolated) j["magnitude"] = e.magnitude();
        try {
            j["conditions"] = report_to_json(check_conditions(mech, obs, tol));
        } catch (const Error&) {
        }
        emit(j.dump(2) + "\n", out);
        std::cerr << "ivmnar: " << e.what() << "\n";
        return exit_code(e.kind());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identification of the complier average causal effect with missing treatment and/or outcome"};
    app.require_subcommand(1);
    Common c;

    // simulate
    auto* sim = app.add_subcommand("simulate", "exact observable table, or a sampled CSV dataset with --n");
    std::string simConfig;
    bool simFloat = false;
    sim->add_option("config", simConfig, "params JSON (mechanism, pZ, piU, outcomeLaw, responseD/responseY)")->required()->check(CLI::ExistingFile);
    sim->add_option("--n", c.n, "sample size; 0 prints the exact observable distribution");
    sim->add_option("--seed", c.seed, "64-bit seed for the sampler")->capture_default_str();
    sim->add_option("--mechanism", c.mechanisms, "override the config's mechanism");
    sim->add_flag("--float", simFloat, "print the exact table in binary64 instead of p/q");
    sim->add_option("-o,--out", c.out, "output file (default stdout)");

    // identify
    auto* idf = app.add_subcommand("identify", "identify the CACE under one mechanism");
    std::string dataPath, obsPath;
    bool exact = false;
    auto* dOpt = idf->add_option("--data", dataPath, "CSV dataset (header z,d,y)")->check(CLI::ExistingFile);
    idf->add_option("--observable", obsPath, "observable distribution JSON")->check(CLI::ExistingFile)->excludes(dOpt);
    idf->add_option("--mechanism", c.mechanisms, "mechanism id")->required();
    idf->add_flag("--one-sided", c.oneSided, "declare one-sided noncompliance");
    idf->add_flag("--smooth", c.smooth, "add 0.5 to every empirical cell");
    idf->add_flag("--exact", exact, "rational arithmetic for --observable input");
    idf->add_option("-o,--out", c.out, "output file (default stdout)");
    add_tolerances(idf, c);

    // sensitivity
    auto* sens = app.add_subcommand("sensitivity", "identify under several mechanisms and tabulate");
    std::string outFormat = "table";
    auto* sdOpt = sens->add_option("--data", dataPath, "CSV dataset (header z,d,y)")->check(CLI::ExistingFile);
    sens->add_option("--observable", obsPath, "observable distribution JSON")->check(CLI::ExistingFile)->excludes(sdOpt);
    sens->add_option("--mechanism", c.mechanisms, "mechanism id (repeatable); default: every identifiable mechanism");
    sens->add_flag("--one-sided", c.oneSided, "declare one-sided noncompliance");
    sens->add_flag("--smooth", c.smooth, "add 0.5 to every empirical cell");
    sens->add_option("--format", outFormat, "table | json | both")->check(CLI::IsMember({"table", "json", "both"}))->capture_default_str();
    sens->add_option("-o,--out", c.out, "output file (default stdout)");
    add_tolerances(sens, c);

    // verify-counterexamples
    auto* ver = app.add_subcommand("verify-counterexamples", "check every built-in counterexample in exact arithmetic");
    bool verJson = false;
    ver->add_flag("--json", verJson, "print the reports as JSON");

    // catalog dump
    auto* cat = app.add_subcommand("catalog", "mechanism catalog");
    cat->require_subcommand(1);
    auto* dump = cat->add_subcommand("dump", "print the full catalog");
    std::string catFormat = "table";
    dump->add_option("--format", catFormat, "table | json")->check(CLI::IsMember({"table", "json"}))->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            auto j = load_json(simConfig);
            if (!c.mechanisms.empty()) j["mechanism"] = c.mechanisms.back();
            if (c.n > 0) {
                auto cfg = params_config_from_json<double>(j);
                auto ds = sample_dataset(cfg.params, lookup(cfg.mechanism).spec, c.n, c.seed);
                emit(to_csv(ds), c.out);
            } else if (simFloat) {
                auto cfg = params_config_from_json<double>(j);
                emit(observable_to_json(forward_observable(cfg.params, lookup(cfg.mechanism).spec)).dump(2) + "\n", c.out);
            } else {
                auto cfg = params_config_from_json<Rational>(j);
                auto obs = forward_observable(cfg.params, lookup(cfg.mechanism).spec);
                json out = observable_to_json(obs);
                out["mechanism"] = cfg.mechanism;
                out["trueCace"] = number_to_json(true_cace(cfg.params));
                emit(out.dump(2) + "\n", c.out);
            }
            return kOk;
        }
        if (*idf) {
            if (dataPath.empty() == obsPath.empty()) throw Error(ErrorKind::ParseError, "give exactly one of --data / --observable");
            const auto& mech = c.mechanisms.back();
            if (!dataPath.empty()) {
                auto obs = empirical_observable(parse_dataset(dataPath), {c.oneSided, c.smooth, c.tolProb});
                return print_identification(mech, obs, c.tol(), c.out);
            }
            auto j = load_json(obsPath);
            if (c.oneSided) j["oneSided"] = true;
            if (exact) return print_identification(mech, observable_from_json<Rational>(j), c.tol(), c.out);
            return print_identification(mech, observable_from_json<double>(j), c.tol(), c.out);
        }
        if (*sens) {
            if (dataPath.empty() == obsPath.empty()) throw Error(ErrorKind::ParseError, "give exactly one of --data / --observable");
            if (c.mechanisms.empty())
                for (const auto& e : catalog())
                    if (e.spec.identifiable) c.mechanisms.push_back(e.spec.id);
            SensitivityReport rep;
            if (!dataPath.empty()) {
                rep = run_sensitivity(parse_dataset(dataPath), c.mechanisms, c.tol(), {c.oneSided, c.smooth, c.tolProb});
            } else {
                auto j = load_json(obsPath);
                if (c.oneSided) j["oneSided"] = true;
                rep = run_sensitivity(observable_from_json<double>(j), c.mechanisms, c.tol());
            }
            std::string text;
            if (outFormat != "json") text += sensitivity_table(rep);
            if (outFormat == "both") text += "\n";
            if (outFormat != "table") text += sensitivity_to_json(rep).dump(2) + "\n";
            emit(text, c.out);
            return kOk;
        }
        if (*ver) {
            bool ok = true;
            json all = json::array();
            if (!verJson)
                std::cout << std::left << std::setw(22) << "fixture" << std::setw(6) << "fwdA" << std::setw(6) << "fwdB" << std::setw(6)
                          << "cace" << std::setw(9) << "distinct" << std::setw(8) << "refused" << "caceA / caceB\n";
            for (const auto& f : builtin_fixtures()) {
                auto r = verify_fixture(f);
                ok &= r.all_pass();
                if (verJson) {
                    all.push_back(report_to_json(r));
                    continue;
                }
                auto yn = [](bool b) { return b ? "ok" : "FAIL"; };
                std::cout << std::setw(22) << f.id << std::setw(6) << yn(r.forwardA) << std::setw(6) << yn(r.forwardB) << std::setw(6)
                          << yn(r.caceMatch) << std::setw(9) << yn(r.distinct) << std::setw(8) << yn(r.refused)
                          << ivmnar::format(f.caceA) << " / " << ivmnar::format(f.caceB) << "\n";
                for (const auto& d : r.details) std::cout << "    " << d << "\n";
            }
            if (verJson) std::cout << all.dump(2) << "\n";
            else std::cout << (ok ? "all fixtures verified\n" : "FAILED\n");
            return ok ? kOk : kVerifyFailed;
        }
        if (*dump) {
            if (catFormat == "json") {
                std::cout << catalog_to_json().dump(2) << "\n";
                return kOk;
            }
            std::cout << std::left << std::setw(12) << "id" << std::setw(14) << "regime" << std::setw(10) << "R^D<-" << std::setw(10)
                      << "R^Y<-" << std::setw(13) << "sidedness" << std::setw(6) << "id?" << std::setw(22) << "joint" << std::setw(45)
                      << "recipe" << "citation\n";
            for (const auto& e : catalog()) {
                auto j = catalog_entry_to_json(e);
                std::cout << std::setw(12) << e.spec.id << std::setw(14) << to_string(e.spec.regime) << std::setw(10)
                          << j["rdParents"].get<std::string>() << std::setw(10) << j["ryParents"].get<std::string>() << std::setw(13)
                          << to_string(e.spec.sidednessRequired) << std::setw(6) << (e.spec.identifiable ? "yes" : "no")
                          << std::setw(22) << j["joint"].get<std::string>() << std::setw(45) << recipe_string(e) << e.proofAnchor
                          << (e.fixtureId.empty() ? "" : " [" + e.fixtureId + "]") << "\n";
                for (const auto& p : e.spec.positivityCells) std::cout << "    positivity: " << p.label << "\n";
                for (const auto& d : e.spec.dependenceChecks) std::cout << "    dependence: " << d.label << "\n";
            }
            return kOk;
        }
    } catch (const Error& e) {
        std::cerr << "ivmnar: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "ivmnar: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}
