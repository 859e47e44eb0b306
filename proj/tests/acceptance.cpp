// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "support.hpp"

#include "ivmnar/dataset.hpp"
#include "ivmnar/fixtures.hpp"
#include "ivmnar/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include <unistd.h>

using namespace ivmnar;
using namespace ivmnar::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;  // keep the first failure
        pass = false;
    }
};

bool refused(const std::function<void()>& f, std::string* what = nullptr) {
    try {
        f();
    } catch (const Error& e) {
        if (what) *what = e.what();
        return e.kind() == ErrorKind::MechanismNotIdentifiable || e.kind() == ErrorKind::SidednessMismatch ||
               e.kind() == ErrorKind::NotIdentifiable;
    }
    return false;
}

// 1. fixtures
Outcome c1() {
    Outcome o;
    auto t0 = Clock::now();
    const auto& fx = builtin_fixtures();
    if (fx.size() != 14) o.fail("expected 14 fixtures, found " + std::to_string(fx.size()));
    for (const auto& f : fx) {
        auto r = verify_fixture(f);
        if (!r.all_pass()) o.fail(f.id + ": " + (r.details.empty() ? r.refusal : r.details.front()));
    }
    double s = seconds_since(t0);
    if (s >= 5) o.fail("took " + std::to_string(s) + " s");
    if (o.pass) o.detail = std::to_string(fx.size()) + " fixtures in " + format(s) + " s";
    return o;
}

// 2. round trip, exact and float
Outcome c2() {
    Outcome o;
    auto t0 = Clock::now();
    const int draws = 200;
    std::size_t total = 0, rejected = 0;
    double worst = 0;
    auto mechs = identifiable_entries();
    if (mechs.size() != 37) o.fail("expected 37 identifiable mechanisms, found " + std::to_string(mechs.size()));
    for (const auto* e : mechs) {
        Rng g(std::hash<std::string>{}(e->spec.id));
        int got = 0, tries = 0;
        while (got < draws && tries < 50 * draws) {
            ++tries;
            DrawOptions d;
            d.oneSided = pick_one_sided(e->spec, g);
            d.ny = pick_ny(*e, d.oneSided, g);
            auto p = random_params(e->spec, g, d);
            auto exactObs = forward_observable(p, e->spec);
            auto floatObs = to_float(exactObs);
            if (!usable(p, e->spec, floatObs, 0.05)) {
                ++rejected;
                continue;
            }
            ++got;
            Rational want = true_cace(p);
            try {
                auto rx = identify(e->spec.id, exactObs);
                if (rx.cace != want) o.fail(e->spec.id + ": exact " + format(rx.cace) + " != " + format(want));
                auto rf = identify(e->spec.id, floatObs);
                double err = std::fabs(rf.cace - want.convert_to<double>());
                worst = std::max(worst, err);
                if (!(err < 1e-9)) o.fail(e->spec.id + ": float error " + format(err));
            } catch (const Error& err) {
                o.fail(e->spec.id + ": " + err.what());
            }
        }
        total += static_cast<std::size_t>(got);
        if (got < draws) o.fail(e->spec.id + ": only " + std::to_string(got) + " usable draws");
    }
    double s = seconds_since(t0);
    if (s >= 60) o.fail("took " + std::to_string(s) + " s");
    if (o.pass)
        o.detail = std::to_string(total) + " draws (" + std::to_string(rejected) + " redrawn), max float error " + format(worst) + ", " +
                   format(s) + " s";
    return o;
}

// 3. full response reduces to Wald
Outcome c3() {
    Outcome o;
    const char* ids[] = {"1ZD", "1UD", "1DY", "1UY", "2ZY", "2UD", "2ZD", "1UD(+)2UD", "1ZD+2ZD", "1Y(+)2ZU"};
    Rng g(303);
    int n = 0;
    for (const char* id : ids) {
        const auto& e = lookup(id);
        int got = 0, tries = 0;
        while (got < 10 && tries++ < 1000) {
            DrawOptions d;
            d.oneSided = pick_one_sided(e.spec, g);
            d.responsesOne = true;
            auto p = random_params(e.spec, g, d);
            auto obs = forward_observable(p, e.spec);
            if (!check_conditions(id, obs).all_pass()) continue;
            ++got;
            ++n;
            Rational wald = wald_cace(complete_observable(p));
            try {
                Rational c = identify(id, obs).cace;
                if (c != wald) o.fail(std::string(id) + ": " + format(c) + " != Wald " + format(wald));
            } catch (const Error& err) {
                o.fail(std::string(id) + ": " + err.what());
            }
        }
    }
    if (n != 100) o.fail("ran " + std::to_string(n) + " draws");
    if (o.pass) o.detail = "100 draws over 10 mechanisms, exact";
    return o;
}

// 4. refusals
Outcome c4() {
    Outcome o;
    Rng g(404);
    int count = 0;
    auto expect_refusal = [&](const std::string& what, const std::function<void()>& f) {
        ++count;
        std::string msg;
        if (!refused(f, &msg)) o.fail(what + " was not refused" + (msg.empty() ? "" : " (" + msg + ")"));
    };
    for (int i = 0; i < 10; ++i) {
        for (const char* id : {"1DY", "1ZY"}) {
            DrawOptions d;
            d.oneSided = true;
            auto p = random_params(lookup(id).spec, g, d);
            auto obs = forward_observable(p, lookup(id).spec);
            expect_refusal(std::string(id) + " one-sided", [&] { identify(id, obs); });
        }
        DrawOptions d;
        d.oneSided = false;
        auto p = random_params(lookup("2ZU").spec, g, d);
        auto obs = forward_observable(p, lookup("2ZU").spec);
        expect_refusal("2ZU two-sided", [&] { identify("2ZU", obs); });
    }
    int unid = 0;
    for (const auto& e : catalog()) {
        if (e.spec.identifiable) continue;
        ++unid;
        for (bool one : {false, true}) {
            DrawOptions d;
            d.oneSided = one;
            auto p = random_params(e.spec, g, d);
            auto obs = forward_observable(p, e.spec);
            expect_refusal(e.spec.id, [&] { identify(e.spec.id, obs); });
            expect_refusal(e.spec.id + " (float)", [&] { identify(e.spec.id, to_float(obs)); });
        }
    }
    if (unid != 15) o.fail("expected 15 unidentifiable ids, found " + std::to_string(unid));
    for (const auto& f : builtin_fixtures()) expect_refusal(f.id, [&] { identify(f.mechanism, f.observables); });
    if (o.pass) o.detail = std::to_string(count) + " inputs refused";
    return o;
}

// 5. independence makes the dependence check fail with a ~0 magnitude
Outcome c5() {
    Outcome o;
    const char* ids[] = {"1DY",       "1ZY",       "1Y",        "2ZD",       "2ZU",       "1DY(+)2UD", "1ZY(+)2UD",
                         "1DY+2ZD",   "1ZY+2ZD",   "1DY(+)2Z",  "1ZY(+)2Z",  "1Z(+)2ZD",  "1D(+)2ZD",  "1Y(+)2ZD",
                         "1Z(+)2ZU",  "1D(+)2ZU",  "1Y(+)2ZU",  "1DY",       "2ZD",       "1ZY"};
    Rng g(505);
    double worst = 0;
    for (const char* id : ids) {
        const auto& m = lookup(id).spec;
        DrawOptions d;
        d.oneSided = pick_one_sided(m, g);
        auto p = random_params(m, g, d);
        // every stratum gets the same outcome law: Y is independent of everything
        auto law = p.outcomeLaw[static_cast<int>(Stratum::C0)];
        for (auto& l : p.outcomeLaw)
            if (!l.empty()) l = law;
        auto obs = to_float(forward_observable(p, m));
        try {
            identify(id, obs);
            o.fail(std::string(id) + ": identified");
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DependenceViolated) o.fail(std::string(id) + ": " + e.what());
            else if (!(e.magnitude() < 1e-12)) o.fail(std::string(id) + ": magnitude " + format(e.magnitude()));
            worst = std::max(worst, e.magnitude());
        }
    }
    if (o.pass) o.detail = "20 cases, max magnitude " + format(worst);
    return o;
}

// 6. joint recovery
Outcome c6() {
    Outcome o;
    using Key = std::tuple<int, int, int, int>;
    auto as_map = [](const JointLaw<Rational>& j) {
        std::map<Key, Rational> m;
        for (const auto& x : j) m[{x.z, x.u, x.d, x.y}] += x.prob;
        std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
        return m;
    };
    Rng g(606);
    int matched = 0, refusedN = 0;
    for (const char* id : {"MCAR-Y", "MCAR-D", "1ZD", "1DY", "1ZY", "2ZY", "2DY", "2ZD", "2ZU"}) {
        const auto& e = lookup(id);
        for (int i = 0; i < 20; ++i) {
            DrawOptions d;
            d.oneSided = pick_one_sided(e.spec, g);
            d.ny = pick_ny(e, d.oneSided, g);
            auto p = random_params(e.spec, g, d);
            auto obs = forward_observable(p, e.spec);
            if (!check_conditions(id, obs).all_pass()) {
                --i;
                continue;
            }
            auto jr = recover_joint(id, obs);
            if (!jr.joint) o.fail(std::string(id) + ": " + jr.reason);
            else if (as_map(*jr.joint) != as_map(structural_joint(p))) o.fail(std::string(id) + ": joint differs");
            else ++matched;
        }
    }
    for (auto [id, one] : {std::pair{"1UY", false}, {"1UY", true}, {"2UY", false}}) {
        for (int i = 0; i < 5; ++i) {
            DrawOptions d;
            d.oneSided = one;
            auto p = random_params(lookup(id).spec, g, d);
            auto jr = recover_joint(id, forward_observable(p, lookup(id).spec));
            if (jr.joint) o.fail(std::string(id) + (one ? " one-sided" : " two-sided") + ": joint returned");
            else ++refusedN;
        }
    }
    if (o.pass) o.detail = std::to_string(matched) + " joints recovered, " + std::to_string(refusedN) + " correctly not recoverable";
    return o;
}

StructuralParams<double> c7_params() {
    return params_config_from_json<double>(load_json(fs::path(IVMNAR_DATA_DIR) / "configs" / "1ud-one-sided.json")).params;
}

double plug_in_1ud(const StructuralParams<double>& p, std::uint64_t seed) {
    auto ds = sample_dataset(p, lookup("1UD").spec, 1000000, seed);
    return identify("1UD", empirical_observable(ds, {true, false, 1e-12})).cace;
}

// 7. 1UD plug-in estimator
Outcome c7() {
    Outcome o;
    auto t0 = Clock::now();
    auto p = c7_params();
    const double truth = true_cace(p);
    int close = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        try {
            double d = std::fabs(plug_in_1ud(p, seed) - truth);
            worst = std::max(worst, d);
            if (d < 0.02) ++close;
        } catch (const Error& e) {
            o.fail("seed " + std::to_string(seed) + ": " + e.what());
        }
    }
    double s = seconds_since(t0);
    if (close < 95) o.fail(std::to_string(close) + "/100 seeds within 0.02");
    if (s >= 120) o.fail("took " + std::to_string(s) + " s");
    if (o.pass) o.detail = std::to_string(close) + "/100 within 0.02, max |error| " + format(worst) + ", " + format(s) + " s";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run(const std::string& cmd) { return std::system((cmd + " 2>/dev/null").c_str()); }

// complete-case Wald straight from the records
double complete_case_wald(const Dataset& ds) {
    double n[2] = {0, 0}, sy[2] = {0, 0}, sd[2] = {0, 0};
    for (const auto& r : ds.records) {
        if (!r.d || !r.y) continue;
        n[r.z] += 1;
        sy[r.z] += *r.y;
        sd[r.z] += *r.d;
    }
    return (sy[1] / n[1] - sy[0] / n[0]) / (sd[1] / n[1] - sd[0] / n[0]);
}

// 8. CLI pipeline
Outcome c8() {
    Outcome o;
    const std::uint64_t seed = 7;
    fs::path dir = fs::temp_directory_path() / ("ivmnar-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = IVMNAR_CLI_PATH;
    const std::string cfg = (fs::path(IVMNAR_DATA_DIR) / "configs" / "1ud-one-sided.json").string();
    const auto csv = dir / "data.csv", csv2 = dir / "data2.csv", out1 = dir / "s1.json", out2 = dir / "s2.json";
    auto sim = [&](const fs::path& to) {
        return run(cli + " simulate " + cfg + " --n 1000000 --seed " + std::to_string(seed) + " -o " + to.string());
    };
    auto sens = [&](const fs::path& to) {
        return run(cli + " sensitivity --data " + csv.string() +
                   " --mechanism MCAR-Y --mechanism 1ZD --mechanism 1UD --one-sided --format json -o " + to.string());
    };
    if (sim(csv) != 0 || sim(csv2) != 0) o.fail("simulate failed");
    else if (sens(out1) != 0 || sens(out2) != 0) o.fail("sensitivity failed");
    else {
        if (slurp(csv) != slurp(csv2)) o.fail("simulate is not deterministic");
        if (slurp(out1) != slurp(out2)) o.fail("sensitivity is not deterministic");
        auto p = c7_params();
        auto ds = parse_dataset(csv);
        if (to_csv(sample_dataset(p, lookup("1UD").spec, 1000000, seed)) != slurp(csv)) o.fail("CLI CSV differs from the library sampler");
        auto j = load_json(out1);
        std::map<std::string, json> byId;
        for (const auto& e : j.at("entries")) byId[e.at("mechanism").get<std::string>()] = e;
        for (const char* id : {"MCAR-Y", "1ZD", "1UD"})
            if (!byId.count(id) || byId[id].at("cace").is_null()) o.fail(std::string(id) + ": no estimate");
        if (o.pass) {
            double cli1ud = byId["1UD"]["cace"].get<double>();
            double lib1ud = plug_in_1ud(p, seed);
            if (std::fabs(cli1ud - lib1ud) > 1e-12) o.fail("1UD " + format(cli1ud) + " != library " + format(lib1ud));
            double cc = complete_case_wald(ds);
            double cliMcar = byId["MCAR-Y"]["cace"].get<double>();
            if (std::fabs(cliMcar - cc) > 1e-9) o.fail("MCAR-Y " + format(cliMcar) + " != complete-case Wald " + format(cc));
            if (o.pass)
                o.detail = "1UD " + format(cli1ud) + ", MCAR-Y " + format(cliMcar) + ", 1ZD " + format(byId["1ZD"]["cace"].get<double>()) +
                           " (truth 1/3)";
        }
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    struct Item {
        const char* name;
        Outcome (*fn)();
    };
    const Item items[] = {{"fixtures verify exactly", c1},
                          {"round trip over identifiable mechanisms", c2},
                          {"full response reduces to Wald", c3},
                          {"refusals", c4},
                          {"independence trips the dependence check", c5},
                          {"joint recovery", c6},
                          {"1UD plug-in consistency", c7},
                          {"CLI simulate -> sensitivity", c8}};
    // optional: run a single criterion, e.g. `acceptance 7`
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failed = 0;
    for (int i = 0; i < 8; ++i) {
        if (only && only != i + 1) continue;
        Outcome r;
        try {
            r = items[i].fn();
        } catch (const std::exception& e) {
            r.fail(std::string("exception: ") + e.what());
        }
        failed += !r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << items[i].name << (r.detail.empty() ? "" : ": " + r.detail)
                  << std::endl;
    }
    return failed ? 1 : 0;
}
