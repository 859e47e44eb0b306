#include "ivmnar/dataset.hpp"

#include "ivmnar/catalog.hpp"
#include "ivmnar/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace ivmnar {

namespace {

std::string at_line(std::size_t line, const std::string& what) { return "line " + std::to_string(line) + ": " + what; }

std::optional<int> parse_binary(std::string_view f, std::size_t line, const char* name) {
    if (f.empty()) return std::nullopt;
    if (f == "0") return 0;
    if (f == "1") return 1;
    throw Error(ErrorKind::MalformedRow, at_line(line, std::string(name) + " must be 0, 1 or empty, got '" + std::string(f) + "'"));
}

}  // namespace

Dataset parse_dataset_text(std::string_view text) {
    Dataset ds;
    std::size_t line = 0;
    bool header = false;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view row = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line;
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        if (line == 1 && row.substr(0, 3) == "\xEF\xBB\xBF") row.remove_prefix(3);
        if (!header) {
            if (row != "z,d,y") throw Error(ErrorKind::MalformedRow, at_line(line, "header must be exactly 'z,d,y'"));
            header = true;
            continue;
        }
        if (row.empty()) continue;
        std::vector<std::string_view> f;
        for (std::size_t start = 0;;) {
            auto c = row.find(',', start);
            f.push_back(row.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start));
            if (c == std::string_view::npos) break;
            start = c + 1;
        }
        if (f.size() != 3) throw Error(ErrorKind::MalformedRow, at_line(line, "expected 3 fields, got " + std::to_string(f.size())));
        Record r;
        auto z = parse_binary(f[0], line, "z");
        if (!z) throw Error(ErrorKind::MissingInstrument, at_line(line, "z is missing"));
        r.z = *z;
        r.d = parse_binary(f[1], line, "d");
        if (!f[2].empty()) {
            double y = 0;
            auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), y);
            if (ec != std::errc() || p != f[2].data() + f[2].size() || !std::isfinite(y))
                throw Error(ErrorKind::UnknownOutcomeValue, at_line(line, "outcome '" + std::string(f[2]) + "' is not a number"));
            r.y = y;
        }
        ds.records.push_back(r);
    }
    if (!header) throw Error(ErrorKind::MalformedRow, at_line(1, "header must be exactly 'z,d,y'"));
    ds.regime = infer_regime(ds.records);
    return ds;
}

Dataset parse_dataset(const std::filesystem::path& path) { return parse_dataset_text(read_text(path)); }

void write_csv(std::ostream& out, const Dataset& ds) {
    out << "z,d,y\n";
    for (const auto& r : ds.records) {
        out << r.z << ',';
        if (r.d) out << *r.d;
        out << ',';
        if (r.y) out << format(*r.y);
        out << '\n';
    }
}

std::string to_csv(const Dataset& ds) {
    std::ostringstream ss;
    write_csv(ss, ds);
    return ss.str();
}

DatasetSummary summarize(const Dataset& ds, const EmpiricalOptions& opt) {
    DatasetSummary s;
    s.n = ds.records.size();
    s.regime = infer_regime(ds.records);
    s.declaredOneSided = opt.oneSided;
    std::size_t md = 0, my = 0, n0 = 0, z0d1 = 0;
    for (const auto& r : ds.records) {
        md += !r.d;
        my += !r.y;
        if (r.z == 1) ++s.n1;
        else {
            ++n0;
            if (r.d == 1) ++z0d1;
        }
    }
    if (s.n) {
        s.missingD = static_cast<double>(md) / static_cast<double>(s.n);
        s.missingY = static_cast<double>(my) / static_cast<double>(s.n);
    }
    if (n0) s.z0d1Share = static_cast<double>(z0d1) / static_cast<double>(n0);
    s.empiricallyOneSided = z0d1 == 0;
    return s;
}

ObservableDistribution<double> empirical_observable(const Dataset& ds, const EmpiricalOptions& opt) {
    std::size_t n[2] = {0, 0};
    std::set<double> ys;
    for (const auto& r : ds.records) {
        ++n[r.z];
        if (r.y) ys.insert(*r.y);
    }
    for (int z = 0; z < 2; ++z)
        if (!n[z]) throw Error(ErrorKind::EmptyArm, "no records with z=" + std::to_string(z));
    if (ys.size() < 2) throw Error(ErrorKind::UnknownOutcomeValue, "outcome takes fewer than two distinct observed values");
    std::vector<double> support(ys.begin(), ys.end());
    auto yidx = [&](double y) { return static_cast<std::size_t>(std::lower_bound(support.begin(), support.end(), y) - support.begin()); };

    const Regime regime = infer_regime(ds.records);
    const double total = static_cast<double>(n[0] + n[1]);
    auto o = ObservableDistribution<double>::zeros(regime, static_cast<double>(n[1]) / total, support, opt.oneSided);
    for (const auto& r : ds.records) {
        auto& a = o.arm[r.z];
        if (r.d && r.y) a.full[*r.d][yidx(*r.y)] += 1;
        else if (r.y) a.dMissing[yidx(*r.y)] += 1;
        else if (r.d) a.yMissing[*r.d] += 1;
        else a.bothMissing += 1;
    }
    if (opt.oneSided) {
        const auto& a = o.arm[0];
        double m = a.yMissing[1];
        for (double x : a.full[1]) m += x;
        if (m / static_cast<double>(n[0]) >= opt.tolProb)
            throw Error(ErrorKind::SidednessMismatch, "declared one-sided but " + format(m) + " records have z=0, d=1");
    }
    // Pseudo-count 0.5 per regime cell (structural one-sided zeros excluded). Trades bias for
    // finite odds when a cell is empty.
    const double pc = opt.smooth ? 0.5 : 0.0;
    for (int z = 0; z < 2; ++z) {
        auto& a = o.arm[z];
        const bool skipD1 = opt.oneSided && z == 0;
        double cells = 0;
        auto bump = [&](double& x) {
            x += pc;
            cells += 1;
        };
        for (int d = 0; d < 2; ++d)
            if (!(skipD1 && d == 1))
                for (auto& x : a.full[d]) bump(x);
        if (regime == Regime::TreatmentOnly || regime == Regime::Both)
            for (auto& x : a.dMissing) bump(x);
        if (regime == Regime::OutcomeOnly || regime == Regime::Both)
            for (int d = 0; d < 2; ++d)
                if (!(skipD1 && d == 1)) bump(a.yMissing[d]);
        if (regime == Regime::Both) bump(a.bothMissing);
        const double denom = static_cast<double>(n[z]) + pc * cells;
        for (int d = 0; d < 2; ++d) {
            for (auto& x : a.full[d]) x /= denom;
            a.yMissing[d] /= denom;
        }
        for (auto& x : a.dMissing) x /= denom;
        a.bothMissing /= denom;
    }
    return o;
}

namespace {

SensitivityEntry evaluate(const ObservableDistribution<double>& obs, const std::string& id, const Tolerances& tol) {
    SensitivityEntry e;
    e.mechanism = id;
    const CatalogEntry* entry = nullptr;
    try {
        entry = &lookup(id);
    } catch (const Error& err) {
        e.reason = err.detail();
        e.errorKind = to_string(err.kind());
        return e;
    }
    e.mechanism = entry->spec.id;
    if (!entry->spec.identifiable) {
        e.reason = "not identifiable" + (entry->fixtureId.empty() ? std::string() : " (" + entry->fixtureId + ")");
        e.errorKind = to_string(ErrorKind::MechanismNotIdentifiable);
        return e;
    }
    try {
        e.conditions = check_conditions(entry->spec.id, obs, tol);
    } catch (const Error&) {
        // regime mismatch etc.; identify below reports it
    }
    try {
        auto res = identify(entry->spec.id, obs, tol);
        e.applicable = true;
        e.reason = "identified";
        e.cace = res.cace;
        e.complierMeans = res.complierMeans;
        e.diagnostics = res.diagnostics;
    } catch (const Error& err) {
        e.reason = err.detail();
        e.errorKind = to_string(err.kind());
        if (e.conditions) e.diagnostics = e.conditions->dependence;
    } catch (const std::exception& err) {
        e.reason = err.what();
        e.errorKind = "InternalError";
    }
    return e;
}

}  // namespace

SensitivityReport run_sensitivity(const ObservableDistribution<double>& obs, const std::vector<std::string>& mechanisms,
                                  const Tolerances& tol) {
    SensitivityReport r;
    for (const auto& id : mechanisms) r.entries.push_back(evaluate(obs, id, tol));
    return r;
}

SensitivityReport run_sensitivity(const Dataset& ds, const std::vector<std::string>& mechanisms, const Tolerances& tol,
                                  const EmpiricalOptions& opt) {
    SensitivityReport r;
    r.summary = summarize(ds, opt);
    std::optional<ObservableDistribution<double>> obs;
    std::string failure, kind;
    try {
        obs = empirical_observable(ds, opt);
    } catch (const Error& err) {
        failure = err.detail();
        kind = to_string(err.kind());
    }
    for (const auto& id : mechanisms) {
        if (obs) {
            r.entries.push_back(evaluate(*obs, id, tol));
        } else {
            SensitivityEntry e;
            e.mechanism = id;
            e.reason = failure;
            e.errorKind = kind;
            r.entries.push_back(e);
        }
    }
    return r;
}

json sensitivity_to_json(const SensitivityReport& r) {
    json j = json::object();
    if (r.summary) {
        const auto& s = *r.summary;
        j["dataset"] = {{"n", s.n},
                        {"nZ1", s.n1},
                        {"regime", to_string(s.regime)},
                        {"missingD", s.missingD},
                        {"missingY", s.missingY},
                        {"declaredOneSided", s.declaredOneSided},
                        {"z0d1Share", s.z0d1Share},
                        {"empiricallyOneSided", s.empiricallyOneSided}};
    }
    json entries = json::array();
    for (const auto& e : r.entries) {
        json x = {{"mechanism", e.mechanism}, {"applicable", e.applicable}, {"reason", e.reason}};
        x["error"] = e.errorKind.empty() ? json(nullptr) : json(e.errorKind);
        x["cace"] = e.cace ? json(*e.cace) : json(nullptr);
        x["complierMeans"] = e.complierMeans ? json{{"d1", (*e.complierMeans)[1]}, {"d0", (*e.complierMeans)[0]}} : json(nullptr);
        json diags = json::array();
        for (const auto& d : e.diagnostics)
            diags.push_back({{"label", d.label}, {"magnitude", d.magnitude}, {"pass", d.pass}});
        x["diagnostics"] = diags;
        x["conditions"] = e.conditions ? report_to_json(*e.conditions) : json(nullptr);
        entries.push_back(x);
    }
    j["entries"] = entries;
    return j;
}

std::string sensitivity_table(const SensitivityReport& r) {
    std::ostringstream out;
    if (r.summary) {
        const auto& s = *r.summary;
        out << "n=" << s.n << "  regime=" << to_string(s.regime) << "  missing(D)=" << std::fixed << std::setprecision(4)
            << s.missingD << "  missing(Y)=" << s.missingY << "  one-sided=" << (s.declaredOneSided ? "declared" : "no")
            << " (observed z=0,d=1 share " << s.z0d1Share << ")\n";
    }
    std::size_t w = 9;
    for (const auto& e : r.entries) w = std::max(w, e.mechanism.size());
    out << std::left << std::setw(static_cast<int>(w) + 2) << "mechanism" << std::setw(12) << "cace" << std::setw(12) << "E[Y|c,1]"
        << std::setw(12) << "E[Y|c,0]" << std::setw(9) << "min dep" << "status\n";
    auto num = [](std::optional<double> v) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::fixed << std::setprecision(6) << *v;
        return s.str();
    };
    for (const auto& e : r.entries) {
        std::optional<double> dep;
        for (const auto& d : e.diagnostics) dep = dep ? std::min(*dep, d.magnitude) : d.magnitude;
        std::ostringstream ds;
        if (dep) ds << std::setprecision(3) << *dep;
        out << std::setw(static_cast<int>(w) + 2) << e.mechanism << std::setw(12) << num(e.cace)
            << std::setw(12) << num(e.complierMeans ? std::optional<double>((*e.complierMeans)[1]) : std::nullopt)
            << std::setw(12) << num(e.complierMeans ? std::optional<double>((*e.complierMeans)[0]) : std::nullopt)
            << std::setw(9) << (dep ? ds.str() : "-")
            << (e.applicable ? "identified" : (e.errorKind.empty() ? e.reason : e.errorKind + ": " + e.reason)) << "\n";
    }
    return out.str();
}

}  // namespace ivmnar
