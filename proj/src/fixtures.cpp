#include "ivmnar/fixtures.hpp"

#include "ivmnar/catalog.hpp"
#include "ivmnar/errors.hpp"
#include "ivmnar/forward.hpp"
#include "ivmnar/identify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace ivmnar {

namespace detail {
const std::vector<std::string_view>& fixture_sources();  // generated at build time
}

CounterexampleFixture fixture_from_json(const json& j) {
    CounterexampleFixture f;
    f.id = j.at("id").get<std::string>();
    const auto& entry = lookup(j.at("mechanism").get<std::string>());
    f.mechanism = entry.spec.id;
    f.note = j.value("note", "");
    f.observables = observable_from_json<Rational>(j.at("observables"));
    f.paramsA = params_from_json<Rational>(j.at("paramsA"), entry.spec);
    f.paramsB = params_from_json<Rational>(j.at("paramsB"), entry.spec);
    f.caceA = number_from_json<Rational>(j.at("caceA"));
    f.caceB = number_from_json<Rational>(j.at("caceB"));
    return f;
}

json fixture_to_json(const CounterexampleFixture& f) {
    json j = {{"id", f.id}, {"mechanism", f.mechanism}, {"oneSided", f.observables.oneSided}};
    if (!f.note.empty()) j["note"] = f.note;
    j["observables"] = observable_to_json(f.observables);
    j["paramsA"] = params_to_json(f.paramsA);
    j["paramsB"] = params_to_json(f.paramsB);
    j["caceA"] = number_to_json(f.caceA);
    j["caceB"] = number_to_json(f.caceB);
    return j;
}

const std::vector<CounterexampleFixture>& builtin_fixtures() {
    static const std::vector<CounterexampleFixture> all = [] {
        std::vector<CounterexampleFixture> v;
        for (auto src : detail::fixture_sources()) v.push_back(fixture_from_json(json::parse(src)));
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        return v;
    }();
    return all;
}

const CounterexampleFixture& builtin_fixture(std::string_view key) {
    for (const auto& f : builtin_fixtures())
        if (f.id == key || f.id.rfind(std::string(key) + "-", 0) == 0) return f;
    throw Error(ErrorKind::ParseError, "no fixture '" + std::string(key) + "'");
}

namespace {

// (i)/(ii): "" when equal, else the first differing cell
std::string compare_cells(const ObservableDistribution<Rational>& got, const ObservableDistribution<Rational>& want) {
    if (got.regime != want.regime) return std::string("regime ") + to_string(got.regime) + " vs " + to_string(want.regime);
    auto g = got.named_cells(), w = want.named_cells();
    if (g.size() != w.size()) return "cell count differs";
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i].second != w[i].second)
            return "cell " + g[i].first + ": forward " + format(g[i].second) + ", printed " + format(w[i].second);
    return {};
}

}  // namespace

VerificationReport verify_fixture(const CounterexampleFixture& f) {
    VerificationReport r;
    r.fixtureId = f.id;
    r.mechanism = f.mechanism;
    const auto& spec = lookup(f.mechanism).spec;
    auto forward = [&](const StructuralParams<Rational>& p, const char* which, bool& ok) {
        try {
            auto diff = compare_cells(forward_observable(p, spec), f.observables);
            ok = diff.empty();
            if (!ok) r.details.push_back(std::string(which) + ": " + diff);
        } catch (const Error& e) {
            r.details.push_back(std::string(which) + ": " + e.what());
        }
    };
    forward(f.paramsA, "paramsA", r.forwardA);
    forward(f.paramsB, "paramsB", r.forwardB);
    try {
        Rational a = true_cace(f.paramsA), b = true_cace(f.paramsB);
        r.caceMatch = a == f.caceA && b == f.caceB;
        if (!r.caceMatch) r.details.push_back("CACE " + format(a) + " / " + format(b) + " vs printed " + format(f.caceA) + " / " + format(f.caceB));
    } catch (const Error& e) {
        r.details.push_back(std::string("true_cace: ") + e.what());
    }
    r.distinct = f.caceA != f.caceB;
    if (!r.distinct) r.details.push_back("caceA == caceB");
    try {
        auto res = identify(f.mechanism, f.observables);
        r.refusal = "returned " + format(res.cace);
        r.details.push_back("identify returned a value");
    } catch (const Error& e) {
        r.refusal = e.what();
        r.refused = e.kind() == ErrorKind::MechanismNotIdentifiable || e.kind() == ErrorKind::SidednessMismatch;
        if (!r.refused) r.details.push_back(std::string("identify raised an unexpected error: ") + e.what());
    }
    return r;
}

json report_to_json(const VerificationReport& r) {
    return {{"fixture", r.fixtureId}, {"mechanism", r.mechanism}, {"forwardA", r.forwardA}, {"forwardB", r.forwardB},
            {"caceMatch", r.caceMatch}, {"distinct", r.distinct}, {"refused", r.refused}, {"refusal", r.refusal},
            {"details", r.details}, {"pass", r.all_pass()}};
}

// ---------------------------------------------------------------------------
// search_alternative

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Unconstrained coordinates -> StructuralParams: softmax blocks for the laws and shares,
// logistic for response probabilities. Interior points only, so every image validates.
struct Layout {
    const MechanismSpec* mech = nullptr;
    bool armLaw = false;
    bool oneSided = false;
    double pZ = 0.5;
    std::vector<double> ys;
    std::vector<CellKey> rdKeys, ryKeys;
    std::size_t dim = 0;

    std::size_t ny() const { return ys.size(); }

    static std::vector<CellKey> keys(VarSet parents, std::size_t ny, bool oneSided) {
        std::vector<CellKey> out(1);
        out[0].fill(-1);
        const int range[kNumVars] = {2, 3, 2, static_cast<int>(ny), 2};
        for (int i = 0; i < kNumVars; ++i) {
            if (!parents.has(static_cast<Var>(i))) continue;
            std::vector<CellKey> next;
            for (const auto& k : out)
                for (int v = 0; v < range[i]; ++v) {
                    if (i == 1 && oneSided && v == static_cast<int>(ComplianceType::AlwaysTaker)) continue;
                    auto n = k;
                    n[i] = static_cast<std::int8_t>(v);
                    next.push_back(n);
                }
            out = std::move(next);
        }
        return out;
    }

    Layout(const MechanismSpec& m, const ObservableDistribution<double>& obs) : mech(&m), oneSided(obs.oneSided), pZ(obs.pZ), ys(obs.ySupport) {
        bool hasRD = m.regime == Regime::TreatmentOnly || m.regime == Regime::Both;
        bool hasRY = m.regime == Regime::OutcomeOnly || m.regime == Regime::Both;
        armLaw = !((hasRD && m.rdParents.has(Var::U)) || (hasRY && m.ryParents.has(Var::U)));
        if (hasRD) rdKeys = keys(m.rdParents, ny(), oneSided);
        if (hasRY) ryKeys = keys(m.ryParents, ny(), oneSided);
        if (armLaw) dim = (oneSided ? ny() : 2 * ny()) + 2 * ny();
        else dim = (oneSided ? 2 : 3) + (oneSided ? 3 : 4) * ny();
        dim += rdKeys.size() + ryKeys.size();
    }

    static std::vector<double> softmax(const double* x, std::size_t n) {
        double mx = *std::max_element(x, x + n);
        std::vector<double> p(n);
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += p[i] = std::exp(x[i] - mx);
        for (auto& v : p) v /= s;
        return p;
    }
    static double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

    StructuralParams<double> build(const VectorXd& th) const {
        StructuralParams<double> p;
        p.pZ = pZ;
        p.ySupport = ys;
        p.oneSided = oneSided;
        const double* x = th.data();
        const std::size_t n = ny();
        if (armLaw) {
            ArmTable<double> q;
            for (int z = 0; z < 2; ++z) {
                bool only0 = z == 0 && oneSided;
                auto w = softmax(x, only0 ? n : 2 * n);
                x += only0 ? n : 2 * n;
                q[z][0].assign(w.begin(), w.begin() + n);
                q[z][1] = only0 ? std::vector<double>(n, 0.0) : std::vector<double>(w.begin() + n, w.end());
            }
            p.armLaw = q;
        } else {
            if (oneSided) {
                auto w = softmax(x, 2);
                x += 2;
                p.piU = {0.0, w[1], w[0]};
            } else {
                auto w = softmax(x, 3);
                x += 3;
                p.piU = {w[0], w[1], w[2]};
            }
            for (auto s : kStrata) {
                if (s == Stratum::A1 && oneSided) continue;
                p.outcomeLaw[static_cast<int>(s)] = softmax(x, n);
                x += n;
            }
        }
        p.responseD.parents = mech->rdParents;
        for (const auto& k : rdKeys) p.responseD.prob[k] = logistic(*x++);
        p.responseY.parents = mech->ryParents;
        for (const auto& k : ryKeys) p.responseY.prob[k] = logistic(*x++);
        return p;
    }
};

VectorXd cells_vector(const ObservableDistribution<double>& o) {
    auto c = o.named_cells();
    VectorXd v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = c[i].second;
    return v;
}

}  // namespace

std::optional<Alternative> search_alternative(const ObservableDistribution<double>& obsIn, std::string_view mechId,
                                              std::uint64_t seed, std::size_t budget, std::optional<double> reference,
                                              const SearchOptions& opt) {
    const auto& spec = lookup(mechId).spec;
    auto obs = embed(obsIn, spec.regime);  // RegimeMismatch when the data has the wrong coarsening
    if (budget == 0) return std::nullopt;
    if (!reference) {
        try {
            reference = identify(spec.id, obs).cace;
        } catch (const Error&) {
        }
    }
    const Layout lay(spec, obs);
    const VectorXd target = cells_vector(obs);
    auto residual = [&](const VectorXd& th) { return VectorXd(cells_vector(forward_observable(lay.build(th), spec)) - target); };

    std::mt19937_64 master(seed);
    std::size_t used = 0;
    for (std::size_t restart = 0; restart < opt.maxRestarts && used < budget; ++restart) {
        std::mt19937_64 gen(master());
        std::uniform_real_distribution<double> U(-3.0, 3.0);
        VectorXd th(static_cast<Eigen::Index>(lay.dim));
        for (auto& v : th) v = U(gen);
        VectorXd r = residual(th);
        double cost = r.squaredNorm(), lambda = 1e-3;
        // Levenberg-Marquardt with a forward-difference Jacobian
        for (int it = 0; it < 400 && used < budget && cost >= opt.residualTol * 1e-2; ++it, ++used) {
            MatrixXd J(r.size(), th.size());
            for (Eigen::Index k = 0; k < th.size(); ++k) {
                VectorXd t = th;
                const double h = 1e-7 * std::max(1.0, std::fabs(th[k]));
                t[k] += h;
                J.col(k) = (residual(t) - r) / h;
            }
            MatrixXd A = J.transpose() * J;
            VectorXd g = J.transpose() * r;
            bool improved = false;
            while (lambda < 1e12) {
                MatrixXd M = A;
                M.diagonal().array() += lambda * (1.0 + A.diagonal().array());
                VectorXd step = M.ldlt().solve(-g);
                VectorXd cand = th + step;
                VectorXd rc = residual(cand);
                double cc = rc.squaredNorm();
                if (std::isfinite(cc) && cc < cost) {
                    th = cand;
                    r = rc;
                    cost = cc;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if (!improved) break;
        }
        if (cost >= opt.residualTol) continue;
        Alternative alt;
        alt.params = lay.build(th);
        alt.residual = cost;
        try {
            alt.cace = true_cace(alt.params);
        } catch (const Error&) {
            continue;  // no first stage at this point
        }
        if (!validate(alt.params, spec, {}, ValidationScope::Generative).empty()) continue;
        if (!reference) {
            reference = alt.cace;
            continue;
        }
        if (std::fabs(alt.cace - *reference) > opt.caceGap) return alt;
    }
    return std::nullopt;
}

}  // namespace ivmnar
