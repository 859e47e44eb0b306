// Python module: JSON text in, JSON text out; the package wraps it with dicts.
#include "ivmnar/catalog.hpp"
#include "ivmnar/dataset.hpp"
#include "ivmnar/errors.hpp"
#include "ivmnar/fixtures.hpp"
#include "ivmnar/forward.hpp"
#include "ivmnar/identify.hpp"
#include "ivmnar/io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ivmnar;

namespace {

Tolerances tols(double det, double prob) { return {det, prob}; }

std::string identify_json(const std::string& mech, const std::string& obs, bool exact, double det, double prob) {
    auto j = json::parse(obs);
    if (exact) return result_to_json(identify(mech, observable_from_json<Rational>(j), tols(det, prob))).dump();
    return result_to_json(identify(mech, observable_from_json<double>(j), tols(det, prob))).dump();
}

std::string conditions_json(const std::string& mech, const std::string& obs, bool exact, double det, double prob) {
    auto j = json::parse(obs);
    if (exact) return report_to_json(check_conditions(mech, observable_from_json<Rational>(j), tols(det, prob))).dump();
    return report_to_json(check_conditions(mech, observable_from_json<double>(j), tols(det, prob))).dump();
}

std::string joint_json(const std::string& mech, const std::string& obs) {
    auto jr = recover_joint(mech, observable_from_json<Rational>(json::parse(obs)));
    json out = {{"joint", jr.joint ? joint_to_json(*jr.joint) : json(nullptr)}, {"reason", jr.reason}};
    return out.dump();
}

std::string simulate_json(const std::string& config, bool exact) {
    auto j = json::parse(config);
    if (!exact) {
        auto cfg = params_config_from_json<double>(j);
        json out = observable_to_json(forward_observable(cfg.params, lookup(cfg.mechanism).spec));
        out["mechanism"] = cfg.mechanism;
        out["trueCace"] = true_cace(cfg.params);
        return out.dump();
    }
    auto cfg = params_config_from_json<Rational>(j);
    json out = observable_to_json(forward_observable(cfg.params, lookup(cfg.mechanism).spec));
    out["mechanism"] = cfg.mechanism;
    out["trueCace"] = number_to_json(true_cace(cfg.params));
    return out.dump();
}

std::string sample_csv(const std::string& config, std::size_t n, std::uint64_t seed) {
    auto cfg = params_config_from_json<double>(json::parse(config));
    return to_csv(sample_dataset(cfg.params, lookup(cfg.mechanism).spec, n, seed));
}

std::string sensitivity_csv(const std::string& csv, const std::vector<std::string>& mechs, bool oneSided, bool smooth, double det,
                            double prob) {
    return sensitivity_to_json(run_sensitivity(parse_dataset_text(csv), mechs, tols(det, prob), {oneSided, smooth, prob})).dump();
}

std::string sensitivity_obs(const std::string& obs, const std::vector<std::string>& mechs, double det, double prob) {
    return sensitivity_to_json(run_sensitivity(observable_from_json<double>(json::parse(obs)), mechs, tols(det, prob))).dump();
}

std::string empirical_json(const std::string& csv, bool oneSided, bool smooth, double prob) {
    return observable_to_json(empirical_observable(parse_dataset_text(csv), {oneSided, smooth, prob})).dump();
}

std::string verify_json() {
    json all = json::array();
    for (const auto& f : builtin_fixtures()) all.push_back(report_to_json(verify_fixture(f)));
    return all.dump();
}

std::string fixtures_json() {
    json all = json::array();
    for (const auto& f : builtin_fixtures()) all.push_back(fixture_to_json(f));
    return all.dump();
}

}  // namespace

PYBIND11_MODULE(_ivmnar, m) {
    m.doc() = "CACE identification with missing treatment and/or outcome (JSON-string core)";

    // kind is the ErrorKind name, magnitude the dependence determinant (else 0)
    static py::handle exc = py::exception<Error>(m, "IvmnarError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(exc)(py::str(e.what()));
            inst.attr("kind") = to_string(e.kind());
            inst.attr("magnitude") = e.magnitude();
            PyErr_SetObject(exc.ptr(), inst.ptr());
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    const double det = 1e-10, prob = 1e-12;
    m.def("identify", &identify_json, py::arg("mechanism"), py::arg("observable"), py::arg("exact") = false, py::arg("tol_det") = det,
          py::arg("tol_prob") = prob);
    m.def("check_conditions", &conditions_json, py::arg("mechanism"), py::arg("observable"), py::arg("exact") = false,
          py::arg("tol_det") = det, py::arg("tol_prob") = prob);
    m.def("recover_joint", &joint_json, py::arg("mechanism"), py::arg("observable"));
    m.def("simulate", &simulate_json, py::arg("config"), py::arg("exact") = true);
    m.def("sample_csv", &sample_csv, py::arg("config"), py::arg("n"), py::arg("seed"));
    m.def("empirical_observable", &empirical_json, py::arg("csv"), py::arg("one_sided") = false, py::arg("smooth") = false,
          py::arg("tol_prob") = prob);
    m.def("sensitivity_csv", &sensitivity_csv, py::arg("csv"), py::arg("mechanisms"), py::arg("one_sided") = false,
          py::arg("smooth") = false, py::arg("tol_det") = det, py::arg("tol_prob") = prob);
    m.def("sensitivity_observable", &sensitivity_obs, py::arg("observable"), py::arg("mechanisms"), py::arg("tol_det") = det,
          py::arg("tol_prob") = prob);
    m.def("verify_counterexamples", &verify_json);
    m.def("fixtures", &fixtures_json);
    m.def("catalog", [] { return catalog_to_json().dump(); });
    m.def("normalize_label", [](const std::string& s) { return normalize_label(s); });
}
