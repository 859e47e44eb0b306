#pragma once

#include "ivmnar/catalog.hpp"
#include "ivmnar/identify.hpp"
#include "ivmnar/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ivmnar {

using json = nlohmann::ordered_json;

// Rationals serialize as "p/q" strings, doubles as numbers. Either form is accepted on input.
template <class T> json number_to_json(const T& x);
template <class T> T number_from_json(const json& j);

// A params file names its mechanism; the response tables are keyed by cell strings
// ("z=1,d=0") over exactly the mechanism's parents, or a single number for a constant.
template <class T> struct ParamsConfig {
    std::string mechanism;
    StructuralParams<T> params;
};

template <class T> StructuralParams<T> params_from_json(const json& j, const MechanismSpec& mech);
template <class T> ParamsConfig<T> params_config_from_json(const json& j);
template <class T> json params_to_json(const StructuralParams<T>& p, const std::string& mechanism = {});

template <class T> ObservableDistribution<T> observable_from_json(const json& j);
template <class T> json observable_to_json(const ObservableDistribution<T>& o);

template <class T> json joint_to_json(const JointLaw<T>& joint);
template <class T> json result_to_json(const IdentificationResult<T>& r);
json report_to_json(const ConditionReport& r);
json catalog_entry_to_json(const CatalogEntry& e);
json catalog_to_json();

json load_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace ivmnar
