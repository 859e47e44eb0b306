#pragma once

#include "ivmnar/identify.hpp"
#include "ivmnar/io.hpp"
#include "ivmnar/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivmnar {

// CSV with header exactly "z,d,y"; an empty field is missing. Regime is inferred.
Dataset parse_dataset(const std::filesystem::path& path);
Dataset parse_dataset_text(std::string_view text);
void write_csv(std::ostream& out, const Dataset& ds);
std::string to_csv(const Dataset& ds);

struct EmpiricalOptions {
    bool oneSided = false;  // declared; checked against the (z=0, d=1) mass
    bool smooth = false;    // add 0.5 to every cell before normalizing
    double tolProb = 1e-12;
};

ObservableDistribution<double> empirical_observable(const Dataset& ds, const EmpiricalOptions& opt = {});

struct DatasetSummary {
    std::size_t n = 0;
    std::size_t n1 = 0;  // records with z = 1
    double missingD = 0;
    double missingY = 0;
    Regime regime = Regime::Complete;
    bool declaredOneSided = false;
    double z0d1Share = 0;  // observed share of (z=0, d=1) among z=0 records
    bool empiricallyOneSided = false;
};

DatasetSummary summarize(const Dataset& ds, const EmpiricalOptions& opt = {});

struct SensitivityEntry {
    std::string mechanism;  // as requested
    bool applicable = false;
    std::string reason;     // "identified", or why not
    std::string errorKind;  // empty when applicable
    std::optional<double> cace;
    std::optional<std::array<double, 2>> complierMeans;  // [0] = d0, [1] = d1
    std::vector<Diagnostic> diagnostics;
    std::optional<ConditionReport> conditions;
};

struct SensitivityReport {
    std::optional<DatasetSummary> summary;
    std::vector<SensitivityEntry> entries;
};

// One entry per requested id; errors are captured per entry.
SensitivityReport run_sensitivity(const ObservableDistribution<double>& obs, const std::vector<std::string>& mechanisms,
                                  const Tolerances& tol = {});
SensitivityReport run_sensitivity(const Dataset& ds, const std::vector<std::string>& mechanisms, const Tolerances& tol = {},
                                  const EmpiricalOptions& opt = {});

json sensitivity_to_json(const SensitivityReport& r);
std::string sensitivity_table(const SensitivityReport& r);

}  // namespace ivmnar
