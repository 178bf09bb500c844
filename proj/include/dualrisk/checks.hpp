#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualrisk/outcomes.hpp"

namespace dualrisk::chk {

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;
    double seconds = 0.0;
    std::vector<std::string> messages; // one per failure
    bool passed() const { return failures == 0; }
};

struct CheckOptions {
    std::uint64_t seed = 20260819;
    double tol = 1e-10;
    int quad_nodes = 128;
    // Debug negative control: deliberately compares homogeneity against a
    // skewed factor so the harness's failure path can be exercised.
    bool inject_broken_homogeneity = false;
};

/// Seeded corpus of finite discrete laws with gains dominating losses in
/// mean (finite positive index). Deterministic across platforms: the
/// generator consumes raw engine draws, never distribution adapters.
std::vector<out::Outcome> random_corpus(std::uint64_t seed, int count);

SuiteResult index_property_suite(const CheckOptions& opt);
SuiteResult round_trip_suite(const CheckOptions& opt);
SuiteResult closed_form_suite(const CheckOptions& opt);

std::vector<SuiteResult> run_all(const CheckOptions& opt);

} // namespace dualrisk::chk
