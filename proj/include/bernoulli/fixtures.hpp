#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bernoulli/field.hpp"

namespace bernoulli {

struct FixtureSpec {
    std::string name;
    int n = 3;
    Grid2D grid;
    std::function<double(double, double)> profile;  // raw value, clamped on sampling
    nlohmann::json meta;
};

// Deterministic corpus: half-plane, wedge, synthetic far-field profile, its
// vertically off-center variant, and per-dimension radial / shifted-pole
// profiles. No randomness anywhere.
std::vector<FixtureSpec> fixture_corpus(const std::vector<int>& ns);

ScalarField2D build_fixture(const FixtureSpec& spec);

// Writes <name>.field.csv + <name>.meta.json per fixture and an index.json.
void write_fixtures(const std::string& dir, const std::vector<int>& ns);

}  // namespace bernoulli
