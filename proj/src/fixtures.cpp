#include "bernoulli/fixtures.hpp"

#include <cmath>

#include "bernoulli/io.hpp"
#include "bernoulli/reference.hpp"

namespace bernoulli {

std::vector<FixtureSpec> fixture_corpus(const std::vector<int>& ns) {
    std::vector<FixtureSpec> specs;

    Grid2D small = Grid2D::make(0.02, 4.4, -4.4, 4.4);
    {
        FixtureSpec s;
        s.name = "half_plane";
        s.n = 3;
        s.grid = small;
        s.profile = [](double, double z) { return z; };
        s.meta = {{"kind", "half_plane"}, {"n", 3}, {"direction", "e_n"}};
        specs.push_back(s);
    }
    {
        FixtureSpec s;
        s.name = "wedge";
        s.n = 3;
        s.grid = small;
        s.profile = [](double, double z) { return std::fabs(z); };
        s.meta = {{"kind", "wedge"}, {"n", 3}, {"direction", "e_n"}};
        specs.push_back(s);
    }
    {
        FixtureSpec s;
        s.name = "ansatz_synthetic";
        s.n = 3;
        s.grid = Grid2D::make(0.1, 17.0, -17.0, 17.0);
        s.profile = [](double r, double z) {
            double rho = std::hypot(r, z);
            return rho > 0 ? z - 0.3 + 0.2 / rho : 1.0;
        };
        s.meta = {{"kind", "far_field_profile"}, {"n", 3}, {"b", 0.3}, {"c", 0.2}};
        specs.push_back(s);
    }
    {
        FixtureSpec s;
        s.name = "ansatz_offcenter";
        s.n = 3;
        s.grid = Grid2D::make(0.1, 17.0, -17.0, 17.0);
        s.profile = [](double r, double z) {
            double zz = z - 0.25;
            double rho = std::hypot(r, zz);
            return rho > 0 ? zz - 0.3 + 0.2 / rho : 1.0;
        };
        s.meta = {{"kind", "far_field_profile"}, {"n", 3}, {"b", 0.3}, {"c", 0.2},
                  {"offset_z", 0.25}};
        specs.push_back(s);
    }

    for (int n : ns) {
        Grid2D g = Grid2D::make(0.05, 9.6, -9.6, 9.6);
        {
            FixtureSpec s;
            s.name = "radial_n" + std::to_string(n);
            s.n = n;
            s.grid = g;
            s.profile = [n](double r, double z) {
                double rho = std::hypot(r, z);
                return rho > 0 ? (1.0 - std::pow(rho, 2.0 - n)) / (n - 2) : -1.0;
            };
            s.meta = {{"kind", "radial"}, {"n", n}};
            specs.push_back(s);
        }
        {
            FixtureSpec s;
            s.name = "tilde_v_n" + std::to_string(n);
            s.n = n;
            s.grid = g;
            s.profile = [n](double r, double z) {
                double rho = std::hypot(r, z - 0.3);
                return rho > 0 ? z - 0.3 + 0.2 * std::pow(rho, 2.0 - n) : 1.0;
            };
            s.meta = {{"kind", "shifted_pole_profile"}, {"n", n}, {"b", 0.3}, {"c", 0.2}};
            specs.push_back(s);
        }
    }
    return specs;
}

ScalarField2D build_fixture(const FixtureSpec& spec) {
    return sample_meridian(spec.grid, spec.n, spec.profile);
}

void write_fixtures(const std::string& dir, const std::vector<int>& ns) {
    std::vector<FixtureSpec> specs = fixture_corpus(ns);
    nlohmann::json index = nlohmann::json::array();
    for (const FixtureSpec& spec : specs) {
        ScalarField2D f = build_fixture(spec);
        write_field_csv(f, dir + "/" + spec.name + ".field.csv");
        atomic_write(dir + "/" + spec.name + ".meta.json", spec.meta.dump(2) + "\n");
        index.push_back(spec.name);
    }
    atomic_write(dir + "/index.json", index.dump(2) + "\n");
}

}  // namespace bernoulli
