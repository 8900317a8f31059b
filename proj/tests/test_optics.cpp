#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "gigayear/optics.hpp"

using namespace gigayear;

namespace {

const std::string dataDir = GIGAYEAR_DATA_DIR;

OpticalLayer medium(const std::string& name, Complex n) { return {name, n, std::nullopt}; }
OpticalLayer film(const std::string& name, Complex n, double t) { return {name, n, t}; }

// Independent oracle: multiple-beam (Airy) summation.  The effective
// reflection amplitude of the sub-stack below each interface is built
// recursively from Fresnel coefficients and a truncated 50-term sum over
// internal round trips.  Real (non-absorbing) indices only.
Complex beam_sum_r(const std::vector<Complex>& n, const std::vector<double>& d,
                   std::size_t j, double lambda) {
    const Complex r01 = (n[j] - n[j + 1]) / (n[j] + n[j + 1]);
    if (j + 1 == n.size() - 1) return r01;  // next medium is the substrate
    const Complex rb = beam_sum_r(n, d, j + 1, lambda);
    const Complex t01 = 2.0 * n[j] / (n[j] + n[j + 1]);
    const Complex t10 = 2.0 * n[j + 1] / (n[j] + n[j + 1]);
    const Complex i(0.0, 1.0);
    // d[j] is the thickness of medium j+1 (the first finite layer below j)
    const Complex phase = std::exp(2.0 * i * (2.0 * M_PI * n[j + 1] * d[j] / lambda));
    const Complex ratio = (-r01) * rb * phase;
    Complex series = 0.0, term = 1.0;
    for (int k = 0; k < 50; ++k) {
        series += term;
        term *= ratio;
    }
    return r01 + t01 * t10 * rb * phase * series;
}

double oracle_reflectance(const LayerStack& s) {
    std::vector<Complex> n{s.ambient.n};
    std::vector<double> d;
    for (const auto& l : s.layers) {
        n.push_back(l.n);
        d.push_back(*l.thickness);
    }
    n.push_back(s.substrate.n);
    return std::norm(beam_sum_r(n, d, 0, s.wavelength));
}

}  // namespace

TEST_CASE("reflectance basics") {
    SECTION("matched media reflect nothing") {
        LayerStack s{medium("air", 1.0), {}, medium("air", 1.0), 550e-9};
        CHECK(reflectance(s) == Catch::Approx(0.0).margin(1e-15));
        CHECK(transmittance(s) == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("bare interface reproduces Fresnel") {
        LayerStack s{medium("air", 1.0), {}, medium("glass", 1.5), 550e-9};
        CHECK(reflectance(s) == Catch::Approx(0.04).epsilon(1e-12));
        CHECK(transmittance(s) == Catch::Approx(0.96).epsilon(1e-12));
    }
    SECTION("thick absorber converges to its own interface") {
        const Complex nW{3.48, 2.72};
        LayerStack s{medium("air", 1.0), {film("W", nW, 2e-6)}, medium("Si", {4.08, 0.028}),
                     550e-9};
        const double expected = std::norm((1.0 - nW) / (1.0 + nW));
        CHECK(reflectance(s) == Catch::Approx(expected).epsilon(1e-9));
        CHECK(reflectance(s) <= 1.0);
    }
}

TEST_CASE("transfer matrix agrees with the multiple-beam oracle") {
    std::mt19937_64 gen(424242);
    std::uniform_real_distribution<double> idx(1.0, 4.0);
    std::uniform_real_distribution<double> thick(1e-9, 1000e-9);
    std::uniform_int_distribution<int> count(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        LayerStack s;
        s.wavelength = 550e-9;
        s.ambient = medium("amb", idx(gen));
        s.substrate = medium("sub", idx(gen));
        const int m = count(gen);
        for (int k = 0; k < m; ++k)
            s.layers.push_back(film("L" + std::to_string(k), idx(gen), thick(gen)));
        INFO("trial " << trial);
        CHECK(reflectance(s) == Catch::Approx(oracle_reflectance(s)).margin(1e-9));
    }
}

TEST_CASE("energy conservation and bounds") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> idxR(1.0, 5.0);
    std::uniform_real_distribution<double> idxI(0.0, 3.0);
    std::uniform_real_distribution<double> thick(1e-9, 2000e-9);
    std::uniform_int_distribution<int> count(0, 5);
    std::bernoulli_distribution absorbing(0.4);
    for (int trial = 0; trial < 1000; ++trial) {
        LayerStack s;
        s.wavelength = 550e-9;
        s.ambient = medium("amb", idxR(gen));
        s.substrate = medium("sub", idxR(gen));
        bool anyAbsorbing = false;
        const int m = count(gen);
        for (int k = 0; k < m; ++k) {
            double im = 0.0;
            if (absorbing(gen)) {
                im = idxI(gen);
                if (im > 0.0) anyAbsorbing = true;
            }
            s.layers.push_back(film("L", {idxR(gen), im}, thick(gen)));
        }
        const double R = reflectance(s);
        const double T = transmittance(s);
        INFO("trial " << trial);
        CHECK(R >= 0.0);
        CHECK(R <= 1.0);
        CHECK(T >= 0.0);
        if (anyAbsorbing) {
            CHECK(R + T <= 1.0 + 1e-9);
        } else {
            CHECK(R + T == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("thin-film identities") {
    const double lambda = 550e-9;
    SECTION("half-wave layer is invisible") {
        const double d = lambda / (2.0 * 2.0);  // n = 2
        LayerStack withLayer{medium("air", 1.0), {film("hw", 2.0, d)}, medium("sub", 4.0), lambda};
        LayerStack bare{medium("air", 1.0), {}, medium("sub", 4.0), lambda};
        CHECK(reflectance(withLayer) == Catch::Approx(reflectance(bare)).margin(1e-12));
    }
    SECTION("quarter-wave layer with n = sqrt(na*ns) is antireflective") {
        const double d = lambda / (4.0 * 2.0);
        LayerStack s{medium("air", 1.0), {film("qw", 2.0, d)}, medium("sub", 4.0), lambda};
        CHECK(reflectance(s) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("splitting a layer in two changes nothing") {
        std::mt19937_64 gen(99);
        std::uniform_real_distribution<double> idx(1.0, 4.0);
        std::uniform_real_distribution<double> thick(10e-9, 800e-9);
        for (int trial = 0; trial < 50; ++trial) {
            const Complex n1{idx(gen), 0.3};
            const Complex n2{idx(gen), 0.0};
            const double d1 = thick(gen), d2 = thick(gen);
            LayerStack joined{medium("air", 1.0),
                              {film("a", n1, d1), film("b", n2, d2)},
                              medium("sub", idx(gen)),
                              lambda};
            LayerStack split = joined;
            split.layers = {film("a1", n1, d1 / 2.0), film("a2", n1, d1 / 2.0),
                            film("b", n2, d2)};
            CHECK(reflectance(split) == Catch::Approx(reflectance(joined)).margin(1e-12));
            CHECK(transmittance(split) == Catch::Approx(transmittance(joined)).margin(1e-12));
        }
    }
}

TEST_CASE("contrast") {
    const double lambda = 550e-9;
    LayerStack a{medium("air", 1.0), {}, medium("s", 4.0), lambda};
    SECTION("identical stacks give zero and the order does not matter") {
        LayerStack b = a;
        CHECK(contrast(a, b) == 0.0);
        b.layers.push_back(film("f", 2.0, 100e-9));
        CHECK(contrast(a, b) == Catch::Approx(contrast(b, a)).epsilon(1e-15));
        CHECK(contrast(a, b) >= 0.0);
    }
    SECTION("mismatched wavelength or ambient is rejected") {
        LayerStack b = a;
        b.wavelength = 600e-9;
        CHECK_THROWS_AS(contrast(a, b), std::invalid_argument);
        b = a;
        b.ambient.n = 1.33;
        CHECK_THROWS_AS(contrast(a, b), std::invalid_argument);
    }
}

TEST_CASE("production stack reaches the contrast target") {
    const IndexTable table = load_index_table(dataDir + "/index_table.csv");
    const double lambda = 550e-9;
    const Complex nSiN = table.interpolate("Si3N4", lambda);
    const Complex nW = table.interpolate("W", lambda);
    const Complex nSi = table.interpolate("Si", lambda);
    LayerStack bare{medium("air", 1.0),
                    {film("SiN-top", nSiN, 225e-9), film("SiN-bottom", nSiN, 338e-9)},
                    medium("Si", nSi),
                    lambda};
    LayerStack metal{medium("air", 1.0),
                     {film("SiN-top", nSiN, 225e-9), film("W", nW, 50e-9),
                      film("SiN-bottom", nSiN, 338e-9)},
                     medium("Si", nSi),
                     lambda};
    const double c = contrast(bare, metal);
    CHECK(c > 0.1);
    CHECK(c == Catch::Approx(0.1170245170).margin(1e-6));
}

TEST_CASE("thickness optimization") {
    const double lambda = 550e-9;
    SECTION("recovers the quarter-wave minimum of a single layer") {
        // The metallized stack is a fixed bright mirror, so maximizing the
        // contrast is the same as minimizing the bare-stack reflectance;
        // the optimum is the antireflective quarter-wave at 68.75 nm.
        ContrastDesign design;
        design.bare = {medium("air", 1.0), {film("coat", 2.0, 50e-9)}, medium("sub", 4.0), lambda};
        design.metal = {medium("air", 1.0), {}, medium("mirror", 9.0), lambda};
        design.bottomIndexBare = 0;
        auto result = optimize_thicknesses(design, {30e-9, 110e-9}, {1e-9, 2e-9}, 41);
        CHECK(result.bottomThickness == Catch::Approx(68.75e-9).margin(0.1e-9));
        CHECK(result.contrast == Catch::Approx(0.64).margin(1e-6));
    }
    SECTION("never loses to an interior starting point and is deterministic") {
        const IndexTable table = load_index_table(dataDir + "/index_table.csv");
        const Complex nSiN = table.interpolate("Si3N4", lambda);
        const Complex nW = table.interpolate("W", lambda);
        const Complex nSi = table.interpolate("Si", lambda);
        ContrastDesign design;
        design.bare = {medium("air", 1.0),
                       {film("top", nSiN, 225e-9), film("bottom", nSiN, 338e-9)},
                       medium("Si", nSi),
                       lambda};
        design.metal = {medium("air", 1.0),
                        {film("top", nSiN, 225e-9), film("W", nW, 50e-9),
                         film("bottom", nSiN, 338e-9)},
                        medium("Si", nSi),
                        lambda};
        design.topIndexBare = 0;
        design.topIndexMetal = 0;
        design.bottomIndexBare = 1;
        design.bottomIndexMetal = 2;
        ContrastDesign probe = design;
        const double reference = probe.evaluate(338e-9, 225e-9);
        auto r1 = optimize_thicknesses(design, {200e-9, 400e-9}, {150e-9, 300e-9}, 31);
        auto r2 = optimize_thicknesses(design, {200e-9, 400e-9}, {150e-9, 300e-9}, 31);
        CHECK(r1.contrast + 1e-9 >= reference);
        CHECK(r1.bottomThickness == r2.bottomThickness);
        CHECK(r1.topThickness == r2.topThickness);
        CHECK(r1.contrast == r2.contrast);
    }
    SECTION("invalid bounds are rejected") {
        ContrastDesign design;
        design.bare = {medium("air", 1.0), {film("c", 2.0, 50e-9)}, medium("s", 4.0), lambda};
        design.metal = {medium("air", 1.0), {}, medium("m", 9.0), lambda};
        design.bottomIndexBare = 0;
        CHECK_THROWS_AS(optimize_thicknesses(design, {2e-9, 1e-9}, {1e-9, 2e-9}, 10),
                        std::invalid_argument);
        CHECK_THROWS_AS(optimize_thicknesses(design, {1e-9, 2e-9}, {1e-9, 2e-9}, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("index table") {
    const IndexTable table = load_index_table(dataDir + "/index_table.csv");
    SECTION("exact sample points are returned verbatim") {
        CHECK(table.interpolate("Si3N4", 550e-9) == Complex{2.04, 0.0});
        CHECK(table.interpolate("W", 500e-9) == Complex{3.40, 2.68});
    }
    SECTION("midpoints interpolate linearly") {
        const Complex n = table.interpolate("Si", 525e-9);
        CHECK(n.real() == Catch::Approx((4.29 + 4.08) / 2.0).epsilon(1e-12));
        CHECK(n.imag() == Catch::Approx((0.045 + 0.028) / 2.0).epsilon(1e-12));
    }
    SECTION("errors are specific") {
        CHECK_THROWS_WITH(table.interpolate("Unobtanium", 550e-9),
                          Catch::Matchers::ContainsSubstring("Unobtanium"));
        CHECK_THROWS_AS(table.interpolate("Si", 450e-9), std::out_of_range);
        CHECK_THROWS_AS(table.interpolate("Si", 650e-9), std::out_of_range);
    }
    SECTION("malformed rows report the line number") {
        const auto path = std::filesystem::temp_directory_path() / "bad_index.csv";
        {
            std::ofstream out(path);
            out << "material,wavelength_nm,n_real,n_imag\n";
            out << "Si,500,4.29,0.045\n";
            out << "Si,550,not_a_number,0.028\n";
        }
        CHECK_THROWS_WITH(load_index_table(path.string()),
                          Catch::Matchers::ContainsSubstring("line 3"));
        std::filesystem::remove(path);
    }
    SECTION("missing file is reported") {
        CHECK_THROWS_AS(load_index_table("/nonexistent/table.csv"), std::runtime_error);
    }
}

TEST_CASE("stack validation") {
    LayerStack s{medium("air", 1.0), {}, medium("s", 4.0), 550e-9};
    s.layers.push_back({"nofilm", 2.0, std::nullopt});
    CHECK_THROWS_AS(reflectance(s), std::invalid_argument);
    s.layers.clear();
    s.wavelength = -1.0;
    CHECK_THROWS_AS(reflectance(s), std::invalid_argument);
    s.wavelength = 550e-9;
    s.ambient.thickness = 1e-9;
    CHECK_THROWS_AS(reflectance(s), std::invalid_argument);
}
