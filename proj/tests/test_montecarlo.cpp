#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "chainsim/io.hpp"
#include "chainsim/montecarlo.hpp"

using namespace chainsim;

namespace {
std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}
}  // namespace

TEST_CASE("fit recovers exact parameters from a synthetic surface") {
    const double alpha = 0.21, beta = 0.045;
    const auto surface =
        synthetic_surface(linspace(10, 120, 12), linspace(0.05, 0.5, 10), alpha, beta);
    const auto fit = fit_empirical(surface, GammaMode::relative);
    CHECK(fit.alpha == Catch::Approx(alpha).margin(1e-6));
    CHECK(fit.beta == Catch::Approx(beta).margin(1e-6));
    CHECK(fit.r_squared > 1.0 - 1e-9);
}

TEST_CASE("fit tolerates multiplicative noise on the surface") {
    const double alpha = 0.15, beta = 0.07;
    auto surface =
        synthetic_surface(linspace(10, 120, 12), linspace(0.05, 0.5, 10), alpha, beta);
    std::mt19937_64 eng(404);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (auto& row : surface.mean_gamma_rel)
        for (auto& g : row) g = std::clamp(g * (1.0 + noise(eng)), 0.0, 0.999);
    const auto fit = fit_empirical(surface, GammaMode::relative);
    CHECK(fit.alpha == Catch::Approx(alpha).epsilon(0.05));
    CHECK(fit.beta == Catch::Approx(beta).margin(0.02));
    CHECK(fit.r_squared > 0.9);
}

TEST_CASE("gauss-newton refinement stays within 5% on clean data") {
    const double alpha = 0.3, beta = 0.0;
    const auto surface =
        synthetic_surface(linspace(20, 100, 9), linspace(0.1, 0.4, 7), alpha, beta);
    const auto fit = fit_empirical(surface, GammaMode::relative, 50);
    CHECK(std::abs(fit.alpha - alpha) / alpha < 0.05);
}

TEST_CASE("predicted gamma closed form") {
    EmpiricalFit fit;
    fit.alpha = 0.5;
    fit.beta = 0.0;
    // 1 - exp(-0.5 * 33 * 0.02) = 1 - exp(-0.33)
    CHECK(predicted_gamma(fit, 33.0, std::sqrt(0.02)) ==
          Catch::Approx(1.0 - std::exp(-0.33)).margin(1e-15));
    fit.alpha = std::log(2.0);
    CHECK(predicted_gamma(fit, 1.0, 1.0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(predicted_gamma(fit, 0.0, 0.3) == 0.0);
    CHECK(predicted_gamma(fit, 10.0, 0.0) == 0.0);
    CHECK_THROWS_AS(predicted_gamma(fit, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("surface sweep on a small chain") {
    const ChainSpec chain{90, 0.70710678, 20, 20};
    const auto pk = default_packet(chain);
    DisorderModel model{Distribution::uniform, 0.0, 4242};
    const std::vector<double> times = {20.0, 35.0, 50.0};
    const std::vector<double> deltas = {0.0, 0.15, 0.3, 0.45};
    const auto grid = gamma_surface(chain, model, times, deltas, 24, pk, 4);

    SECTION("shapes and metadata") {
        REQUIRE(grid.mean_gamma_raw.size() == times.size());
        REQUIRE(grid.mean_gamma_raw[0].size() == deltas.size());
        CHECK(grid.trials == 24);
        CHECK(grid.seed == 4242);
        CHECK(grid.geometry == SurfaceGeometry::fixed_chain);
    }
    SECTION("delta = 0 column has no real spread and matches the baseline") {
        for (std::size_t it = 0; it < times.size(); ++it) {
            // identical trials; only summation cancellation error remains
            CHECK(grid.stderr_gamma_raw[it][0] < 1e-7);
            if (grid.baseline_cb[it] >= kBaselineFloor)
                CHECK(grid.mean_gamma_rel[it][0] == Catch::Approx(0.0).margin(1e-12));
            CHECK(grid.mean_gamma_raw[it][0] ==
                  Catch::Approx(1.0 - grid.baseline_cb[it]).margin(1e-12));
        }
    }
    SECTION("mean raw gamma is nondecreasing in delta within 2 stderr") {
        for (std::size_t it = 0; it < times.size(); ++it)
            for (std::size_t id = 0; id + 1 < deltas.size(); ++id) {
                const double gap =
                    grid.mean_gamma_raw[it][id + 1] - grid.mean_gamma_raw[it][id];
                const double se = std::hypot(grid.stderr_gamma_raw[it][id],
                                             grid.stderr_gamma_raw[it][id + 1]);
                CHECK(gap >= -2.0 * se);
            }
    }
    SECTION("identical inputs give bit-identical surfaces") {
        const auto again = gamma_surface(chain, model, times, deltas, 24, pk, 1);
        CHECK(again.mean_gamma_raw == grid.mean_gamma_raw);
        CHECK(again.stderr_gamma_rel == grid.stderr_gamma_rel);
        CHECK(again.baseline_cb == grid.baseline_cb);
    }
    SECTION("thread count does not change the result") {
        const auto eight = gamma_surface(chain, model, times, deltas, 24, pk, 8);
        CHECK(eight.mean_gamma_raw == grid.mean_gamma_raw);
        CHECK(eight.mean_gamma_rel == grid.mean_gamma_rel);
    }
}

TEST_CASE("arrival-matched geometry sizes the chain per time") {
    const ChainSpec chain{80, 0.70710678, 20, 20};
    const auto pk = default_packet(chain);
    DisorderModel model{Distribution::uniform, 0.0, 7};
    const std::vector<double> times = {10.0, 30.0, 60.0};
    const auto grid = gamma_surface(chain, model, times, {0.0, 0.2}, 8, pk, 4,
                                    SurfaceGeometry::arrival_matched);
    REQUIRE(grid.n_sites_per_time.size() == 3);
    const double v = 2.0 * chain.coupling_j;
    for (std::size_t it = 0; it < times.size(); ++it) {
        const int expect = std::max(
            static_cast<int>(std::lround(pk.center + v * times[it] + chain.bob_size / 2.0)),
            chain.alice_size + chain.bob_size);
        CHECK(grid.n_sites_per_time[it] == expect);
        // sized for arrival: the clean packet should actually be with Bob
        CHECK(grid.baseline_cb[it] > 0.5);
    }
}

TEST_CASE("cell filtering excludes saturated and unresolvable cells") {
    auto surface = synthetic_surface({0.0, 10.0, 20.0}, {0.1, 0.2}, 0.2, 0.0);
    surface.mean_gamma_rel[1][1] = 0.9995;  // saturated
    surface.baseline_cb[2] = 1e-12;         // baseline below the floor
    CHECK_FALSE(fit_cell_usable(surface, GammaMode::relative, 0, 0));  // t = 0
    CHECK(fit_cell_usable(surface, GammaMode::relative, 1, 0));
    CHECK_FALSE(fit_cell_usable(surface, GammaMode::relative, 1, 1));
    CHECK_FALSE(fit_cell_usable(surface, GammaMode::relative, 2, 0));
    CHECK(fit_cell_usable(surface, GammaMode::raw, 2, 0));  // raw ignores baseline
}

TEST_CASE("fit rejects underdetermined and inverted surfaces") {
    SECTION("too few usable cells") {
        const auto surface = synthetic_surface({10.0}, {0.1, 0.2}, 0.2, 0.0);
        CHECK_THROWS_WITH(fit_empirical(surface),
                          Catch::Matchers::ContainsSubstring("fewer than 6 usable cells"));
    }
    SECTION("negative curvature") {
        auto surface = synthetic_surface(linspace(10, 60, 6), linspace(0.1, 0.4, 4), 0.2, 0.0);
        // flip the delta trend so gamma decreases with disorder
        for (auto& row : surface.mean_gamma_rel) std::reverse(row.begin(), row.end());
        CHECK_THROWS_WITH(fit_empirical(surface),
                          Catch::Matchers::ContainsSubstring("alpha is not positive"));
    }
}

TEST_CASE("surface CSV round trip preserves the fit") {
    const ChainSpec chain{90, 0.70710678, 20, 20};
    const auto pk = default_packet(chain);
    DisorderModel model{Distribution::uniform, 0.0, 11};
    const auto grid =
        gamma_surface(chain, model, linspace(10, 60, 6), linspace(0.1, 0.45, 8), 16, pk, 4,
                      SurfaceGeometry::arrival_matched);
    const std::string csv = surface_to_csv(grid, GammaMode::relative, "test");
    std::istringstream in(csv);
    const auto [back, mode] = surface_from_csv(in);
    CHECK(mode == GammaMode::relative);
    REQUIRE(back.times.size() == grid.times.size());
    REQUIRE(back.deltas.size() == grid.deltas.size());
    // CSV carries 12 significant digits, not full binary doubles
    for (std::size_t i = 0; i < grid.times.size(); ++i)
        CHECK(back.times[i] == Catch::Approx(grid.times[i]).epsilon(1e-11));
    for (std::size_t i = 0; i < grid.deltas.size(); ++i)
        CHECK(back.deltas[i] == Catch::Approx(grid.deltas[i]).epsilon(1e-11));
    CHECK(back.trials == grid.trials);
    CHECK(back.seed == grid.seed);
    CHECK(back.distribution == grid.distribution);
    const auto direct = fit_empirical(grid, GammaMode::relative);
    const auto loaded = fit_empirical(back, GammaMode::relative);
    // CSV carries 12 significant digits
    CHECK(loaded.alpha == Catch::Approx(direct.alpha).epsilon(1e-9));
    CHECK(loaded.beta == Catch::Approx(direct.beta).margin(1e-9));
}

TEST_CASE("surface input validation") {
    const ChainSpec chain{60, 1.0, 15, 15};
    const auto pk = default_packet(chain);
    DisorderModel model{Distribution::uniform, 0.0, 1};
    CHECK_THROWS_AS(gamma_surface(chain, model, {}, {0.1}, 4, pk), std::invalid_argument);
    CHECK_THROWS_AS(gamma_surface(chain, model, {10.0}, {0.1}, 0, pk), std::invalid_argument);
    CHECK_THROWS_AS(gamma_surface(chain, model, {20.0, 10.0}, {0.1}, 4, pk),
                    std::invalid_argument);
}
