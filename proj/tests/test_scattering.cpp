#include "nfmimo/scattering.hpp"

#include <catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <numbers>
#include <sstream>

using namespace nfmimo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    constexpr double pi = std::numbers::pi;

    // I0 by its power series, sum (x/2)^(2m) / (m!)^2.
    double bessel_i0_series(double x)
    {
        double term = 1.0, sum = 1.0;
        for (int m = 1; m < 500 && term > 1e-17 * sum; ++m)
        {
            term *= (x / 2.0) * (x / 2.0) / (static_cast<double>(m) * m);
            sum += term;
        }
        return sum;
    }

    double pdf_oracle(double a, double mu, double kappa)
    {
        return std::exp(kappa * std::cos(a - mu)) / (2.0 * pi * bessel_i0_series(kappa));
    }

    // Probability mass of [lo, hi) by composite Simpson.
    double bin_mass(double lo, double hi, double mu, double kappa)
    {
        const int n = 64;
        const double h = (hi - lo) / n;
        double s = pdf_oracle(lo, mu, kappa) + pdf_oracle(hi, mu, kappa);
        for (int i = 1; i < n; ++i)
            s += (i % 2 ? 4.0 : 2.0) * pdf_oracle(lo + i * h, mu, kappa);
        return s * h / 3.0;
    }

    std::vector<double> histogram(double mu, double kappa, std::size_t n, int bins, std::uint64_t seed)
    {
        rng gen(seed);
        std::vector<double> counts(bins, 0.0);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double a = sample_von_mises(mu, kappa, gen);
            REQUIRE(a >= -pi);
            REQUIRE(a < pi);
            const int b = std::min(bins - 1, static_cast<int>((a + pi) / (2 * pi) * bins));
            counts[b] += 1.0;
        }
        return counts;
    }

    double chi_square(const std::vector<double> &counts, double mu, double kappa, std::size_t n)
    {
        const int bins = static_cast<int>(counts.size());
        double stat = 0.0;
        for (int b = 0; b < bins; ++b)
        {
            const double expected = n * bin_mass(-pi + 2 * pi * b / bins, -pi + 2 * pi * (b + 1) / bins, mu, kappa);
            stat += (counts[b] - expected) * (counts[b] - expected) / expected;
        }
        return stat;
    }

    double critical_value(int bins, double alpha)
    {
        return boost::math::quantile(boost::math::complement(boost::math::chi_squared(bins - 1), alpha));
    }
}

TEST_CASE("von Mises density")
{
    CHECK_THAT(von_mises_pdf(0.3, 0.0, 0.0), WithinAbs(1.0 / (2 * pi), 1e-15));
    CHECK_THAT(von_mises_pdf(-2.0, 1.0, 0.0), WithinAbs(0.15915, 1e-5));
    CHECK_THAT(von_mises_pdf(0.7, 0.7, 1.0), WithinRel(std::exp(1.0) / (2 * pi * bessel_i0_series(1.0)), 1e-13));
    CHECK_THAT(von_mises_pdf(0.7, 0.7, 1.0), WithinAbs(0.34171, 1e-5));
    CHECK_THAT(bessel_i0_series(1.0), WithinAbs(1.26607, 1e-5));
    CHECK_THROWS_AS(von_mises_pdf(0.0, 0.0, -1.0), std::invalid_argument);

    for (double kappa : {0.5, 3.0, 40.0})
        for (double x : {0.1, 1.0, 2.5})
            CHECK_THAT(von_mises_pdf(0.4 + x, 0.4, kappa), WithinRel(von_mises_pdf(0.4 - x, 0.4, kappa), 1e-14));

    SECTION("matches the series oracle")
    {
        for (double kappa : {0.01, 1.0, 3.0, 10.0, 100.0})
            for (double a = -3.0; a <= 3.0; a += 0.5)
                CHECK_THAT(von_mises_pdf(a, 0.2, kappa), WithinRel(pdf_oracle(a, 0.2, kappa), 1e-11));
    }
    SECTION("integrates to one, including the asymptotic branch")
    {
        for (double kappa : {0.0, 3.0, 499.0, 501.0, 2000.0})
        {
            const int n = 200000;
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += von_mises_pdf(-pi + (i + 0.5) * 2 * pi / n, 0.0, kappa);
            CHECK_THAT(s * 2 * pi / n, WithinAbs(1.0, 1e-9));
        }
    }
}

TEST_CASE("von Mises sampler goodness of fit")
{
    const std::size_t n = 100000;
    SECTION("uniform limit over 16 bins")
    {
        const auto counts = histogram(0.0, 0.0, n, 16, 11);
        CHECK(chi_square(counts, 0.0, 0.0, n) < critical_value(16, 0.01));
    }
    SECTION("64 bins at several concentrations")
    {
        for (double kappa : {0.0, 1.0, 3.0, 10.0})
        {
            const auto counts = histogram(0.5, kappa, n, 64, 23);
            INFO("kappa = " << kappa);
            CHECK(chi_square(counts, 0.5, kappa, n) < critical_value(64, 0.01));
        }
    }
    SECTION("circular mean at kappa = 10")
    {
        rng gen(5);
        double s = 0.0, c = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double a = sample_von_mises(0.0, 10.0, gen);
            s += std::sin(a);
            c += std::cos(a);
        }
        CHECK(std::abs(std::atan2(s, c)) < 0.02);
    }
    SECTION("binwise shape at kappa = 3 over 1e6 samples")
    {
        // Tail bins hold only ~160 expected samples, so the 5% bound is applied where the
        // Poisson spread is small (expected count >= 1e4) and the chi-square covers the rest.
        const std::size_t big = 1000000;
        const auto counts = histogram(0.0, 3.0, big, 64, 31);
        double worst = 0.0;
        for (int b = 0; b < 64; ++b)
        {
            const double expected = big * bin_mass(-pi + 2 * pi * b / 64, -pi + 2 * pi * (b + 1) / 64, 0.0, 3.0);
            if (expected >= 1e4)
                worst = std::max(worst, std::abs(counts[b] - expected) / expected);
        }
        CHECK(worst < 0.05);
        CHECK(chi_square(counts, 0.0, 3.0, big) < critical_value(64, 0.01));
    }
    SECTION("huge concentration stays finite and centered")
    {
        rng gen(9);
        for (int i = 0; i < 1000; ++i)
            CHECK(std::abs(sample_von_mises(1.0, 1e8, gen) - 1.0) < 1e-2);
    }
}

TEST_CASE("scatterer fields")
{
    const scenario_config cfg;
    const auto field = generate_scatterers(cfg, 42);
    CHECK(field.ray_count() == 100u);
    CHECK(field.clusters.size() == 5u);

    const vec3 d_T{0.0, 0.0, cfg.H_0 + 0.5 * cfg.P_v * cfg.delta_T};
    for (const auto &cluster : field.clusters)
        for (const auto &r : cluster)
        {
            CHECK(r.position.z >= 0.0);
            const double dist = (r.position - d_T).norm();
            CHECK(dist >= cfg.r_min - 1e-9);
            CHECK(dist <= cfg.r_max + 1e-9);
            CHECK(r.phase >= -pi);
            CHECK(r.phase < pi);
        }

    SECTION("deterministic per seed")
    {
        const auto again = generate_scatterers(cfg, 42);
        const auto other = generate_scatterers(cfg, 43);
        bool same = true, differs = false;
        for (std::size_t l = 0; l < field.clusters.size(); ++l)
            for (std::size_t n = 0; n < field.clusters[l].size(); ++n)
            {
                same = same && field.clusters[l][n].position == again.clusters[l][n].position &&
                       field.clusters[l][n].phase == again.clusters[l][n].phase;
                differs = differs || field.clusters[l][n].phase != other.clusters[l][n].phase;
            }
        CHECK(same);
        CHECK(differs);
    }
    SECTION("realization streams are independent of each other")
    {
        const auto a = realization_field(cfg, 1, 0), b = realization_field(cfg, 1, 1), a2 = realization_field(cfg, 1, 0);
        CHECK(a.clusters[0][0].phase == a2.clusters[0][0].phase);
        CHECK(a.clusters[0][0].phase != b.clusters[0][0].phase);
    }
    SECTION("azimuth concentration for large kappa")
    {
        scenario_config tight = cfg;
        tight.kappa = tight.kappa_ray = 100.0;
        tight.L_clusters = 20;
        const auto f = generate_scatterers(tight, 8);
        double s = 0.0, s2 = 0.0;
        for (const auto &cluster : f.clusters)
            for (const auto &r : cluster)
            {
                const double az = std::atan2(r.position.y - d_T.y, r.position.x - d_T.x);
                s += az;
                s2 += az * az;
            }
        const double n = static_cast<double>(f.ray_count());
        const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
        CHECK(sd < 3.0 / std::sqrt(tight.kappa));
    }
    SECTION("placement failure is reported")
    {
        scenario_config buried = cfg;
        buried.H_0 = 1.0;
        buried.P_v = 1;
        buried.mu_beta = -pi / 2;
        buried.kappa = buried.kappa_ray = 1e6;
        buried.r_min = buried.r_max = 30.0;
        CHECK_THROWS_AS(generate_scatterers(buried, 1), config_error);
    }
    SECTION("CSV round trip")
    {
        std::stringstream io;
        write_scatterers_csv(io, field);
        const std::string text = io.str();
        CHECK(text.rfind("cluster,ray,x_m,y_m,z_m,phase_rad\n", 0) == 0);
        const auto back = read_scatterers_csv(io);
        REQUIRE(back.clusters.size() == field.clusters.size());
        for (std::size_t l = 0; l < field.clusters.size(); ++l)
        {
            REQUIRE(back.clusters[l].size() == field.clusters[l].size());
            for (std::size_t n = 0; n < field.clusters[l].size(); ++n)
            {
                CHECK(back.clusters[l][n].position == field.clusters[l][n].position);
                CHECK(back.clusters[l][n].phase == field.clusters[l][n].phase);
            }
        }
        std::istringstream bad("cluster,ray,x_m,y_m,z_m,phase_rad\n1,1,0,0\n");
        CHECK_THROWS(read_scatterers_csv(bad));
    }
}
