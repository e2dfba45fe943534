#include "nfmimo/scattering.hpp"

#include "nfmimo/geometry.hpp"
#include "nfmimo/io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nfmimo
{
    namespace
    {
        constexpr double pi = std::numbers::pi;
        constexpr int max_placement_attempts = 100;
        constexpr double min_horizontal_clearance = 1e-6; // [m]

        // Wraps into [-pi, pi).
        double wrap_half_open(double a)
        {
            a = std::remainder(a, 2.0 * pi);
            if (a >= pi)
                a -= 2.0 * pi;
            return a;
        }

        // log I0(kappa), switching to the asymptotic expansion where exp(kappa) overflows.
        double log_bessel_i0(double kappa)
        {
            if (kappa < 500.0)
                return std::log(std::cyl_bessel_i(0.0, kappa));
            const double inv = 1.0 / (8.0 * kappa);
            const double series = 1.0 + inv + 9.0 * inv * inv / 2.0 + 225.0 * inv * inv * inv / 6.0;
            return kappa - 0.5 * std::log(2.0 * pi * kappa) + std::log(series);
        }
    }

    double von_mises_pdf(double alpha, double mu, double kappa)
    {
        if (!(kappa >= 0.0))
            throw std::invalid_argument("von Mises concentration must be non-negative");
        if (kappa == 0.0)
            return 1.0 / (2.0 * pi);
        return std::exp(kappa * std::cos(alpha - mu) - log_bessel_i0(kappa)) / (2.0 * pi);
    }

    double sample_von_mises(double mu, double kappa, rng &gen)
    {
        if (kappa < 1e-8)
            return gen.phase();

        const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
        const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
        const double r = (1.0 + rho * rho) / (2.0 * rho);

        double f = 0.0;
        for (;;)
        {
            const double u1 = gen.uniform(), u2 = gen.uniform();
            const double z = std::cos(pi * u1);
            f = (1.0 + r * z) / (r + z);
            const double c = kappa * (r - f);
            if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0)
                break;
        }
        const double theta = (gen.uniform() < 0.5 ? -1.0 : 1.0) * std::acos(std::clamp(f, -1.0, 1.0));
        return wrap_half_open(mu + theta);
    }

    std::size_t scatterer_field::ray_count() const
    {
        std::size_t n = 0;
        for (const auto &c : clusters)
            n += c.size();
        return n;
    }

    scatterer_field generate_scatterers(const scenario_config &cfg, rng &gen)
    {
        if (cfg.L_clusters < 1 || cfg.N_rays < 1)
            throw config_error("L_clusters", "scatterer field needs at least one cluster and one ray");

        const vec3 origin = bs_midpoint(cfg);
        const vec3 receiver = mr_midpoint(0.0, cfg);

        scatterer_field field;
        field.clusters.resize(static_cast<std::size_t>(cfg.L_clusters));
        for (auto &cluster : field.clusters)
        {
            const double az_mean = cfg.cluster_means ? sample_von_mises(cfg.mu_alpha, cfg.kappa, gen) : cfg.mu_alpha;
            const double el_mean = cfg.cluster_means ? sample_von_mises(cfg.mu_beta, cfg.kappa, gen) : cfg.mu_beta;
            const double spread = cfg.cluster_means ? cfg.kappa_ray : cfg.kappa;

            cluster.reserve(static_cast<std::size_t>(cfg.N_rays));
            for (int n = 0; n < cfg.N_rays; ++n)
            {
                bool placed = false;
                for (int attempt = 0; attempt < max_placement_attempts && !placed; ++attempt)
                {
                    const double az = sample_von_mises(az_mean, spread, gen);
                    const double el = sample_von_mises(el_mean, spread, gen);
                    const double dist = gen.uniform(cfg.r_min, cfg.r_max);
                    const vec3 dir{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
                    const vec3 pos = origin + dist * dir;
                    if (pos.z < 0.0 || (pos - origin).horizontal_norm() < min_horizontal_clearance ||
                        (pos - receiver).horizontal_norm() < min_horizontal_clearance)
                        continue;
                    cluster.push_back({pos, gen.phase()});
                    placed = true;
                }
                if (!placed)
                    throw config_error("scatterers", "could not place a scatterer above ground after " +
                                                      std::to_string(max_placement_attempts) + " attempts");
            }
        }
        return field;
    }

    scatterer_field generate_scatterers(const scenario_config &cfg, std::uint64_t seed)
    {
        rng gen(seed);
        auto field = generate_scatterers(cfg, gen);
        field.seed = seed;
        return field;
    }

    scatterer_field realization_field(const scenario_config &cfg, std::uint64_t master_seed, std::uint64_t index)
    {
        return generate_scatterers(cfg, stream_seed(master_seed, index));
    }

    void write_scatterers_csv(std::ostream &os, const scatterer_field &field)
    {
        os << "cluster,ray,x_m,y_m,z_m,phase_rad\n";
        for (std::size_t l = 0; l < field.clusters.size(); ++l)
            for (std::size_t n = 0; n < field.clusters[l].size(); ++n)
            {
                const auto &r = field.clusters[l][n];
                os << l + 1 << ',' << n + 1 << ',' << format_double(r.position.x) << ','
                   << format_double(r.position.y) << ',' << format_double(r.position.z) << ','
                   << format_double(r.phase) << '\n';
            }
    }

    scatterer_field read_scatterers_csv(std::istream &is)
    {
        std::string line;
        if (!std::getline(is, line))
            throw std::runtime_error("scatterer CSV is empty");

        scatterer_field field;
        std::size_t line_no = 1;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty() || line == "\r")
                continue;
            std::istringstream ls(line);
            std::string cell;
            std::vector<double> v;
            while (std::getline(ls, cell, ','))
            {
                try
                {
                    v.push_back(std::stod(cell));
                }
                catch (const std::exception &)
                {
                    throw std::runtime_error("scatterer CSV line " + std::to_string(line_no) + ": bad number '" +
                                             cell + "'");
                }
            }
            if (v.size() != 6 || v[0] < 1 || v[1] < 1)
                throw std::runtime_error("scatterer CSV line " + std::to_string(line_no) +
                                         ": expected cluster,ray,x,y,z,phase");
            const auto l = static_cast<std::size_t>(v[0]), n = static_cast<std::size_t>(v[1]);
            if (field.clusters.size() < l)
                field.clusters.resize(l);
            auto &cluster = field.clusters[l - 1];
            if (cluster.size() != n - 1)
                throw std::runtime_error("scatterer CSV line " + std::to_string(line_no) + ": rays out of order");
            cluster.push_back({{v[2], v[3], v[4]}, v[5]});
        }
        return field;
    }
}
