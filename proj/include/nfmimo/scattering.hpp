#pragma once

#include "nfmimo/config.hpp"
#include "nfmimo/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace nfmimo
{
    // von Mises density exp(kappa cos(alpha - mu)) / (2 pi I0(kappa)). Throws for kappa < 0.
    double von_mises_pdf(double alpha, double mu, double kappa);

    // Exact von Mises draw on [-pi, pi) using the Best-Fisher wrapped-Cauchy rejection sampler.
    double sample_von_mises(double mu, double kappa, rng &gen);

    struct ray
    {
        vec3 position; // scatterer location [m]
        double phase;  // random phase on [-pi, pi)
    };

    struct scatterer_field
    {
        std::vector<std::vector<ray>> clusters; // [cluster][ray]
        std::uint64_t seed = 0;

        std::size_t ray_count() const;
        bool empty() const { return ray_count() == 0; }
    };

    // Draws L_clusters x N_rays scatterers around the BS midpoint. Rays landing below ground or
    // vertically above either array midpoint are redrawn; 100 consecutive failures throw config_error.
    scatterer_field generate_scatterers(const scenario_config &cfg, rng &gen);
    scatterer_field generate_scatterers(const scenario_config &cfg, std::uint64_t seed);

    // Field owned by Monte Carlo realization `index` of a run seeded with `master_seed`.
    scatterer_field realization_field(const scenario_config &cfg, std::uint64_t master_seed, std::uint64_t index);

    // CSV with header "cluster,ray,x_m,y_m,z_m,phase_rad"; cluster and ray are 1-based.
    void write_scatterers_csv(std::ostream &os, const scatterer_field &field);
    scatterer_field read_scatterers_csv(std::istream &is);
}
