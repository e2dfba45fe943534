#pragma once

#include "nfmimo/channel.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nfmimo
{
    struct antenna_pair
    {
        element p{1, 1};
        int q = 1;
    };

    // Offset between the two antenna pairs of a spatial correlation.
    struct spatial_lag
    {
        int dp_h = 0;
        int dp_v = 0;
        int dq = 0;
    };

    struct mc_options
    {
        std::size_t n_realizations = 500;
        std::uint64_t seed = 1;
    };

    // Normalized correlation split into its Rician parts:
    // value = w_los * los + w_nlos * nlos with w_los = K/(K+1), w_nlos = 1/(K+1).
    struct correlation_estimate
    {
        cplx value;
        cplx los;                  // deterministic LoS phasor ratio
        cplx nlos;                 // Monte Carlo mean of normalized NLoS products
        double w_los = 0.0;
        double w_nlos = 0.0;
        std::size_t used = 0;      // realizations contributing to `nlos`
        std::size_t excluded = 0;  // realizations dropped for a zero-magnitude NLoS coefficient
    };

    // Independent scatterer fields, one private RNG stream per realization index.
    std::vector<scatterer_field> realization_fields(const scenario_config &cfg, const mc_options &opts);

    // Space-time correlation between h_a(t) and h_b(t + dt).
    correlation_estimate st_ccf(const antenna_pair &a, const antenna_pair &b, double dt, double t,
                                const scenario_config &cfg, const wavefront_model &model,
                                std::span<const scatterer_field> fields);
    correlation_estimate st_ccf(const antenna_pair &a, const antenna_pair &b, double dt, double t,
                                const scenario_config &cfg, const wavefront_model &model, const mc_options &opts);
    correlation_estimate st_ccf(const spatial_lag &lag, double dt, double t, const scenario_config &cfg,
                                const wavefront_model &model, const mc_options &opts, const antenna_pair &ref = {});

    // st_ccf with zero spatial lag.
    correlation_estimate temporal_acf(double dt, double t, const scenario_config &cfg, const wavefront_model &model,
                                      std::span<const scatterer_field> fields, const antenna_pair &a = {});
    correlation_estimate temporal_acf(double dt, double t, const scenario_config &cfg, const wavefront_model &model,
                                      const mc_options &opts, const antenna_pair &a = {});

    // Correlation between h_a(t, f_c) and h_a(t, f_c + df). df must be non-negative and, unless
    // `check` is band_check::ignore, at most 25 MHz.
    correlation_estimate frequency_cf(double df, double t, const scenario_config &cfg, const wavefront_model &model,
                                      std::span<const scatterer_field> fields, const antenna_pair &a = {},
                                      band_check check = band_check::enforce);
    correlation_estimate frequency_cf(double df, double t, const scenario_config &cfg, const wavefront_model &model,
                                      const mc_options &opts, const antenna_pair &a = {},
                                      band_check check = band_check::enforce);

    // Scales H so that ||H||_F^2 = P Q. Throws std::domain_error for an all-zero matrix.
    Eigen::MatrixXcd normalize_channel(const Eigen::MatrixXcd &H);

    // log2 det(I_Q + rho/P Hn Hn^H) [bit/s/Hz] with Hn = normalize_channel(H) and P = number of columns.
    double capacity(const Eigen::MatrixXcd &H, double rho_snr);
    double capacity(const channel_realization &ch, double rho_snr);

    // 10 log10 of the summed relative deviation |h - h_sph| / |h_sph| over all antenna pairs, with the
    // spherical model as reference and the same scatterer field for both. Returns -infinity when the
    // deviation is exactly zero. Throws std::invalid_argument for the spherical model itself.
    double model_error_delta(const wavefront_model &model, double t, const scenario_config &cfg,
                             const scatterer_field &field);

    // Same metric for two precomputed channel matrices of equal shape.
    double model_error_delta(const Eigen::MatrixXcd &spherical, const Eigen::MatrixXcd &candidate);

    // Real-operation counts of one angle evaluation per subarray.
    inline constexpr long long ro_los_per_subarray = 6 + 2 + 2 + 1 + 32 + 4;   // 47
    inline constexpr long long ro_nlos_per_subarray = 10 + 4 + 4 + 2 + 64 + 4; // 88

    struct complexity_report
    {
        long long ro_total = 0;
        double ro_los_per_pair = 0.0;  // average LoS ROs per antenna pair
        double ro_nlos_per_pair = 0.0; // average NLoS ROs per antenna pair
        int counts_h = 0;
        int counts_v = 0;
        wavefront_model model = wavefront_model::spherical();
    };

    // Angle-generation cost counts_h * counts_v * Q * (47 + 88).
    complexity_report ro_complexity(const wavefront_model &model, const scenario_config &cfg);
}
