#pragma once

#include "nfmimo/config.hpp"
#include "nfmimo/scattering.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <vector>

namespace nfmimo
{
    using cplx = std::complex<double>;

    // BS element at row h (1..P_h) and column v (1..P_v).
    struct element
    {
        int h = 1;
        int v = 1;
    };

    // Column of element p in the channel matrix: (v - 1) * P_h + (h - 1), 0-based.
    inline int column_index(element p, int P_h) { return (p.v - 1) * P_h + (p.h - 1); }
    inline element element_at(int column, int P_h) { return {column % P_h + 1, column / P_h + 1}; }

    // LoS coefficient of antenna pair (p, q) at time t: a product of unit phasors (bulk path phase,
    // BS and MR steering, Doppler) with angles evaluated at the subarray center holding p.
    cplx cir_los(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model);

    // NLoS coefficient, the 1/sqrt(L N) normalized sum over all rays of `field`.
    cplx cir_nlos(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model,
                  const scatterer_field &field);

    struct cir_components
    {
        cplx los;                      // sqrt(K/(K+1)) * cir_los
        cplx nlos;                     // sqrt(1/(K+1)) * cir_nlos
        double tau_los;                // [s]
        std::vector<double> tau_nlos;  // per ray, cluster-major [s]

        cplx narrowband() const { return los + nlos; }
    };

    // Rician-weighted LoS and NLoS coefficients with their path delays. With K >= 1e12 the
    // NLoS part is zero and `field` may be empty.
    cir_components cir_total(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model,
                             const scatterer_field &field);

    // LoS delay xi_TR(t) / c between the array midpoints.
    double los_delay(double t, const scenario_config &cfg);

    // Per-ray NLoS delays (xi_T + xi_R(t)) / c.
    std::vector<double> nlos_delays(double t, const scenario_config &cfg, const scatterer_field &field);

    struct channel_realization
    {
        double t = 0.0;
        Eigen::MatrixXcd H; // Q x (P_h P_v), column index per column_index()
        double tau_los = 0.0;
        std::vector<double> tau_nlos;
        wavefront_model model = wavefront_model::spherical();
        int P_h = 0;
        int P_v = 0;

        int Q() const { return static_cast<int>(H.rows()); }
        int P() const { return static_cast<int>(H.cols()); }
        cplx at(element p, int q) const { return H(q - 1, column_index(p, P_h)); }
    };

    // Narrowband channel matrix: every entry is cir_total(...).narrowband().
    channel_realization channel_matrix(double t, const scenario_config &cfg, const wavefront_model &model,
                                       const scatterer_field &field);

    enum class band_check
    {
        enforce, // f must lie within f_c +- 25 MHz
        ignore
    };
    inline constexpr double half_bandwidth = 25e6;

    // Unweighted LoS and NLoS frequency responses at frequency f [Hz]. The bulk path phase is
    // carried by exp(-j 2 pi f tau) instead of the carrier wavelength.
    struct transfer_components
    {
        cplx los;
        cplx nlos;
    };
    transfer_components transfer_function_components(element p, int q, double t, double f,
                                                     const scenario_config &cfg, const wavefront_model &model,
                                                     const scatterer_field &field,
                                                     band_check check = band_check::enforce);

    // Rician-weighted frequency response of pair (p, q) at f. Equals cir_total(...).narrowband() at f = f_c.
    cplx transfer_function(element p, int q, double t, double f, const scenario_config &cfg,
                           const wavefront_model &model, const scatterer_field &field,
                           band_check check = band_check::enforce);

    // CSV "p,q,re,im" with p the 1-based column index and q the 1-based MR element.
    void write_channel_csv(std::ostream &os, const channel_realization &ch);

    // Raw little-endian dump: for each row q, for each column p, re then im as IEEE 754 binary64.
    void write_channel_binary(std::ostream &os, const channel_realization &ch);
    Eigen::MatrixXcd read_channel_binary(std::istream &is, int Q, int P);
}
