#pragma once

#include "nfmimo/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace test_oracle
{
    using nfmimo::scatterer_field;
    using nfmimo::scenario_config;
    using cplx = std::complex<double>;
    constexpr double pi = std::numbers::pi;

    // Brute-force oracle: every position, angle and phase term accumulated from scratch.
    struct oracle
    {
        const scenario_config &cfg;
        int pmh, pmv; // largest subarray, P_h / P_v for a single block

        double k() const { return 2 * pi * cfg.f_c / cfg.c; }
        static double idx(int i, int n) { return (n - 2.0 * i + 1.0) / 2.0; }

        std::array<double, 3> center(int h, int v) const
        {
            const int sh = (h - 1) / pmh + 1, sv = (v - 1) / pmv + 1;
            const int nh = std::min(pmh, cfg.P_h - (sh - 1) * pmh), nv = std::min(pmv, cfg.P_v - (sv - 1) * pmv);
            const double off = ((sh - 1) * pmh + nh / 2.0 - cfg.P_h / 2.0) * cfg.delta_T;
            return {off * std::cos(cfg.psi_T), off * std::sin(cfg.psi_T), cfg.H_0 + ((sv - 1) * pmv + nv / 2.0) * cfg.delta_T};
        }
        std::array<double, 3> mr(int q, double t) const
        {
            const double a = idx(q, cfg.Q) * cfg.delta_R;
            return {cfg.D_0 + a * std::cos(cfg.psi_R) * std::cos(cfg.theta_R) + cfg.v_R * t * std::cos(cfg.eta_R),
                    a * std::sin(cfg.psi_R) * std::cos(cfg.theta_R) + cfg.v_R * t * std::sin(cfg.eta_R),
                    a * std::sin(cfg.theta_R)};
        }
        std::array<double, 3> bs_mid() const { return {0, 0, cfg.H_0 + cfg.P_v * cfg.delta_T / 2}; }
        std::array<double, 3> mr_mid(double t) const
        {
            return {cfg.D_0 + cfg.v_R * t * std::cos(cfg.eta_R), cfg.v_R * t * std::sin(cfg.eta_R), 0};
        }
        static double dist(std::array<double, 3> a, std::array<double, 3> b)
        {
            return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
        }
        double bs_term(int h, int v, double az, double el) const
        {
            return k() * idx(h, cfg.P_h) * cfg.delta_T * std::cos(az - cfg.psi_T) * std::cos(el) +
                   k() * idx(v, cfg.P_v) * cfg.delta_T * std::sin(el);
        }
        double mr_term(int q, double t, double az, double el) const
        {
            return k() * idx(q, cfg.Q) * cfg.delta_R * std::cos(az - cfg.psi_R) * std::cos(el) * std::cos(cfg.theta_R) +
                   k() * idx(q, cfg.Q) * cfg.delta_R * std::sin(el) * std::sin(cfg.theta_R) +
                   k() * cfg.v_R * t * std::cos(az - cfg.eta_R) * std::cos(el);
        }

        cplx los(int h, int v, int q, double t) const
        {
            const auto c = center(h, v), d = mr(q, t);
            const double az = std::atan2(d[1] - c[1], d[0] - c[0]);
            const double el = std::atan((c[2] - d[2]) / std::hypot(d[0] - c[0], d[1] - c[1]));
            const double phase = -k() * dist(mr_mid(t), bs_mid()) + bs_term(h, v, az, el) + mr_term(q, t, pi - az, el);
            return std::polar(1.0, phase);
        }

        cplx nlos(int h, int v, int q, double t, const scatterer_field &f) const
        {
            const auto c = center(h, v), d = mr(q, t);
            cplx sum = 0;
            for (const auto &cl : f.clusters)
                for (const auto &r : cl)
                {
                    const std::array<double, 3> s{r.position.x, r.position.y, r.position.z};
                    const double az_t = std::atan2(s[1] - c[1], s[0] - c[0]);
                    const double el_t = std::atan((s[2] - c[2]) / std::hypot(s[0] - c[0], s[1] - c[1]));
                    const double az_r = std::atan2(s[1] - d[1], s[0] - d[0]);
                    const double el_r = std::atan((s[2] - d[2]) / std::hypot(s[0] - d[0], s[1] - d[1]));
                    const double len = dist(s, bs_mid()) + dist(s, mr_mid(t));
                    sum += std::polar(1.0, r.phase - k() * len + bs_term(h, v, az_t, el_t) + mr_term(q, t, az_r, el_r));
                }
            return sum / std::sqrt(static_cast<double>(f.ray_count()));
        }
    };
}
