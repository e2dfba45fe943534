#include "nfmimo/channel.hpp"

#include "nfmimo/geometry.hpp"
#include "nfmimo/io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace nfmimo
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        double wavenumber(const scenario_config &cfg) { return two_pi / cfg.lambda(); }

        // BS steering phase of element (k_h, k_v) is k_h * A + k_v * B.
        struct bs_steering
        {
            double A;
            double B;

            double phase(double k_h, double k_v) const { return k_h * A + k_v * B; }
        };

        bs_steering bs_steering_terms(const ray_direction &dep, const scenario_config &cfg)
        {
            const double kd = wavenumber(cfg) * cfg.delta_T;
            return {kd * std::cos(dep.azimuth - cfg.psi_T) * std::cos(dep.elevation), kd * std::sin(dep.elevation)};
        }

        // MR steering plus Doppler phase of element k_q at time t for an arrival direction.
        double mr_phase(double k_q, double t, const ray_direction &arr, const scenario_config &cfg)
        {
            const double k = wavenumber(cfg);
            const double cos_el = std::cos(arr.elevation);
            return k * k_q * cfg.delta_R * std::cos(arr.azimuth - cfg.psi_R) * cos_el * std::cos(cfg.theta_R) +
                   k * k_q * cfg.delta_R * std::sin(arr.elevation) * std::sin(cfg.theta_R) +
                   k * cfg.v_R * t * std::cos(arr.azimuth - cfg.eta_R) * cos_el;
        }

        double los_path_length(double t, const scenario_config &cfg)
        {
            const double xi = (mr_midpoint(t, cfg) - bs_midpoint(cfg)).norm();
            if (xi == 0.0)
                throw geometry_error("MR midpoint coincides with the BS midpoint");
            return xi;
        }

        struct ray_path
        {
            double xi_T;
            double xi_R;
        };

        ray_path ray_path_length(const vec3 &scatterer, double t, const scenario_config &cfg)
        {
            return {(scatterer - bs_midpoint(cfg)).norm(), (scatterer - mr_midpoint(t, cfg)).norm()};
        }

        void check_element(element p, int q, const scenario_config &cfg)
        {
            if (p.h < 1 || p.h > cfg.P_h || p.v < 1 || p.v > cfg.P_v)
                throw std::out_of_range("BS element (" + std::to_string(p.h) + "," + std::to_string(p.v) +
                                        ") outside the array");
            if (q < 1 || q > cfg.Q)
                throw std::out_of_range("MR element " + std::to_string(q) + " outside 1.." + std::to_string(cfg.Q));
        }

        vec3 center_for(element p, const scenario_config &cfg, const wavefront_model &model)
        {
            model.validate_for(cfg);
            return subarray_center_of(p.h, p.v, model.p_max_h(cfg), model.p_max_v(cfg), cfg);
        }

        // LoS phase split into the bulk path length and everything else.
        struct los_phase_parts
        {
            double xi;
            double rest;
        };

        los_phase_parts los_parts(element p, int q, double t, const scenario_config &cfg,
                                  const wavefront_model &model)
        {
            check_element(p, q, cfg);
            const vec3 d_q = mr_element_position(q, t, cfg);
            const ray_direction dep = ray_angles(center_for(p, cfg, model), d_q, angle_convention::departure_los);
            const ray_direction arr = los_arrival(dep);
            const double rest = bs_steering_terms(dep, cfg).phase(centered_index(p.h, cfg.P_h),
                                                                  centered_index(p.v, cfg.P_v)) +
                                mr_phase(centered_index(q, cfg.Q), t, arr, cfg);
            return {los_path_length(t, cfg), rest};
        }

        // Per-ray NLoS phase, with the bulk path length kept separate.
        template <typename Fn>
        void for_each_nlos_ray(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model,
                               const scatterer_field &field, Fn &&fn)
        {
            check_element(p, q, cfg);
            if (field.empty())
                throw std::invalid_argument("scatterer field is empty");

            const vec3 center = center_for(p, cfg, model);
            const vec3 d_q = mr_element_position(q, t, cfg);
            const double k_h = centered_index(p.h, cfg.P_h), k_v = centered_index(p.v, cfg.P_v);
            const double k_q = centered_index(q, cfg.Q);
            for (const auto &cluster : field.clusters)
                for (const auto &r : cluster)
                {
                    const ray_direction dep = ray_angles(center, r.position, angle_convention::departure_nlos);
                    const ray_direction arr = ray_angles(d_q, r.position, angle_convention::arrival_nlos);
                    const double rest = r.phase + bs_steering_terms(dep, cfg).phase(k_h, k_v) + mr_phase(k_q, t, arr, cfg);
                    const ray_path len = ray_path_length(r.position, t, cfg);
                    fn(len.xi_T + len.xi_R, rest);
                }
        }

        double nlos_norm(const scatterer_field &field)
        {
            return 1.0 / std::sqrt(static_cast<double>(field.ray_count()));
        }
    }

    double los_delay(double t, const scenario_config &cfg)
    {
        return los_path_length(t, cfg) / cfg.c;
    }

    std::vector<double> nlos_delays(double t, const scenario_config &cfg, const scatterer_field &field)
    {
        std::vector<double> tau;
        tau.reserve(field.ray_count());
        for (const auto &cluster : field.clusters)
            for (const auto &r : cluster)
            {
                const ray_path len = ray_path_length(r.position, t, cfg);
                tau.push_back((len.xi_T + len.xi_R) / cfg.c);
            }
        return tau;
    }

    cplx cir_los(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model)
    {
        const auto parts = los_parts(p, q, t, cfg, model);
        return std::polar(1.0, -wavenumber(cfg) * parts.xi + parts.rest);
    }

    cplx cir_nlos(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model,
                  const scatterer_field &field)
    {
        const double k = wavenumber(cfg);
        cplx sum = 0.0;
        for_each_nlos_ray(p, q, t, cfg, model, field,
                          [&](double length, double rest) { sum += std::polar(1.0, -k * length + rest); });
        return sum * nlos_norm(field);
    }

    cir_components cir_total(element p, int q, double t, const scenario_config &cfg, const wavefront_model &model,
                             const scatterer_field &field)
    {
        const auto w = amplitude_weights(cfg.K);
        cir_components out;
        out.los = w.los * cir_los(p, q, t, cfg, model);
        out.tau_los = los_delay(t, cfg);
        if (w.nlos > 0.0)
        {
            out.nlos = w.nlos * cir_nlos(p, q, t, cfg, model, field);
            out.tau_nlos = nlos_delays(t, cfg, field);
        }
        return out;
    }

    transfer_components transfer_function_components(element p, int q, double t, double f,
                                                     const scenario_config &cfg, const wavefront_model &model,
                                                     const scatterer_field &field, band_check check)
    {
        if (check == band_check::enforce && std::abs(f - cfg.f_c) > half_bandwidth)
            throw std::invalid_argument("frequency outside the f_c +- 25 MHz band");

        // exp(-j 2 pi f xi / c) written as exp(-j k xi f / f_c) so f = f_c reproduces the CIR bit for bit.
        const double k = wavenumber(cfg) * (f / cfg.f_c);
        transfer_components out;
        const auto los = los_parts(p, q, t, cfg, model);
        out.los = std::polar(1.0, -k * los.xi + los.rest);
        if (!field.empty())
        {
            cplx sum = 0.0;
            for_each_nlos_ray(p, q, t, cfg, model, field,
                              [&](double length, double rest) { sum += std::polar(1.0, -k * length + rest); });
            out.nlos = sum * nlos_norm(field);
        }
        return out;
    }

    cplx transfer_function(element p, int q, double t, double f, const scenario_config &cfg,
                           const wavefront_model &model, const scatterer_field &field, band_check check)
    {
        const auto w = amplitude_weights(cfg.K);
        if (w.nlos > 0.0 && field.empty())
            throw std::invalid_argument("scatterer field is empty");
        const auto parts = transfer_function_components(p, q, t, f, cfg, model, field, check);
        cplx out = w.los * parts.los;
        if (w.nlos > 0.0)
            out += w.nlos * parts.nlos;
        return out;
    }

    channel_realization channel_matrix(double t, const scenario_config &cfg, const wavefront_model &model,
                                       const scatterer_field &field)
    {
        const auto part = make_partition(model, cfg);
        const auto w = amplitude_weights(cfg.K);
        const double k = wavenumber(cfg);
        const int Q = cfg.Q, P = cfg.n_tx();
        const auto S = part.centers.size();

        channel_realization ch;
        ch.t = t;
        ch.model = model;
        ch.P_h = cfg.P_h;
        ch.P_v = cfg.P_v;
        ch.H = Eigen::MatrixXcd::Zero(Q, P);
        ch.tau_los = los_delay(t, cfg);

        std::vector<vec3> d_q(static_cast<std::size_t>(Q));
        for (int q = 1; q <= Q; ++q)
            d_q[q - 1] = mr_element_position(q, t, cfg);

        // LoS: angles once per (subarray, MR element).
        {
            const double bulk = -k * los_path_length(t, cfg);
            std::vector<bs_steering> steer(S * Q);
            std::vector<double> mr(S * Q);
            for (std::size_t s = 0; s < S; ++s)
                for (int q = 0; q < Q; ++q)
                {
                    const ray_direction dep = ray_angles(part.centers[s], d_q[q], angle_convention::departure_los);
                    steer[s * Q + q] = bs_steering_terms(dep, cfg);
                    mr[s * Q + q] = mr_phase(centered_index(q + 1, Q), t, los_arrival(dep), cfg);
                }
            for (int col = 0; col < P; ++col)
            {
                const element p = element_at(col, cfg.P_h);
                const auto s = static_cast<std::size_t>(part.center_index_of(p.h, p.v));
                const double k_h = centered_index(p.h, cfg.P_h), k_v = centered_index(p.v, cfg.P_v);
                for (int q = 0; q < Q; ++q)
                    ch.H(q, col) = w.los * std::polar(1.0, bulk + (steer[s * Q + q].phase(k_h, k_v) + mr[s * Q + q]));
            }
        }

        if (w.nlos == 0.0)
            return ch;
        if (field.empty())
            throw std::invalid_argument("scatterer field is empty");

        std::vector<const ray *> rays;
        for (const auto &cluster : field.clusters)
            for (const auto &r : cluster)
                rays.push_back(&r);
        const auto R = static_cast<Eigen::Index>(rays.size());
        ch.tau_nlos = nlos_delays(t, cfg, field);

        // H_nlos = M * B^T with M(q, r) holding the ray phase, path length and MR terms and
        // B(col, r) the BS steering phasor of the subarray holding the column's element.
        Eigen::MatrixXcd M(Q, R);
        for (Eigen::Index r = 0; r < R; ++r)
        {
            const ray_path len = ray_path_length(rays[r]->position, t, cfg);
            for (int q = 0; q < Q; ++q)
            {
                const ray_direction arr = ray_angles(d_q[q], rays[r]->position, angle_convention::arrival_nlos);
                M(q, r) = std::polar(1.0, rays[r]->phase - k * (len.xi_T + len.xi_R) +
                                              mr_phase(centered_index(q + 1, Q), t, arr, cfg));
            }
        }

        Eigen::MatrixXcd B(P, R);
        std::vector<cplx> row_phasor, col_phasor;
        for (int sv = 1; sv <= part.counts_v; ++sv)
            for (int sh = 1; sh <= part.counts_h; ++sh)
            {
                const vec3 &center = part.center(sh, sv);
                const int h0 = (sh - 1) * part.p_max_h + 1, v0 = (sv - 1) * part.p_max_v + 1;
                const int nh = part.sizes_h[sh - 1], nv = part.sizes_v[sv - 1];
                const bool separable = nh * nv > nh + nv;
                for (Eigen::Index r = 0; r < R; ++r)
                {
                    const auto steer =
                        bs_steering_terms(ray_angles(center, rays[r]->position, angle_convention::departure_nlos), cfg);
                    if (separable)
                    {
                        row_phasor.resize(nh);
                        col_phasor.resize(nv);
                        for (int i = 0; i < nh; ++i)
                            row_phasor[i] = std::polar(1.0, centered_index(h0 + i, cfg.P_h) * steer.A);
                        for (int j = 0; j < nv; ++j)
                            col_phasor[j] = std::polar(1.0, centered_index(v0 + j, cfg.P_v) * steer.B);
                        for (int j = 0; j < nv; ++j)
                            for (int i = 0; i < nh; ++i)
                                B(column_index({h0 + i, v0 + j}, cfg.P_h), r) = row_phasor[i] * col_phasor[j];
                    }
                    else
                    {
                        for (int j = 0; j < nv; ++j)
                            for (int i = 0; i < nh; ++i)
                                B(column_index({h0 + i, v0 + j}, cfg.P_h), r) = std::polar(
                                    1.0, steer.phase(centered_index(h0 + i, cfg.P_h), centered_index(v0 + j, cfg.P_v)));
                    }
                }
            }

        ch.H.noalias() += (w.nlos * nlos_norm(field)) * (M * B.transpose());
        return ch;
    }

    void write_channel_csv(std::ostream &os, const channel_realization &ch)
    {
        os << "p,q,re,im\n";
        for (Eigen::Index q = 0; q < ch.H.rows(); ++q)
            for (Eigen::Index p = 0; p < ch.H.cols(); ++p)
                os << p + 1 << ',' << q + 1 << ',' << format_double(ch.H(q, p).real()) << ','
                   << format_double(ch.H(q, p).imag()) << '\n';
    }

    namespace
    {
        void put_le(std::ostream &os, double x)
        {
            auto bits = std::bit_cast<std::uint64_t>(x);
            char buf[8];
            for (int i = 0; i < 8; ++i)
                buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
            os.write(buf, 8);
        }

        double get_le(std::istream &is)
        {
            unsigned char buf[8];
            if (!is.read(reinterpret_cast<char *>(buf), 8))
                throw std::runtime_error("channel dump truncated");
            std::uint64_t bits = 0;
            for (int i = 0; i < 8; ++i)
                bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
            return std::bit_cast<double>(bits);
        }
    }

    void write_channel_binary(std::ostream &os, const channel_realization &ch)
    {
        for (Eigen::Index q = 0; q < ch.H.rows(); ++q)
            for (Eigen::Index p = 0; p < ch.H.cols(); ++p)
            {
                put_le(os, ch.H(q, p).real());
                put_le(os, ch.H(q, p).imag());
            }
    }

    Eigen::MatrixXcd read_channel_binary(std::istream &is, int Q, int P)
    {
        Eigen::MatrixXcd H(Q, P);
        for (int q = 0; q < Q; ++q)
            for (int p = 0; p < P; ++p)
            {
                const double re = get_le(is);
                H(q, p) = {re, get_le(is)};
            }
        return H;
    }
}
