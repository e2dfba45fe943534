#include "nfmimo/geometry.hpp"

#include <algorithm>
#include <string>

namespace nfmimo
{
    namespace
    {
        void check_index(int i, int count, const char *what)
        {
            if (i < 1 || i > count)
                throw std::out_of_range(std::string(what) + " index " + std::to_string(i) + " outside 1.." +
                                        std::to_string(count));
        }
    }

    vec3 bs_midpoint(const scenario_config &cfg)
    {
        return {0.0, 0.0, cfg.H_0 + 0.5 * cfg.P_v * cfg.delta_T};
    }

    vec3 mr_midpoint(double t, const scenario_config &cfg)
    {
        return {cfg.D_0 + cfg.v_R * t * std::cos(cfg.eta_R), cfg.v_R * t * std::sin(cfg.eta_R), 0.0};
    }

    vec3 mr_element_position(int q, double t, const scenario_config &cfg)
    {
        check_index(q, cfg.Q, "MR element");
        if (t < 0.0)
            throw std::invalid_argument("time must be non-negative");

        const double k_q = centered_index(q, cfg.Q);
        const double a = k_q * cfg.delta_R;
        return {cfg.D_0 + a * std::cos(cfg.psi_R) * std::cos(cfg.theta_R) + cfg.v_R * t * std::cos(cfg.eta_R),
                a * std::sin(cfg.psi_R) * std::cos(cfg.theta_R) + cfg.v_R * t * std::sin(cfg.eta_R),
                a * std::sin(cfg.theta_R)};
    }

    double rayleigh_distance(double diagonal, double lambda)
    {
        return 2.0 * diagonal * diagonal / lambda;
    }

    double rayleigh_distance(double width, double height, double lambda)
    {
        return 2.0 * (width * width + height * height) / lambda;
    }

    double rayleigh_distance(const scenario_config &cfg)
    {
        const double h = cfg.P_h - 1.0, v = cfg.P_v - 1.0;
        return 2.0 * cfg.delta_T * cfg.delta_T * (h * h + v * v) / cfg.lambda();
    }

    int partition_counts(int P, int p_max)
    {
        if (P < 1)
            throw std::invalid_argument("element count must be at least 1");
        if (p_max < 1 || p_max > P)
            throw std::invalid_argument("largest subarray size " + std::to_string(p_max) + " outside 1.." +
                                        std::to_string(P));
        const int rem = P % p_max;
        return rem != 0 ? (P - rem) / p_max + 1 : P / p_max;
    }

    int subarray_size(int index, int P, int p_max)
    {
        const int counts = partition_counts(P, p_max);
        check_index(index, counts, "subarray");
        return index < counts ? p_max : P - (counts - 1) * p_max;
    }

    int element_to_subarray(int p, int p_max)
    {
        if (p < 1)
            throw std::out_of_range("element index must be at least 1");
        if (p_max < 1)
            throw std::invalid_argument("largest subarray size must be at least 1");
        const int rem = p % p_max;
        return rem != 0 ? (p - rem) / p_max + 1 : p / p_max;
    }

    int subarray_partition::center_index_of(int p_h, int p_v) const
    {
        check_index(p_h, P_h, "BS row");
        check_index(p_v, P_v, "BS column");
        return (element_to_subarray(p_h, p_max_h) - 1) + (element_to_subarray(p_v, p_max_v) - 1) * counts_h;
    }

    subarray_partition make_partition(int p_max_h, int p_max_v, const scenario_config &cfg)
    {
        subarray_partition part;
        part.P_h = cfg.P_h;
        part.P_v = cfg.P_v;
        part.p_max_h = p_max_h;
        part.p_max_v = p_max_v;
        part.counts_h = partition_counts(cfg.P_h, p_max_h);
        part.counts_v = partition_counts(cfg.P_v, p_max_v);

        for (int i = 1; i <= part.counts_h; ++i)
            part.sizes_h.push_back(subarray_size(i, cfg.P_h, p_max_h));
        for (int i = 1; i <= part.counts_v; ++i)
            part.sizes_v.push_back(subarray_size(i, cfg.P_v, p_max_v));

        part.centers.reserve(static_cast<std::size_t>(part.counts_h) * part.counts_v);
        for (int sv = 1; sv <= part.counts_v; ++sv)
            for (int sh = 1; sh <= part.counts_h; ++sh)
                part.centers.push_back(subarray_center(sh, sv, cfg, part));
        return part;
    }

    subarray_partition make_partition(const wavefront_model &model, const scenario_config &cfg)
    {
        model.validate_for(cfg);
        return make_partition(model.p_max_h(cfg), model.p_max_v(cfg), cfg);
    }

    namespace
    {
        vec3 center_formula(int sh, int sv, int p_max_h, int p_max_v, int size_h, int size_v,
                            const scenario_config &cfg)
        {
            const double offset = ((sh - 1) * p_max_h + 0.5 * size_h - 0.5 * cfg.P_h) * cfg.delta_T;
            return {offset * std::cos(cfg.psi_T), offset * std::sin(cfg.psi_T),
                    cfg.H_0 + ((sv - 1) * p_max_v + 0.5 * size_v) * cfg.delta_T};
        }
    }

    vec3 subarray_center(int sh, int sv, const scenario_config &cfg, const subarray_partition &partition)
    {
        check_index(sh, partition.counts_h, "subarray row");
        check_index(sv, partition.counts_v, "subarray column");
        return center_formula(sh, sv, partition.p_max_h, partition.p_max_v, partition.sizes_h[sh - 1],
                              partition.sizes_v[sv - 1], cfg);
    }

    vec3 subarray_center_of(int p_h, int p_v, int p_max_h, int p_max_v, const scenario_config &cfg)
    {
        check_index(p_h, cfg.P_h, "BS row");
        check_index(p_v, cfg.P_v, "BS column");
        const int sh = element_to_subarray(p_h, p_max_h), sv = element_to_subarray(p_v, p_max_v);
        return center_formula(sh, sv, p_max_h, p_max_v, subarray_size(sh, cfg.P_h, p_max_h),
                              subarray_size(sv, cfg.P_v, p_max_v), cfg);
    }

    vec3 bs_element_position(int p_h, int p_v, const scenario_config &cfg)
    {
        check_index(p_h, cfg.P_h, "BS row");
        check_index(p_v, cfg.P_v, "BS column");
        // Unit subarrays: size 1 everywhere, so the center formula needs no partition table.
        const double offset = ((p_h - 1) + 0.5 - 0.5 * cfg.P_h) * cfg.delta_T;
        return {offset * std::cos(cfg.psi_T), offset * std::sin(cfg.psi_T),
                cfg.H_0 + ((p_v - 1) + 0.5) * cfg.delta_T};
    }

    double wrap_angle(double a)
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        a = std::remainder(a, two_pi);
        if (a <= -std::numbers::pi)
            a += two_pi;
        return a;
    }

    ray_direction ray_angles(const vec3 &from, const vec3 &to, angle_convention convention)
    {
        const vec3 d = to - from;
        const double range = d.horizontal_norm();
        if (range == 0.0 && d.z == 0.0)
            throw geometry_error("ray endpoints coincide");

        const double rise = convention == angle_convention::departure_los ? -d.z : d.z;
        return {wrap_angle(std::atan2(d.y, d.x)), std::atan2(rise, range)};
    }

    ray_direction los_arrival(const ray_direction &departure)
    {
        return {wrap_angle(std::numbers::pi - departure.azimuth), departure.elevation};
    }

    int boundary_subarray_size(const scenario_config &cfg, double t)
    {
        const double distance = (mr_midpoint(t, cfg) - bs_midpoint(cfg)).norm();
        const int limit = std::min(cfg.P_h, cfg.P_v);
        int best = 1;
        for (int p = 2; p <= limit; ++p)
        {
            const double side = (p - 1) * cfg.delta_T;
            if (rayleigh_distance(side, side, cfg.lambda()) > distance)
                break;
            best = p;
        }
        return best;
    }
}
