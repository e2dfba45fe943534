#pragma once

#include "nfmimo/config.hpp"

#include <vector>

// Array geometry, near/far-field boundary and subarray decomposition.
// Element and subarray indices are 1-based throughout, matching the k-index convention
// k_i = (N - 2i + 1) / 2 used by the steering phases.

namespace nfmimo
{
    // Centered element offset k_i = (count - 2 i + 1) / 2.
    inline double centered_index(int i, int count) { return 0.5 * (count - 2 * i + 1); }

    // Midpoint of the BS array, [0, 0, H_0 + 0.5 P_v delta_T].
    vec3 bs_midpoint(const scenario_config &cfg);

    // Midpoint of the MR array at time t [s].
    vec3 mr_midpoint(double t, const scenario_config &cfg);

    // Position of MR element q (1..Q) at time t.
    vec3 mr_element_position(int q, double t, const scenario_config &cfg);

    // Near/far-field boundary 2 d^2 / lambda for an aperture diagonal d [m].
    double rayleigh_distance(double diagonal, double lambda);

    // Same for a rectangular aperture of width x height [m].
    double rayleigh_distance(double width, double height, double lambda);

    // Rayleigh distance of the configured BS UPA, 2 delta_T^2 ((P_h-1)^2 + (P_v-1)^2) / lambda.
    double rayleigh_distance(const scenario_config &cfg);

    // Number of subarrays along one axis of P elements when the largest subarray has p_max elements.
    int partition_counts(int P, int p_max);

    // Size of subarray `index` (1..partition_counts). All but the last have p_max elements.
    int subarray_size(int index, int P, int p_max);

    // Subarray (1-based) holding element p (1-based).
    int element_to_subarray(int p, int p_max);

    struct subarray_partition
    {
        int P_h = 0, P_v = 0;
        int p_max_h = 0, p_max_v = 0;
        int counts_h = 0, counts_v = 0;
        std::vector<int> sizes_h;  // counts_h entries
        std::vector<int> sizes_v;  // counts_v entries
        std::vector<vec3> centers; // counts_h * counts_v, index (sh-1) + (sv-1) * counts_h

        const vec3 &center(int sh, int sv) const { return centers[(sh - 1) + (sv - 1) * counts_h]; }

        // Flat center index of the subarray containing element (p_h, p_v).
        int center_index_of(int p_h, int p_v) const;
    };

    subarray_partition make_partition(int p_max_h, int p_max_v, const scenario_config &cfg);
    subarray_partition make_partition(const wavefront_model &model, const scenario_config &cfg);

    // Midpoint of subarray (sh, sv) within `partition`.
    vec3 subarray_center(int sh, int sv, const scenario_config &cfg, const subarray_partition &partition);

    // Midpoint of the subarray that holds element (p_h, p_v) when the largest subarray is p_max_h x p_max_v.
    vec3 subarray_center_of(int p_h, int p_v, int p_max_h, int p_max_v, const scenario_config &cfg);

    // Position of BS element (p_h, p_v): the center of its unit subarray.
    vec3 bs_element_position(int p_h, int p_v, const scenario_config &cfg);

    // Sign convention of the elevation angle.
    enum class angle_convention
    {
        departure_los,  // elevation = atan((z_from - z_to) / horizontal range)
        departure_nlos, // elevation = atan((z_to - z_from) / horizontal range)
        arrival_nlos    // as departure_nlos, with `from` being the MR element
    };

    struct ray_direction
    {
        double azimuth;   // (-pi, pi]
        double elevation; // [-pi/2, pi/2]
    };

    // Azimuth of `to` seen from `from` (two-argument arctangent) and elevation per `convention`.
    // Zero horizontal range gives elevation +-pi/2. Identical points throw geometry_error.
    ray_direction ray_angles(const vec3 &from, const vec3 &to, angle_convention convention);

    // LoS arrival angles at the MR from the departure angles: (pi - alpha_T, beta_T), azimuth wrapped.
    ray_direction los_arrival(const ray_direction &departure);

    // Wraps an angle into (-pi, pi].
    double wrap_angle(double a);

    // Largest square subarray size p whose own Rayleigh distance does not exceed the
    // BS-midpoint-to-MR-midpoint distance at time t. Clamped to [1, min(P_h, P_v)].
    int boundary_subarray_size(const scenario_config &cfg, double t = 0.0);
}
