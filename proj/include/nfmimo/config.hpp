#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nfmimo
{
    // Raised when a scenario parameter violates its invariant. field() names the offending key.
    class config_error : public std::invalid_argument
    {
    public:
        config_error(std::string field, const std::string &what)
            : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

        const std::string &field() const noexcept { return field_; }

    private:
        std::string field_;
    };

    // Two geometric points coincide where a direction is required.
    class geometry_error : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Point or displacement in the global frame [m]. Origin is the ground projection of the BS array
    // midpoint, x points towards the MR array midpoint, z points up.
    struct vec3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        friend vec3 operator+(vec3 a, vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
        friend vec3 operator-(vec3 a, vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
        friend vec3 operator*(double s, vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
        friend bool operator==(const vec3 &, const vec3 &) = default;

        double norm() const { return std::sqrt(x * x + y * y + z * z); }
        double horizontal_norm() const { return std::hypot(x, y); }
    };

    // All physical scalars of the BS-to-MR scenario. Distances in [m], angles in [rad].
    // Defaults reproduce the reference simulation profile (5 GHz, 64x64 UPA, 4-element ULA).
    struct scenario_config
    {
        double c = 299792458.0;          // Speed of light [m/s]
        double f_c = 5.0e9;              // Carrier frequency [Hz]
        double H_0 = 20.0;               // BS mast height [m]
        double D_0 = 50.0;               // Initial ground distance BS to MR [m]
        int P_h = 64;                    // BS UPA elements along the horizontal axis
        int P_v = 64;                    // BS UPA elements along the vertical axis
        int Q = 4;                       // MR ULA elements
        double delta_T = 0.0299792458;   // BS element spacing [m], lambda/2 at 5 GHz
        double delta_R = 0.0299792458;   // MR element spacing [m]
        double psi_T = std::numbers::pi / 2;   // BS array azimuth orientation
        double psi_R = std::numbers::pi / 2;   // MR array azimuth orientation
        double theta_R = std::numbers::pi / 3; // MR array elevation tilt
        double v_R = 5.0;                      // MR speed [m/s]
        double eta_R = std::numbers::pi / 2;   // MR motion azimuth
        double K = 1.0;                  // Rician factor (>= 1e12 is treated as LoS only)
        double kappa = 3.0;              // von Mises concentration of the cluster angles
        double kappa_ray = 3.0;          // von Mises concentration of rays around their cluster mean
        double mu_alpha = 0.0;           // Mean azimuth of departure for scatterers
        double mu_beta = 0.0;            // Mean elevation of departure for scatterers
        bool cluster_means = true;       // false: every ray is drawn directly around (mu_alpha, mu_beta)
        int L_clusters = 5;              // Number of clusters
        int N_rays = 20;                 // Rays per cluster
        double r_min = 5.0;              // Scatterer radial distance range from the BS midpoint [m]
        double r_max = 50.0;
        double rho_snr = 10.0;           // Linear SNR used by capacity evaluations

        double lambda() const { return c / f_c; }
        int n_tx() const { return P_h * P_v; }

        // Throws config_error naming the first violated field.
        void validate() const;
    };

    // Rician weights sqrt(K/(K+1)) and sqrt(1/(K+1)) with the K >= 1e12 LoS-only limit applied.
    struct rician_weights
    {
        double los;
        double nlos;
    };
    inline constexpr double rician_los_only_threshold = 1e12;
    rician_weights amplitude_weights(double K);
    rician_weights power_weights(double K); // K/(K+1) and 1/(K+1)

    // Wavefront approximation applied at the BS array.
    class wavefront_model
    {
    public:
        enum class kind
        {
            spherical,
            planar,
            subarray
        };

        static wavefront_model spherical() { return wavefront_model(kind::spherical, 1, 1); }
        static wavefront_model planar() { return wavefront_model(kind::planar, 0, 0); }
        static wavefront_model subarray(int p_max_h, int p_max_v);

        // "spherical", "planar" or "subarray:HxV"
        static wavefront_model parse(const std::string &text);
        std::string to_string() const;

        kind type() const { return kind_; }

        // Largest-subarray dimensions this model uses for the given array.
        // Spherical maps to 1x1, planar to the full array.
        int p_max_h(const scenario_config &cfg) const;
        int p_max_v(const scenario_config &cfg) const;

        // Throws config_error when a subarray size falls outside [1, P_h] x [1, P_v].
        void validate_for(const scenario_config &cfg) const;

        friend bool operator==(const wavefront_model &, const wavefront_model &) = default;

    private:
        wavefront_model(kind k, int h, int v) : kind_(k), h_(h), v_(v) {}
        kind kind_;
        int h_;
        int v_;
    };
}
