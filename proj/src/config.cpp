#include "nfmimo/config.hpp"

#include <charconv>
#include <string>

namespace nfmimo
{
    namespace
    {
        void require(bool ok, const char *field, const char *what)
        {
            if (!ok)
                throw config_error(field, what);
        }

        bool finite(double x) { return std::isfinite(x); }
    }

    void scenario_config::validate() const
    {
        require(finite(c) && c > 0.0, "c", "speed of light must be positive");
        require(finite(f_c) && f_c > 0.0, "f_c", "carrier frequency must be positive");
        require(finite(H_0), "H_0", "must be finite");
        require(finite(D_0), "D_0", "must be finite");
        require(P_h >= 1, "P_h", "must be at least 1");
        require(P_v >= 1, "P_v", "must be at least 1");
        require(Q >= 1, "Q", "must be at least 1");
        require(finite(delta_T) && delta_T > 0.0, "delta_T", "element spacing must be positive");
        require(finite(delta_R) && delta_R > 0.0, "delta_R", "element spacing must be positive");
        require(finite(psi_T), "psi_T", "must be finite");
        require(finite(psi_R), "psi_R", "must be finite");
        require(finite(theta_R), "theta_R", "must be finite");
        require(finite(v_R) && v_R >= 0.0, "v_R", "speed must be non-negative");
        require(finite(eta_R), "eta_R", "must be finite");
        require(!std::isnan(K) && K >= 0.0, "K", "Rician factor must be non-negative");
        require(finite(kappa) && kappa >= 0.0, "kappa", "concentration must be non-negative");
        require(finite(kappa_ray) && kappa_ray >= 0.0, "kappa_ray", "concentration must be non-negative");
        require(finite(mu_alpha), "mu_alpha", "must be finite");
        require(finite(mu_beta), "mu_beta", "must be finite");
        require(L_clusters >= 1, "L_clusters", "must be at least 1");
        require(N_rays >= 1, "N_rays", "must be at least 1");
        require(finite(r_min) && r_min > 0.0, "r_min", "must be positive");
        require(finite(r_max) && r_max >= r_min, "r_max", "must be at least r_min");
        require(finite(rho_snr) && rho_snr >= 0.0, "rho_snr", "SNR must be non-negative");
    }

    rician_weights power_weights(double K)
    {
        if (K >= rician_los_only_threshold)
            return {1.0, 0.0};
        return {K / (K + 1.0), 1.0 / (K + 1.0)};
    }

    rician_weights amplitude_weights(double K)
    {
        auto w = power_weights(K);
        return {std::sqrt(w.los), std::sqrt(w.nlos)};
    }

    wavefront_model wavefront_model::subarray(int p_max_h, int p_max_v)
    {
        if (p_max_h < 1)
            throw config_error("p_max_h", "largest subarray must be at least 1");
        if (p_max_v < 1)
            throw config_error("p_max_v", "largest subarray must be at least 1");
        return wavefront_model(kind::subarray, p_max_h, p_max_v);
    }

    wavefront_model wavefront_model::parse(const std::string &text)
    {
        if (text == "spherical")
            return spherical();
        if (text == "planar")
            return planar();

        const std::string prefix = "subarray:";
        if (text.rfind(prefix, 0) == 0)
        {
            auto body = std::string_view(text).substr(prefix.size());
            auto x = body.find('x');
            if (x != std::string_view::npos)
            {
                int h = 0, v = 0;
                auto hs = body.substr(0, x), vs = body.substr(x + 1);
                auto rh = std::from_chars(hs.data(), hs.data() + hs.size(), h);
                auto rv = std::from_chars(vs.data(), vs.data() + vs.size(), v);
                if (rh.ec == std::errc() && rh.ptr == hs.data() + hs.size() && rv.ec == std::errc() &&
                    rv.ptr == vs.data() + vs.size() && h >= 1 && v >= 1)
                    return subarray(h, v);
            }
        }
        throw config_error("model", "invalid wavefront model '" + text + "', expected spherical, planar or subarray:HxV");
    }

    std::string wavefront_model::to_string() const
    {
        switch (kind_)
        {
        case kind::spherical:
            return "spherical";
        case kind::planar:
            return "planar";
        default:
            return "subarray:" + std::to_string(h_) + "x" + std::to_string(v_);
        }
    }

    int wavefront_model::p_max_h(const scenario_config &cfg) const
    {
        return kind_ == kind::planar ? cfg.P_h : h_;
    }

    int wavefront_model::p_max_v(const scenario_config &cfg) const
    {
        return kind_ == kind::planar ? cfg.P_v : v_;
    }

    void wavefront_model::validate_for(const scenario_config &cfg) const
    {
        if (kind_ != kind::subarray)
            return;
        if (h_ > cfg.P_h)
            throw config_error("p_max_h", "largest subarray (" + std::to_string(h_) +
                                              ") must satisfy 1 <= p_max_h <= P_h = " + std::to_string(cfg.P_h));
        if (v_ > cfg.P_v)
            throw config_error("p_max_v", "largest subarray (" + std::to_string(v_) +
                                              ") must satisfy 1 <= p_max_v <= P_v = " + std::to_string(cfg.P_v));
    }
}
