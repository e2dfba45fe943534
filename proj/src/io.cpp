#include "nfmimo/io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>

namespace nfmimo
{
    using json = nlohmann::json;

    namespace
    {
        double get_number(const json &j, const char *key, double fallback)
        {
            if (!j.contains(key))
                return fallback;
            const auto &v = j.at(key);
            if (!v.is_number())
                throw config_error(key, "expected a number, got " + std::string(v.type_name()));
            return v.get<double>();
        }

        int get_int(const json &j, const char *key, int fallback)
        {
            if (!j.contains(key))
                return fallback;
            const auto &v = j.at(key);
            if (v.is_number_integer())
                return v.get<int>();
            if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()))
                return static_cast<int>(v.get<double>());
            throw config_error(key, "expected an integer");
        }

        bool get_bool(const json &j, const char *key, bool fallback)
        {
            if (!j.contains(key))
                return fallback;
            if (!j.at(key).is_boolean())
                throw config_error(key, "expected true or false");
            return j.at(key).get<bool>();
        }

        const char *const known_keys[] = {"c",       "f_c",      "H_0",       "D_0",        "P_h",      "P_v",
                                          "Q",       "delta_T",  "delta_R",   "psi_T",      "psi_R",    "theta_R",
                                          "v_R",     "eta_R",    "K",         "kappa",      "kappa_ray", "mu_alpha",
                                          "mu_beta", "cluster_means", "L_clusters", "N_rays", "r_min",  "r_max",
                                          "rho_snr"};

        void apply_override(json &j, const std::string &item)
        {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw config_error(item, "override must have the form key=value");
            const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            j[key] = json::parse(value, nullptr, false);
            if (j[key].is_discarded())
                j[key] = value;
        }
    }

    scenario_config validate_config(std::string_view json_text, const std::vector<std::string> &overrides)
    {
        json j = json::object();
        const bool blank = json_text.find_first_not_of(" \t\r\n") == std::string_view::npos;
        if (!blank)
        {
            try
            {
                j = json::parse(json_text);
            }
            catch (const json::parse_error &e)
            {
                throw config_error("config", std::string("malformed JSON: ") + e.what());
            }
            if (!j.is_object())
                throw config_error("config", "top level must be a JSON object");
        }
        for (const auto &o : overrides)
            apply_override(j, o);

        for (const auto &[key, value] : j.items())
        {
            bool known = false;
            for (const char *k : known_keys)
                known = known || key == k;
            if (!known)
                throw config_error(key, "unknown configuration key");
        }

        scenario_config cfg;
        cfg.c = get_number(j, "c", cfg.c);
        cfg.f_c = get_number(j, "f_c", cfg.f_c);
        if (!(cfg.c > 0.0) || !(cfg.f_c > 0.0))
            cfg.validate();
        const double half_wavelength = 0.5 * cfg.lambda();

        cfg.H_0 = get_number(j, "H_0", cfg.H_0);
        cfg.D_0 = get_number(j, "D_0", cfg.D_0);
        cfg.P_h = get_int(j, "P_h", cfg.P_h);
        cfg.P_v = get_int(j, "P_v", cfg.P_v);
        cfg.Q = get_int(j, "Q", cfg.Q);
        cfg.delta_T = get_number(j, "delta_T", half_wavelength);
        cfg.delta_R = get_number(j, "delta_R", half_wavelength);
        cfg.psi_T = get_number(j, "psi_T", cfg.psi_T);
        cfg.psi_R = get_number(j, "psi_R", cfg.psi_R);
        cfg.theta_R = get_number(j, "theta_R", cfg.theta_R);
        cfg.v_R = get_number(j, "v_R", cfg.v_R);
        cfg.eta_R = get_number(j, "eta_R", cfg.eta_R);
        cfg.K = get_number(j, "K", cfg.K);
        cfg.kappa = get_number(j, "kappa", cfg.kappa);
        cfg.kappa_ray = get_number(j, "kappa_ray", cfg.kappa);
        cfg.mu_alpha = get_number(j, "mu_alpha", cfg.mu_alpha);
        cfg.mu_beta = get_number(j, "mu_beta", cfg.mu_beta);
        cfg.cluster_means = get_bool(j, "cluster_means", cfg.cluster_means);
        cfg.L_clusters = get_int(j, "L_clusters", cfg.L_clusters);
        cfg.N_rays = get_int(j, "N_rays", cfg.N_rays);
        cfg.r_min = get_number(j, "r_min", cfg.r_min);
        cfg.r_max = get_number(j, "r_max", cfg.D_0);
        cfg.rho_snr = get_number(j, "rho_snr", cfg.rho_snr);

        cfg.validate();
        return cfg;
    }

    scenario_config load_config(const std::filesystem::path &path, const std::vector<std::string> &overrides)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw config_error("config", "cannot open " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        return validate_config(text.str(), overrides);
    }

    std::string config_to_json(const scenario_config &cfg)
    {
        json j;
        j["c"] = cfg.c;
        j["f_c"] = cfg.f_c;
        j["H_0"] = cfg.H_0;
        j["D_0"] = cfg.D_0;
        j["P_h"] = cfg.P_h;
        j["P_v"] = cfg.P_v;
        j["Q"] = cfg.Q;
        j["delta_T"] = cfg.delta_T;
        j["delta_R"] = cfg.delta_R;
        j["psi_T"] = cfg.psi_T;
        j["psi_R"] = cfg.psi_R;
        j["theta_R"] = cfg.theta_R;
        j["v_R"] = cfg.v_R;
        j["eta_R"] = cfg.eta_R;
        j["K"] = cfg.K;
        j["kappa"] = cfg.kappa;
        j["kappa_ray"] = cfg.kappa_ray;
        j["mu_alpha"] = cfg.mu_alpha;
        j["mu_beta"] = cfg.mu_beta;
        j["cluster_means"] = cfg.cluster_means;
        j["L_clusters"] = cfg.L_clusters;
        j["N_rays"] = cfg.N_rays;
        j["r_min"] = cfg.r_min;
        j["r_max"] = cfg.r_max;
        j["rho_snr"] = cfg.rho_snr;
        return j.dump(2);
    }

    std::string format_double(double x)
    {
        return fmt::format("{}", x);
    }

    std::string sha256_hex(std::string_view data)
    {
        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
            EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
            EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
            throw std::runtime_error("SHA-256 computation failed");

        std::string hex;
        hex.reserve(2 * len);
        for (unsigned int i = 0; i < len; ++i)
            hex += fmt::format("{:02x}", digest[i]);
        return hex;
    }

    std::string sha256_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read " + path.string());
        std::ostringstream data;
        data << in.rdbuf();
        return sha256_hex(data.str());
    }
}
