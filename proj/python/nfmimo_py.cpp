#include "nfmimo/channel.hpp"
#include "nfmimo/geometry.hpp"
#include "nfmimo/harness.hpp"
#include "nfmimo/io.hpp"
#include "nfmimo/statistics.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace nfmimo;

namespace
{
    py::dict estimate_dict(const correlation_estimate &e)
    {
        py::dict d;
        d["value"] = e.value;
        d["los"] = e.los;
        d["nlos"] = e.nlos;
        d["w_los"] = e.w_los;
        d["w_nlos"] = e.w_nlos;
        d["used"] = e.used;
        d["excluded"] = e.excluded;
        return d;
    }

    wavefront_model model_of(const std::string &text, const scenario_config &cfg)
    {
        auto m = wavefront_model::parse(text);
        m.validate_for(cfg);
        return m;
    }
}

PYBIND11_MODULE(_nfmimo, m)
{
    m.doc() = "Near-field massive MIMO channel simulator";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<geometry_error>(m, "GeometryError", PyExc_ValueError);

    py::class_<scenario_config>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("c", &scenario_config::c)
        .def_readwrite("f_c", &scenario_config::f_c)
        .def_readwrite("H_0", &scenario_config::H_0)
        .def_readwrite("D_0", &scenario_config::D_0)
        .def_readwrite("P_h", &scenario_config::P_h)
        .def_readwrite("P_v", &scenario_config::P_v)
        .def_readwrite("Q", &scenario_config::Q)
        .def_readwrite("delta_T", &scenario_config::delta_T)
        .def_readwrite("delta_R", &scenario_config::delta_R)
        .def_readwrite("psi_T", &scenario_config::psi_T)
        .def_readwrite("psi_R", &scenario_config::psi_R)
        .def_readwrite("theta_R", &scenario_config::theta_R)
        .def_readwrite("v_R", &scenario_config::v_R)
        .def_readwrite("eta_R", &scenario_config::eta_R)
        .def_readwrite("K", &scenario_config::K)
        .def_readwrite("kappa", &scenario_config::kappa)
        .def_readwrite("kappa_ray", &scenario_config::kappa_ray)
        .def_readwrite("mu_alpha", &scenario_config::mu_alpha)
        .def_readwrite("mu_beta", &scenario_config::mu_beta)
        .def_readwrite("cluster_means", &scenario_config::cluster_means)
        .def_readwrite("L_clusters", &scenario_config::L_clusters)
        .def_readwrite("N_rays", &scenario_config::N_rays)
        .def_readwrite("r_min", &scenario_config::r_min)
        .def_readwrite("r_max", &scenario_config::r_max)
        .def_readwrite("rho_snr", &scenario_config::rho_snr)
        .def_property_readonly("wavelength", &scenario_config::lambda)
        .def("validate", &scenario_config::validate)
        .def("to_json", [](const scenario_config &c) { return config_to_json(c); });

    m.def("load_config", [](const std::string &json_text, const std::vector<std::string> &overrides) {
        return validate_config(json_text, overrides);
    }, py::arg("json_text") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def("rayleigh_distance", py::overload_cast<double, double, double>(&rayleigh_distance),
          py::arg("width"), py::arg("height"), py::arg("wavelength"));
    m.def("array_rayleigh_distance", py::overload_cast<const scenario_config &>(&rayleigh_distance));
    m.def("boundary_subarray_size", &boundary_subarray_size, py::arg("cfg"), py::arg("t") = 0.0);

    m.def("scatterers", [](const scenario_config &cfg, std::uint64_t seed) {
        const auto field = generate_scatterers(cfg, seed);
        std::vector<std::tuple<int, int, double, double, double, double>> rows;
        for (std::size_t l = 0; l < field.clusters.size(); ++l)
            for (std::size_t n = 0; n < field.clusters[l].size(); ++n)
            {
                const auto &r = field.clusters[l][n];
                rows.emplace_back(l + 1, n + 1, r.position.x, r.position.y, r.position.z, r.phase);
            }
        return rows;
    }, py::arg("cfg"), py::arg("seed") = 1, "Rows (cluster, ray, x, y, z, phase) of one scatterer field.");

    m.def("channel_matrix", [](const scenario_config &cfg, const std::string &model, double t, std::uint64_t seed) {
        const auto mdl = model_of(model, cfg);
        const auto field = power_weights(cfg.K).nlos > 0.0 ? generate_scatterers(cfg, seed) : scatterer_field{};
        py::gil_scoped_release release;
        return channel_matrix(t, cfg, mdl, field).H;
    }, py::arg("cfg"), py::arg("model") = "spherical", py::arg("t") = 0.0, py::arg("seed") = 1,
          "Q x P complex channel matrix; column (v-1)*P_h + (h-1) holds BS element (h, v).");

    m.def("capacity", py::overload_cast<const Eigen::MatrixXcd &, double>(&capacity), py::arg("H"), py::arg("snr"));
    m.def("model_error_delta", [](const scenario_config &cfg, const std::string &model, double t, std::uint64_t seed) {
        const auto mdl = model_of(model, cfg);
        const auto field = power_weights(cfg.K).nlos > 0.0 ? generate_scatterers(cfg, seed) : scatterer_field{};
        py::gil_scoped_release release;
        return model_error_delta(mdl, t, cfg, field);
    }, py::arg("cfg"), py::arg("model"), py::arg("t") = 0.0, py::arg("seed") = 1);

    m.def("ro_complexity", [](const scenario_config &cfg, const std::string &model) {
        const auto r = ro_complexity(model_of(model, cfg), cfg);
        py::dict d;
        d["ro_total"] = r.ro_total;
        d["ro_los_per_pair"] = r.ro_los_per_pair;
        d["ro_nlos_per_pair"] = r.ro_nlos_per_pair;
        d["counts_h"] = r.counts_h;
        d["counts_v"] = r.counts_v;
        return d;
    }, py::arg("cfg"), py::arg("model"));

    m.def("spatial_ccf", [](const scenario_config &cfg, const std::string &model, int dp_h, int dp_v, int dq,
                            double t, std::size_t n, std::uint64_t seed) {
        const auto mdl = model_of(model, cfg);
        py::gil_scoped_release release;
        const auto e = st_ccf(spatial_lag{dp_h, dp_v, dq}, 0.0, t, cfg, mdl, mc_options{n, seed});
        py::gil_scoped_acquire acquire;
        return estimate_dict(e);
    }, py::arg("cfg"), py::arg("model") = "spherical", py::arg("dp_h") = 0, py::arg("dp_v") = 0,
          py::arg("dq") = 0, py::arg("t") = 0.0, py::arg("n_realizations") = 500, py::arg("seed") = 1);

    m.def("temporal_acf", [](const scenario_config &cfg, const std::string &model, double dt, double t,
                             std::size_t n, std::uint64_t seed) {
        const auto mdl = model_of(model, cfg);
        py::gil_scoped_release release;
        const auto e = temporal_acf(dt, t, cfg, mdl, mc_options{n, seed});
        py::gil_scoped_acquire acquire;
        return estimate_dict(e);
    }, py::arg("cfg"), py::arg("model") = "spherical", py::arg("dt") = 0.0, py::arg("t") = 0.0,
          py::arg("n_realizations") = 500, py::arg("seed") = 1);

    m.def("frequency_cf", [](const scenario_config &cfg, const std::string &model, double df, double t,
                             std::size_t n, std::uint64_t seed) {
        const auto mdl = model_of(model, cfg);
        py::gil_scoped_release release;
        const auto e = frequency_cf(df, t, cfg, mdl, mc_options{n, seed});
        py::gil_scoped_acquire acquire;
        return estimate_dict(e);
    }, py::arg("cfg"), py::arg("model") = "spherical", py::arg("df") = 0.0, py::arg("t") = 0.0,
          py::arg("n_realizations") = 500, py::arg("seed") = 1);

    m.def("run_experiment", [](const std::string &kind, const scenario_config &cfg, const std::filesystem::path &out,
                               std::uint64_t seed, std::size_t n, std::optional<std::string> model,
                               std::optional<std::string> sweep) {
        experiment exp;
        exp.kind = parse_experiment_kind(kind);
        exp.output = out;
        exp.seed = seed;
        exp.n_realizations = n;
        exp.model = model;
        if (sweep)
            exp.sweep = sweep_axis::parse(*sweep);
        run_manifest man;
        {
            py::gil_scoped_release release;
            man = run_experiment(exp, cfg);
        }
        return manifest_to_json(man);
    }, py::arg("kind"), py::arg("cfg"), py::arg("out"), py::arg("seed") = 1, py::arg("n_realizations") = 500,
          py::arg("model") = py::none(), py::arg("sweep") = py::none(), "Runs one experiment; returns the manifest JSON.");

    std::vector<std::string> kinds;
    for (auto k : all_experiment_kinds())
        kinds.push_back(to_string(k));
    m.attr("EXPERIMENTS") = kinds;
    m.attr("__version__") = NFMIMO_VERSION_STRING;
}
