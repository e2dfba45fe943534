#include "nfmimo/harness.hpp"

#include "nfmimo/geometry.hpp"
#include "nfmimo/io.hpp"
#include "nfmimo/parallel.hpp"
#include "nfmimo/statistics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#ifndef NFMIMO_VERSION
#define NFMIMO_VERSION "unknown"
#endif

namespace nfmimo
{
    namespace
    {
        constexpr double pi = std::numbers::pi;

        const std::map<experiment_kind, std::string> &kind_names()
        {
            static const std::map<experiment_kind, std::string> names = {
                {experiment_kind::rayleigh_table, "rayleigh_table"},
                {experiment_kind::error_vs_array, "error_vs_array"},
                {experiment_kind::error_vs_subarray, "error_vs_subarray"},
                {experiment_kind::complexity_sweep, "complexity_sweep"},
                {experiment_kind::spatial_ccf, "spatial_ccf"},
                {experiment_kind::temporal_acf, "temporal_acf"},
                {experiment_kind::frequency_cf, "frequency_cf"},
                {experiment_kind::capacity_sweep, "capacity_sweep"}};
            return names;
        }

        using row = std::vector<std::string>;

        // Collects CSV files written by one experiment run.
        class output_set
        {
        public:
            explicit output_set(std::filesystem::path dir) : dir_(std::move(dir)) {}

            void write(const std::string &name, const row &header, const std::vector<row> &rows)
            {
                std::ostringstream text;
                auto put = [&](const row &r) {
                    for (std::size_t i = 0; i < r.size(); ++i)
                        text << (i ? "," : "") << r[i];
                    text << '\n';
                };
                put(header);
                for (const auto &r : rows)
                    put(r);
                write_text(name, text.str());
            }

            void write_text(const std::string &name, const std::string &content)
            {
                const auto path = dir_ / name;
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                if (!out || !(out << content) || !out.flush())
                    throw std::runtime_error("cannot write " + path.string());
                files.push_back({path, sha256_hex(content)});
            }

            std::vector<output_file> files;

        private:
            std::filesystem::path dir_;
        };

        std::string num(double x) { return format_double(x); }
        std::string num(long long x) { return std::to_string(x); }

        // Label fragment for file names, e.g. "H0_20" or "t_0.5".
        std::string label(const std::string &key, double value) { return key + "_" + format_double(value); }

        std::string model_label(const wavefront_model &m)
        {
            auto s = m.to_string();
            std::replace(s.begin(), s.end(), ':', '_');
            return s;
        }

        int as_count(double v, const char *what)
        {
            if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
                throw std::invalid_argument(std::string(what) + " values must be positive integers");
            return static_cast<int>(v);
        }

        // Caps a subarray model to the array; planar and spherical pass through.
        wavefront_model capped(const wavefront_model &m, const scenario_config &cfg)
        {
            if (m.type() != wavefront_model::kind::subarray)
                return m;
            return wavefront_model::subarray(std::min(m.p_max_h(cfg), cfg.P_h), std::min(m.p_max_v(cfg), cfg.P_v));
        }

        row correlation_row(const std::vector<std::string> &axis, const correlation_estimate &e, std::size_t n,
                            std::uint64_t seed)
        {
            row r = axis;
            r.push_back(num(e.value.real()));
            r.push_back(num(e.value.imag()));
            r.push_back(num(std::abs(e.value)));
            r.push_back(std::to_string(n));
            r.push_back(std::to_string(seed));
            return r;
        }

        struct curve
        {
            std::string name;
            scenario_config cfg;
            wavefront_model model;
            double t = 0.0;
        };

        // Scatterer fields cached per distinct configuration so that curves differing only in
        // model or time share the same realizations.
        class field_cache
        {
        public:
            explicit field_cache(mc_options opts) : opts_(opts) {}

            const std::vector<scatterer_field> &get(const scenario_config &cfg)
            {
                const auto key = config_to_json(cfg);
                auto it = cache_.find(key);
                if (it == cache_.end())
                {
                    if (power_weights(cfg.K).nlos == 0.0)
                        it = cache_.emplace(key, std::vector<scatterer_field>{}).first;
                    else
                        it = cache_.emplace(key, realization_fields(cfg, opts_)).first;
                }
                return it->second;
            }

        private:
            mc_options opts_;
            std::map<std::string, std::vector<scatterer_field>> cache_;
        };

        void run_rayleigh(const experiment &exp, const scenario_config &cfg, output_set &out)
        {
            const auto freqs = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            const std::pair<double, double> apertures[] = {{1.0, 0.1}, {1.0, 2.0}, {2.0, 2.0}};
            std::vector<row> rows;
            for (double f : freqs)
            {
                if (!(f > 0.0))
                    throw std::invalid_argument("frequencies must be positive");
                for (auto [w, h] : apertures)
                    rows.push_back({num(f), num(w), num(h), num(std::hypot(w, h)),
                                    num(rayleigh_distance(w, h, cfg.c / f))});
            }
            out.write("rayleigh_table.csv",
                      {"frequency_hz", "aperture_h_m", "aperture_v_m", "diagonal_m", "rayleigh_distance_m"}, rows);

            const double separation = (mr_midpoint(0.0, cfg) - bs_midpoint(cfg)).norm();
            out.write("rayleigh_config.csv",
                      {"P_h", "P_v", "delta_T_m", "rayleigh_distance_m", "bs_mr_distance_m", "boundary_p_max"},
                      {{std::to_string(cfg.P_h), std::to_string(cfg.P_v), num(cfg.delta_T), num(rayleigh_distance(cfg)),
                        num(separation), std::to_string(boundary_subarray_size(cfg))}});
        }

        void run_error_vs_array(const experiment &exp, const scenario_config &cfg, const wavefront_model &study,
                                output_set &out)
        {
            const auto sides = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            const double times[] = {0.0, 1.0, 2.0};
            const wavefront_model models[] = {wavefront_model::planar(), study};

            std::map<std::string, std::vector<row>> curves;
            for (double side_value : sides)
            {
                scenario_config c = cfg;
                c.P_h = c.P_v = as_count(side_value, "array side");
                const auto field = generate_scatterers(c, exp.seed);
                for (double t : times)
                {
                    const auto ref = channel_matrix(t, c, wavefront_model::spherical(), field);
                    for (const auto &m : models)
                    {
                        const auto cand = channel_matrix(t, c, capped(m, c), field);
                        curves["error_vs_array_" + model_label(m) + "_" + label("t", t) + ".csv"].push_back(
                            {std::to_string(c.P_h), num(model_error_delta(ref.H, cand.H)), std::to_string(exp.seed)});
                    }
                }
            }
            for (const auto &[name, rows] : curves)
                out.write(name, {"side_elements", "delta_db", "seed"}, rows);
        }

        void run_error_vs_subarray(const experiment &exp, const scenario_config &cfg, output_set &out)
        {
            const auto sizes = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            const auto field = generate_scatterers(cfg, exp.seed);
            for (double t : {0.0, 1.0, 2.0})
            {
                const auto ref = channel_matrix(t, cfg, wavefront_model::spherical(), field);
                std::vector<row> rows;
                for (double s : sizes)
                {
                    const int p = as_count(s, "subarray size");
                    const auto model = wavefront_model::subarray(p, p);
                    model.validate_for(cfg);
                    const auto cand = channel_matrix(t, cfg, model, field);
                    rows.push_back({std::to_string(p), num(model_error_delta(ref.H, cand.H)), std::to_string(exp.seed)});
                }
                out.write("error_vs_subarray_" + label("t", t) + ".csv", {"p_max", "delta_db", "seed"}, rows);
            }
        }

        row complexity_row(const std::string &head, const complexity_report &r)
        {
            return {head, num(r.ro_total), num(r.ro_los_per_pair), num(r.ro_nlos_per_pair)};
        }

        void run_complexity(const experiment &exp, const scenario_config &cfg, const wavefront_model &study,
                            output_set &out)
        {
            const auto sizes = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            std::vector<row> rows;
            for (double s : sizes)
            {
                const int p = as_count(s, "subarray size");
                rows.push_back(complexity_row(std::to_string(p), ro_complexity(wavefront_model::subarray(p, p), cfg)));
            }
            out.write("complexity_subarray.csv", {"p_max", "ro_total", "ro_los_per_pair", "ro_nlos_per_pair"}, rows);

            std::vector<row> refs;
            for (const auto &m : {wavefront_model::spherical(), wavefront_model::planar(), study})
                refs.push_back(complexity_row(m.to_string(), ro_complexity(m, cfg)));
            out.write("complexity_reference.csv", {"model", "ro_total", "ro_los_per_pair", "ro_nlos_per_pair"}, refs);
        }

        std::vector<curve> spatial_curves(const scenario_config &cfg, const wavefront_model &study)
        {
            std::vector<curve> curves;
            for (double h : {10.0, 20.0, 30.0})
            {
                scenario_config c = cfg;
                c.H_0 = h;
                for (const auto &m : {wavefront_model::spherical(), study})
                    curves.push_back({label("H0", h) + "_" + model_label(m), c, m, 0.0});
            }
            for (double eta : {0.0, pi / 2})
                for (double t : {0.0, 2.0})
                {
                    scenario_config c = cfg;
                    c.eta_R = eta;
                    curves.push_back({label("eta", eta) + "_" + label("t", t) + "_" + model_label(study), c, study, t});
                }
            return curves;
        }

        void run_spatial(const experiment &exp, const scenario_config &cfg, const wavefront_model &study,
                         output_set &out)
        {
            const auto lags = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            field_cache cache({exp.n_realizations, exp.seed});
            for (const auto &c : spatial_curves(cfg, study))
            {
                const auto &fields = cache.get(c.cfg);
                std::vector<row> rows;
                for (double lag : lags)
                {
                    if (lag < 0.0 || lag != std::floor(lag) || lag >= c.cfg.P_h)
                        throw std::invalid_argument("spatial lags must be integers in 0..P_h-1");
                    const int dp = static_cast<int>(lag);
                    const auto e = st_ccf(antenna_pair{}, antenna_pair{{1 + dp, 1}, 1}, 0.0, c.t, c.cfg, c.model, fields);
                    rows.push_back(correlation_row({std::to_string(dp), num(dp * c.cfg.delta_T / c.cfg.lambda())}, e,
                                                   exp.n_realizations, exp.seed));
                }
                out.write("spatial_ccf_" + c.name + ".csv",
                          {"dp_elements", "lag_wavelengths", "re", "im", "magnitude", "n_realizations", "seed"}, rows);
            }
        }

        void run_temporal(const experiment &exp, const scenario_config &cfg, const wavefront_model &study,
                          output_set &out)
        {
            const auto lags = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            std::vector<curve> curves;
            for (double K : {0.1, 1.0, 10.0})
            {
                scenario_config c = cfg;
                c.K = K;
                for (const auto &m : {wavefront_model::spherical(), study})
                    curves.push_back({label("K", K) + "_" + model_label(m), c, m, 0.0});
            }
            for (double t : {0.0, 2.0, 5.0})
                curves.push_back({label("t", t) + "_" + model_label(study), cfg, study, t});

            field_cache cache({exp.n_realizations, exp.seed});
            for (const auto &c : curves)
            {
                const auto &fields = cache.get(c.cfg);
                std::vector<row> rows;
                for (double dt : lags)
                    rows.push_back(correlation_row({num(dt)}, temporal_acf(dt, c.t, c.cfg, c.model, fields),
                                                   exp.n_realizations, exp.seed));
                out.write("temporal_acf_" + c.name + ".csv",
                          {"dt_s", "re", "im", "magnitude", "n_realizations", "seed"}, rows);
            }
        }

        void run_frequency(const experiment &exp, const scenario_config &cfg, const wavefront_model &study,
                           output_set &out)
        {
            const auto lags = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            std::vector<curve> curves;
            for (double t : {0.0, 1.0, 2.0})
                for (const auto &m : {wavefront_model::spherical(), study})
                    curves.push_back({label("t", t) + "_" + model_label(m), cfg, m, t});
            for (double h : {10.0, 30.0})
                for (double v : {5.0, 10.0})
                {
                    scenario_config c = cfg;
                    c.H_0 = h;
                    c.v_R = v;
                    curves.push_back({label("H0", h) + "_" + label("v", v) + "_" + model_label(study), c, study, 1.0});
                }

            field_cache cache({exp.n_realizations, exp.seed});
            for (const auto &c : curves)
            {
                const auto &fields = cache.get(c.cfg);
                std::vector<row> rows;
                for (double df : lags)
                    rows.push_back(correlation_row({num(df)}, frequency_cf(df, c.t, c.cfg, c.model, fields),
                                                   exp.n_realizations, exp.seed));
                out.write("frequency_cf_" + c.name + ".csv",
                          {"df_hz", "re", "im", "magnitude", "n_realizations", "seed"}, rows);
            }
        }

        void run_capacity(const experiment &exp, const scenario_config &cfg, const wavefront_model &study,
                          output_set &out)
        {
            const auto snr_db = exp.sweep ? exp.sweep->values : default_sweep(exp.kind).values;
            std::vector<curve> curves;
            for (int side : {16, 32, 64})
                for (int Q : {1, 2, 4})
                {
                    scenario_config c = cfg;
                    c.P_h = c.P_v = side;
                    c.Q = Q;
                    curves.push_back({"P_" + std::to_string(side) + "x" + std::to_string(side) + "_Q_" +
                                          std::to_string(Q),
                                      c, capped(study, c), 0.0});
                }
            for (double h : {10.0, 20.0, 40.0, 80.0})
            {
                scenario_config c = cfg;
                c.H_0 = h;
                curves.push_back({label("H0", h), c, study, 0.0});
            }
            for (double d : {20.0, 50.0, 100.0, 200.0})
            {
                scenario_config c = cfg;
                c.D_0 = d;
                curves.push_back({label("D0", d), c, study, 0.0});
            }

            for (const auto &c : curves)
            {
                c.model.validate_for(c.cfg);
                std::vector<std::vector<double>> per_field(exp.n_realizations);
                const mc_options opts{exp.n_realizations, exp.seed};
                parallel_for(exp.n_realizations, [&](std::size_t i) {
                    const auto field = power_weights(c.cfg.K).nlos > 0.0 ? realization_field(c.cfg, opts.seed, i)
                                                                         : scatterer_field{};
                    const auto H = channel_matrix(c.t, c.cfg, c.model, field);
                    auto &caps = per_field[i];
                    for (double db : snr_db)
                        caps.push_back(capacity(H, std::pow(10.0, db / 10.0)));
                });

                std::vector<row> rows;
                for (std::size_t j = 0; j < snr_db.size(); ++j)
                {
                    double sum = 0.0;
                    for (const auto &caps : per_field)
                        sum += caps[j];
                    rows.push_back({num(snr_db[j]), num(sum / static_cast<double>(exp.n_realizations)),
                                    std::to_string(exp.n_realizations), std::to_string(exp.seed)});
                }
                out.write("capacity_" + c.name + ".csv", {"snr_db", "capacity_bps_hz", "n_realizations", "seed"}, rows);
            }
        }
    }

    std::string to_string(experiment_kind kind)
    {
        return kind_names().at(kind);
    }

    experiment_kind parse_experiment_kind(const std::string &name)
    {
        for (const auto &[kind, n] : kind_names())
            if (n == name)
                return kind;
        throw std::invalid_argument("unknown experiment '" + name + "'");
    }

    const std::vector<experiment_kind> &all_experiment_kinds()
    {
        static const std::vector<experiment_kind> kinds = [] {
            std::vector<experiment_kind> k;
            for (const auto &[kind, name] : kind_names())
                k.push_back(kind);
            return k;
        }();
        return kinds;
    }

    sweep_axis sweep_axis::parse(const std::string &text)
    {
        auto to_double = [&](const std::string &s) {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(s, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != s.size() || !std::isfinite(v))
                throw std::invalid_argument("invalid sweep value '" + s + "' in '" + text + "'");
            return v;
        };

        sweep_axis axis;
        if (std::count(text.begin(), text.end(), ':') == 2)
        {
            const auto a = text.find(':'), b = text.find(':', a + 1);
            const double start = to_double(text.substr(0, a)), stop = to_double(text.substr(a + 1, b - a - 1));
            const double count = to_double(text.substr(b + 1));
            if (count < 1 || count != std::floor(count) || count > 1e6)
                throw std::invalid_argument("sweep point count must be a positive integer");
            const auto n = static_cast<int>(count);
            for (int i = 0; i < n; ++i)
                axis.values.push_back(n == 1 ? start : start + (stop - start) * i / (n - 1));
        }
        else
        {
            std::istringstream in(text);
            std::string item;
            while (std::getline(in, item, ','))
                axis.values.push_back(to_double(item));
        }
        if (axis.values.empty())
            throw std::invalid_argument("sweep axis is empty");
        return axis;
    }

    sweep_axis default_sweep(experiment_kind kind)
    {
        switch (kind)
        {
        case experiment_kind::rayleigh_table:
            return {{2.4e9, 5.0e9}};
        case experiment_kind::error_vs_array:
            return {{8, 16, 24, 32, 40, 48, 56, 64}};
        case experiment_kind::error_vs_subarray:
            return {{2, 4, 8, 16, 30, 32, 64}};
        case experiment_kind::complexity_sweep:
            return {{1, 2, 4, 8, 16, 30}};
        case experiment_kind::spatial_ccf:
            return sweep_axis::parse("0:16:17");
        case experiment_kind::temporal_acf:
            return sweep_axis::parse("0:0.02:21");
        case experiment_kind::frequency_cf:
            return sweep_axis::parse("0:25e6:26");
        case experiment_kind::capacity_sweep:
            return sweep_axis::parse("-10:30:9");
        }
        throw std::invalid_argument("unknown experiment kind");
    }

    run_manifest run_experiment(const experiment &exp, const scenario_config &cfg)
    {
        cfg.validate();
        if (exp.sweep && exp.sweep->values.empty())
            throw std::invalid_argument("sweep axis is empty");
        if (exp.n_realizations < 1)
            throw std::invalid_argument("at least one realization is required");

        // The default study model shrinks to fit small arrays; an explicit one must fit as given.
        const auto study = exp.model ? wavefront_model::parse(*exp.model) : capped(wavefront_model::subarray(30, 30), cfg);
        study.validate_for(cfg);

        std::error_code ec;
        std::filesystem::create_directories(exp.output, ec);
        if (!std::filesystem::is_directory(exp.output))
            throw std::runtime_error("cannot create output directory " + exp.output.string());

        const auto start = std::chrono::steady_clock::now();
        output_set out(exp.output);
        switch (exp.kind)
        {
        case experiment_kind::rayleigh_table:
            run_rayleigh(exp, cfg, out);
            break;
        case experiment_kind::error_vs_array:
            run_error_vs_array(exp, cfg, study, out);
            break;
        case experiment_kind::error_vs_subarray:
            run_error_vs_subarray(exp, cfg, out);
            break;
        case experiment_kind::complexity_sweep:
            run_complexity(exp, cfg, study, out);
            break;
        case experiment_kind::spatial_ccf:
            run_spatial(exp, cfg, study, out);
            break;
        case experiment_kind::temporal_acf:
            run_temporal(exp, cfg, study, out);
            break;
        case experiment_kind::frequency_cf:
            run_frequency(exp, cfg, study, out);
            break;
        case experiment_kind::capacity_sweep:
            run_capacity(exp, cfg, study, out);
            break;
        }

        run_manifest m;
        m.config_json = config_to_json(cfg);
        m.code_version = NFMIMO_VERSION;
        m.experiment = to_string(exp.kind);
        m.seed = exp.seed;
        m.n_realizations = exp.n_realizations;
        m.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m.outputs = out.files;

        const auto manifest_path = exp.output / (m.experiment + "_manifest.json");
        std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
        if (!mf || !(mf << manifest_to_json(m) << '\n') || !mf.flush())
            throw std::runtime_error("cannot write " + manifest_path.string());
        return m;
    }

    std::string manifest_to_json(const run_manifest &m)
    {
        nlohmann::json j;
        j["experiment"] = m.experiment;
        j["code_version"] = m.code_version;
        j["seed"] = m.seed;
        j["n_realizations"] = m.n_realizations;
        j["wall_clock_s"] = m.wall_clock_s;
        j["config"] = nlohmann::json::parse(m.config_json);
        j["outputs"] = nlohmann::json::array();
        for (const auto &f : m.outputs)
            j["outputs"].push_back({{"file", f.path.filename().string()}, {"sha256", f.sha256}});
        return j.dump(2);
    }
}
