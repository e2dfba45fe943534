#include "nfmimo/statistics.hpp"

#include "nfmimo/geometry.hpp"
#include "nfmimo/parallel.hpp"

#include <limits>
#include <optional>

namespace nfmimo
{
    namespace
    {
        // x conj(y) / (|x| |y|), or nothing when either magnitude vanishes.
        std::optional<cplx> normalized_product(cplx x, cplx y)
        {
            const double mag = std::abs(x) * std::abs(y);
            if (!(mag > 0.0))
                return std::nullopt;
            return x * std::conj(y) / mag;
        }

        // Ensemble mean of normalized products over the fields, accumulated in realization order.
        template <typename Pair>
        void average_nlos(std::span<const scatterer_field> fields, Pair &&pair, correlation_estimate &out)
        {
            if (fields.empty())
                throw std::invalid_argument("at least one realization is required");

            std::vector<std::optional<cplx>> slots(fields.size());
            parallel_for(fields.size(), [&](std::size_t i) {
                const auto [x, y] = pair(fields[i]);
                slots[i] = normalized_product(x, y);
            });

            cplx sum = 0.0;
            for (const auto &s : slots)
            {
                if (s)
                {
                    sum += *s;
                    ++out.used;
                }
                else
                    ++out.excluded;
            }
            if (out.used == 0)
                throw std::domain_error("every realization produced a zero-magnitude NLoS coefficient");
            out.nlos = sum / static_cast<double>(out.used);
        }

        void finish(correlation_estimate &out, double K)
        {
            const auto w = power_weights(K);
            out.w_los = w.los;
            out.w_nlos = w.nlos;
            out.value = w.los * out.los + w.nlos * out.nlos;
        }
    }

    std::vector<scatterer_field> realization_fields(const scenario_config &cfg, const mc_options &opts)
    {
        std::vector<scatterer_field> fields(opts.n_realizations);
        parallel_for(fields.size(), [&](std::size_t i) { fields[i] = realization_field(cfg, opts.seed, i); });
        return fields;
    }

    correlation_estimate st_ccf(const antenna_pair &a, const antenna_pair &b, double dt, double t,
                                const scenario_config &cfg, const wavefront_model &model,
                                std::span<const scatterer_field> fields)
    {
        if (t < 0.0 || t + dt < 0.0)
            throw std::invalid_argument("both correlation instants must be non-negative");

        correlation_estimate out;
        const auto los = normalized_product(cir_los(a.p, a.q, t, cfg, model), cir_los(b.p, b.q, t + dt, cfg, model));
        out.los = los.value_or(cplx{});

        if (power_weights(cfg.K).nlos > 0.0)
            average_nlos(fields, [&](const scatterer_field &f) {
                return std::pair{cir_nlos(a.p, a.q, t, cfg, model, f), cir_nlos(b.p, b.q, t + dt, cfg, model, f)};
            }, out);
        finish(out, cfg.K);
        return out;
    }

    correlation_estimate st_ccf(const antenna_pair &a, const antenna_pair &b, double dt, double t,
                                const scenario_config &cfg, const wavefront_model &model, const mc_options &opts)
    {
        if (power_weights(cfg.K).nlos == 0.0)
            return st_ccf(a, b, dt, t, cfg, model, std::span<const scatterer_field>{});
        const auto fields = realization_fields(cfg, opts);
        return st_ccf(a, b, dt, t, cfg, model, fields);
    }

    correlation_estimate st_ccf(const spatial_lag &lag, double dt, double t, const scenario_config &cfg,
                                const wavefront_model &model, const mc_options &opts, const antenna_pair &ref)
    {
        const antenna_pair other{{ref.p.h + lag.dp_h, ref.p.v + lag.dp_v}, ref.q + lag.dq};
        return st_ccf(ref, other, dt, t, cfg, model, opts);
    }

    correlation_estimate temporal_acf(double dt, double t, const scenario_config &cfg, const wavefront_model &model,
                                      std::span<const scatterer_field> fields, const antenna_pair &a)
    {
        return st_ccf(a, a, dt, t, cfg, model, fields);
    }

    correlation_estimate temporal_acf(double dt, double t, const scenario_config &cfg, const wavefront_model &model,
                                      const mc_options &opts, const antenna_pair &a)
    {
        return st_ccf(a, a, dt, t, cfg, model, opts);
    }

    correlation_estimate frequency_cf(double df, double t, const scenario_config &cfg, const wavefront_model &model,
                                      std::span<const scatterer_field> fields, const antenna_pair &a,
                                      band_check check)
    {
        if (!(df >= 0.0))
            throw std::invalid_argument("frequency offset must be non-negative");

        const double f0 = cfg.f_c, f1 = cfg.f_c + df;
        const scatterer_field none;
        correlation_estimate out;
        out.los = normalized_product(transfer_function_components(a.p, a.q, t, f0, cfg, model, none, check).los,
                                     transfer_function_components(a.p, a.q, t, f1, cfg, model, none, check).los)
                      .value_or(cplx{});

        if (power_weights(cfg.K).nlos > 0.0)
            average_nlos(fields, [&](const scatterer_field &f) {
                if (f.empty())
                    throw std::invalid_argument("scatterer field is empty");
                return std::pair{transfer_function_components(a.p, a.q, t, f0, cfg, model, f, check).nlos,
                                 transfer_function_components(a.p, a.q, t, f1, cfg, model, f, check).nlos};
            }, out);
        finish(out, cfg.K);
        return out;
    }

    correlation_estimate frequency_cf(double df, double t, const scenario_config &cfg, const wavefront_model &model,
                                      const mc_options &opts, const antenna_pair &a, band_check check)
    {
        if (power_weights(cfg.K).nlos == 0.0)
            return frequency_cf(df, t, cfg, model, std::span<const scatterer_field>{}, a, check);
        const auto fields = realization_fields(cfg, opts);
        return frequency_cf(df, t, cfg, model, fields, a, check);
    }

    Eigen::MatrixXcd normalize_channel(const Eigen::MatrixXcd &H)
    {
        if (!H.allFinite())
            throw std::invalid_argument("channel matrix has non-finite entries");
        const double fro2 = H.squaredNorm();
        if (!(fro2 > 0.0))
            throw std::domain_error("cannot normalize an all-zero channel matrix");
        return H * std::sqrt(static_cast<double>(H.rows() * H.cols()) / fro2);
    }

    double capacity(const Eigen::MatrixXcd &H, double rho_snr)
    {
        if (!(rho_snr >= 0.0))
            throw std::invalid_argument("SNR must be non-negative");
        const Eigen::MatrixXcd Hn = normalize_channel(H);
        const auto P = static_cast<double>(Hn.cols());

        Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(Hn.rows(), Hn.rows());
        G.noalias() += (rho_snr / P) * (Hn * Hn.adjoint());
        const Eigen::LLT<Eigen::MatrixXcd> llt(G);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("capacity matrix is not positive definite");

        double log_det = 0.0;
        for (Eigen::Index i = 0; i < G.rows(); ++i)
            log_det += 2.0 * std::log(llt.matrixLLT()(i, i).real());
        return log_det / std::numbers::ln2;
    }

    double capacity(const channel_realization &ch, double rho_snr)
    {
        return capacity(ch.H, rho_snr);
    }

    double model_error_delta(const wavefront_model &model, double t, const scenario_config &cfg,
                             const scatterer_field &field)
    {
        if (model.type() == wavefront_model::kind::spherical)
            throw std::invalid_argument("the spherical model is the error reference");

        const auto ref = channel_matrix(t, cfg, wavefront_model::spherical(), field);
        const auto cand = channel_matrix(t, cfg, model, field);
        return model_error_delta(ref.H, cand.H);
    }

    double model_error_delta(const Eigen::MatrixXcd &spherical, const Eigen::MatrixXcd &candidate)
    {
        if (spherical.rows() != candidate.rows() || spherical.cols() != candidate.cols())
            throw std::invalid_argument("channel matrices differ in shape");

        double sum = 0.0;
        for (Eigen::Index q = 0; q < spherical.rows(); ++q)
            for (Eigen::Index p = 0; p < spherical.cols(); ++p)
            {
                const double denom = std::abs(spherical(q, p));
                if (!(denom > 0.0))
                    throw std::domain_error("spherical reference coefficient is zero");
                sum += std::abs(candidate(q, p) - spherical(q, p)) / denom;
            }
        if (sum == 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(sum);
    }

    complexity_report ro_complexity(const wavefront_model &model, const scenario_config &cfg)
    {
        model.validate_for(cfg);
        complexity_report r;
        r.model = model;
        r.counts_h = partition_counts(cfg.P_h, model.p_max_h(cfg));
        r.counts_v = partition_counts(cfg.P_v, model.p_max_v(cfg));

        const long long subarrays = static_cast<long long>(r.counts_h) * r.counts_v;
        r.ro_total = subarrays * cfg.Q * (ro_los_per_subarray + ro_nlos_per_subarray);
        const double share = static_cast<double>(subarrays) / cfg.n_tx();
        r.ro_los_per_pair = ro_los_per_subarray * share;
        r.ro_nlos_per_pair = ro_nlos_per_subarray * share;
        return r;
    }
}
