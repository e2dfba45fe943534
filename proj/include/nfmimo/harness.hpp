#pragma once

#include "nfmimo/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nfmimo
{
    enum class experiment_kind
    {
        rayleigh_table,    // near/far-field boundary for the reference apertures
        error_vs_array,    // modeling error against array side length
        error_vs_subarray, // modeling error against largest-subarray size
        complexity_sweep,  // real-operation counts against largest-subarray size
        spatial_ccf,       // spatial correlation against BS element spacing
        temporal_acf,      // temporal autocorrelation against time lag
        frequency_cf,      // frequency correlation against frequency offset
        capacity_sweep     // capacity against SNR
    };

    std::string to_string(experiment_kind kind);
    experiment_kind parse_experiment_kind(const std::string &name);
    const std::vector<experiment_kind> &all_experiment_kinds();

    // Sweep axis values. Parsed from "v1,v2,..." or "start:stop:count" (inclusive linspace).
    struct sweep_axis
    {
        std::vector<double> values;

        static sweep_axis parse(const std::string &text);
    };

    struct experiment
    {
        experiment_kind kind = experiment_kind::rayleigh_table;
        std::optional<sweep_axis> sweep;      // default axis per kind when empty
        std::uint64_t seed = 1;
        std::size_t n_realizations = 500;
        std::optional<std::string> model;     // wavefront model under study, "subarray:30x30" by default
        std::filesystem::path output = "out";
    };

    struct output_file
    {
        std::filesystem::path path;
        std::string sha256;
    };

    struct run_manifest
    {
        std::string config_json;
        std::string code_version;
        std::string experiment;
        std::uint64_t seed = 0;
        std::size_t n_realizations = 0;
        double wall_clock_s = 0.0;
        std::vector<output_file> outputs;
    };

    // Default sweep values of an experiment kind.
    sweep_axis default_sweep(experiment_kind kind);

    // Runs the sweep, writes one CSV per curve into exp.output plus <kind>_manifest.json.
    // Deterministic for a fixed (exp, cfg). Throws std::runtime_error when the output cannot be written
    // and std::invalid_argument / config_error for invalid sweeps or models.
    run_manifest run_experiment(const experiment &exp, const scenario_config &cfg);

    std::string manifest_to_json(const run_manifest &m);
}
