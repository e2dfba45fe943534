// Command line front end: one subcommand per experiment plus field and channel export.
#include "nfmimo/channel.hpp"
#include "nfmimo/harness.hpp"
#include "nfmimo/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{
    struct common_options
    {
        std::string config;
        std::vector<std::string> overrides;
        std::uint64_t seed = 1;
        std::string out = "out";
    };

    void add_common(CLI::App *cmd, common_options &o)
    {
        cmd->add_option("--config", o.config, "JSON scenario file (defaults apply when omitted)");
        cmd->add_option("--set", o.overrides, "Override a scenario field, key=value (repeatable)");
        cmd->add_option("--seed", o.seed, "Master RNG seed");
        cmd->add_option("--out", o.out, "Output directory");
    }

    nfmimo::scenario_config scenario(const common_options &o)
    {
        return o.config.empty() ? nfmimo::validate_config("", o.overrides) : nfmimo::load_config(o.config, o.overrides);
    }

    void report(const nfmimo::run_manifest &m)
    {
        std::cout << m.experiment << ": " << m.outputs.size() << " file(s) in " << nfmimo::format_double(m.wall_clock_s)
                  << " s\n";
        for (const auto &f : m.outputs)
            std::cout << "  " << f.path.string() << "  " << f.sha256 << '\n';
    }

    std::ofstream open_output(const std::filesystem::path &path)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        return out;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Near-field massive MIMO channel simulator"};
    app.set_version_flag("--version", std::string(NFMIMO_VERSION_STRING));
    app.require_subcommand(1);

    common_options common;
    std::size_t realizations = 500;
    std::string model;
    std::string sweep;

    auto add_experiment = [&](const std::string &name, const std::string &help) {
        auto *cmd = app.add_subcommand(name, help);
        add_common(cmd, common);
        cmd->add_option("--realizations", realizations, "Monte Carlo realizations")->check(CLI::PositiveNumber);
        cmd->add_option("--model", model, "Model under study: spherical, planar or subarray:HxV");
        if (name != "all")
            cmd->add_option("--sweep", sweep, "Sweep values, v1,v2,... or start:stop:count");
        return cmd;
    };

    for (auto kind : nfmimo::all_experiment_kinds())
        add_experiment(nfmimo::to_string(kind), "Run the " + nfmimo::to_string(kind) + " experiment");
    add_experiment("all", "Run every experiment with its default sweep");

    auto *scat = app.add_subcommand("scatterers", "Export one scatterer field as CSV");
    add_common(scat, common);
    std::string scat_file = "scatterers.csv";
    scat->add_option("--file", scat_file, "File name inside the output directory");

    auto *chan = app.add_subcommand("channel", "Export one channel matrix");
    add_common(chan, common);
    double t = 0.0;
    std::string chan_model = "spherical", format = "csv", field_path, chan_file;
    chan->add_option("--time", t, "Time instant [s]")->check(CLI::NonNegativeNumber);
    chan->add_option("--model", chan_model, "spherical, planar or subarray:HxV");
    chan->add_option("--format", format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));
    chan->add_option("--field", field_path, "Scatterer CSV to use instead of drawing one")->check(CLI::ExistingFile);
    chan->add_option("--file", chan_file, "File name inside the output directory (default channel.<format>)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        const auto cfg = scenario(common);
        auto *cmd = app.get_subcommands().front();
        const std::string name = cmd->get_name();

        if (name == "scatterers")
        {
            const auto path = std::filesystem::path(common.out) / scat_file;
            auto out = open_output(path);
            nfmimo::write_scatterers_csv(out, nfmimo::generate_scatterers(cfg, common.seed));
            std::cout << path.string() << '\n';
            return 0;
        }
        if (name == "channel")
        {
            const auto m = nfmimo::wavefront_model::parse(chan_model);
            m.validate_for(cfg);
            nfmimo::scatterer_field field;
            if (!field_path.empty())
            {
                std::ifstream in(field_path);
                field = nfmimo::read_scatterers_csv(in);
            }
            else if (nfmimo::power_weights(cfg.K).nlos > 0.0)
                field = nfmimo::generate_scatterers(cfg, common.seed);
            const auto ch = nfmimo::channel_matrix(t, cfg, m, field);
            const auto path = std::filesystem::path(common.out) / (chan_file.empty() ? "channel." + format : chan_file);
            auto out = open_output(path);
            if (format == "csv")
                nfmimo::write_channel_csv(out, ch);
            else
                nfmimo::write_channel_binary(out, ch);
            std::cout << path.string() << "  Q=" << ch.Q() << " P=" << ch.P() << '\n';
            return 0;
        }

        nfmimo::experiment exp;
        exp.seed = common.seed;
        exp.n_realizations = realizations;
        exp.output = common.out;
        if (!model.empty())
            exp.model = model;
        if (name == "all")
        {
            for (auto kind : nfmimo::all_experiment_kinds())
            {
                exp.kind = kind;
                report(nfmimo::run_experiment(exp, cfg));
            }
            return 0;
        }
        exp.kind = nfmimo::parse_experiment_kind(name);
        if (!sweep.empty())
            exp.sweep = nfmimo::sweep_axis::parse(sweep);
        report(nfmimo::run_experiment(exp, cfg));
        return 0;
    }
    catch (const nfmimo::config_error &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
