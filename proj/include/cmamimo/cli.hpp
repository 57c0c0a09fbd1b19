// SPDX-License-Identifier: Apache-2.0
//
// cmamimo: characteristic-mode degrees-of-freedom analysis for MIMO antennas
// Copyright (C) 2026 The cmamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CMAMIMO_CLI_HPP
#define CMAMIMO_CLI_HPP

#include "config.hpp"
#include "ga.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "plot.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace cmamimo::cli
{
    namespace fs = std::filesystem;
    using nlohmann::json;

    enum ExitCode
    {
        exit_ok = 0,
        exit_failure = 1,
        exit_config = 2,
        exit_geometry = 3,
        exit_numerical = 4
    };

    struct Flags
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<double> gamma;
        std::optional<int> n_keep;
        std::optional<int> jobs;
    };

    inline RunConfig resolve_config(const Flags &f)
    {
        RunConfig c;
        if (!f.config.empty())
            c = RunConfig::load(f.config);
        if (f.seed)
            c.seed = *f.seed;
        if (f.out)
            c.out = *f.out;
        if (f.gamma)
            c.gamma = *f.gamma;
        if (f.n_keep)
            c.n_keep = *f.n_keep;
        if (f.jobs)
            c.jobs = *f.jobs;
        c.validate();
        return c;
    }

    inline fs::path prepare_out(const RunConfig &c)
    {
        fs::path dir(c.out);
        fs::create_directories(dir);
        return dir;
    }

    inline void write_text(const fs::path &p, const std::string &s) { io::write_file_atomic(p, s); }

    // Timestamps live only here so every other artifact is reproducible from (config, seed).
    inline void write_metadata(const fs::path &dir, const std::string &command, const RunConfig &c)
    {
        json j;
        j["command"] = command;
        j["seed"] = c.seed;
        j["jobs"] = c.jobs;
        j["version"] = "0.1.0";
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["timestamp"] = buf;
        write_text(dir / "metadata.json", j.dump(2) + "\n");
    }

    inline plot::Figure spectrum_figure(const std::string &title, const std::vector<std::pair<std::string, std::vector<double>>> &spectra,
                                        double gamma)
    {
        plot::Figure fig;
        fig.title = title;
        fig.xlabel = "index l";
        fig.ylabel = "sigma_l^2";
        fig.log_y = true;
        for (const auto &[name, sigma] : spectra)
        {
            plot::Series s;
            s.name = name;
            for (std::size_t i = 0; i < sigma.size(); ++i)
            {
                s.x.push_back(static_cast<double>(i + 1));
                s.y.push_back(sigma[i] * sigma[i]);
            }
            fig.series.push_back(s);
            if (!sigma.empty())
                fig.hlines.push_back({name + " threshold", gamma * sigma[0] * sigma[0]});
        }
        return fig;
    }

    inline int cmd_modes(const RunConfig &c, std::ostream &out)
    {
        const PixelProblem p = c.problem();
        GaRng rng(c.seed);
        const BitVector bits = resolve_bits(c.tx_config, p.tx_spec, rng);
        const AntennaModel a = analyze_antenna(p.tx_spec, bits, c.frequency, c.n_keep);

        std::ostringstream modes_csv;
        write_mode_report_csv(modes_csv, a.modes);
        plot::Figure fig;
        fig.title = "Modal significance";
        fig.xlabel = "mode";
        fig.ylabel = "|m|";
        plot::Series s{"|m|", {}, {}, plot::Style::line_markers};
        for (int i = 0; i < a.modes.n_kept(); ++i)
        {
            s.x.push_back(i + 1);
            s.y.push_back(std::abs(a.modes.significances(i)));
        }
        fig.series.push_back(s);

        const fs::path dir = prepare_out(c);
        write_text(dir / "modes.csv", modes_csv.str());
        plot::write_figure(dir, "modal_significance", fig);
        write_text(dir / "impedance.json", io::impedance_to_json(a.impedance).dump() + "\n");
        write_metadata(dir, "modes", c);
        out << "modes: " << a.modes.n_kept() << " kept of " << a.modes.available << " (" << a.basis.size() << " RWG functions)\n";
        return exit_ok;
    }

    inline int cmd_dof(const RunConfig &c, std::ostream &out)
    {
        const PixelProblem p = c.problem();
        p.validate();
        GaRng rng(c.seed);
        const BitVector bt = resolve_bits(c.tx_config, p.tx_spec, rng);
        const BitVector br = resolve_bits(c.rx_config, p.rx_spec, rng);
        const LinkSetup setup = LinkSetup::create(p.tx_spec, p.rx_spec, p.frequency, p.gamma, p.n_keep);
        const AntennaModel a = analyze_antenna(p.tx_spec, bt, p.frequency, p.n_keep);
        const AntennaModel b = analyze_antenna(p.rx_spec, br, p.frequency, p.n_keep);
        const LinkResult r = evaluate_link(setup, a, b, true);

        json j = io::report_to_json(r.report);
        BitVector phi = bt;
        phi.insert(phi.end(), br.begin(), br.end());
        j["phi"] = phi_to_hex(enforce_spine(p, phi));
        j["gamma_residual"] = r.gamma.residual;

        std::ostringstream h_csv, g_csv;
        write_spectrum_csv(h_csv, r.channel.singulars, c.gamma);
        write_spectrum_csv(g_csv, setup.channel.singulars, c.gamma);
        const auto fig = spectrum_figure("Equivalent channel spectrum", {{"H", r.report.sigma_H}}, c.gamma);

        const fs::path dir = prepare_out(c);
        write_text(dir / "dof_report.json", j.dump(2) + "\n");
        write_text(dir / "spectrum_H.csv", h_csv.str());
        write_text(dir / "spectrum_G.csv", g_csv.str());
        plot::write_figure(dir, "spectrum", fig);
        write_metadata(dir, "dof", c);
        out << "dof_H = " << r.report.dof_H << ", dof_G = " << r.report.dof_G_effective << '\n';
        return exit_ok;
    }

    inline std::vector<BitVector> random_configurations(const PixelProblem &p, int count, std::uint64_t seed)
    {
        GaRng rng(seed ^ 0x5eed5eed5eed5eedULL);
        std::vector<BitVector> out;
        for (int i = 0; i < count; ++i)
        {
            BitVector phi(static_cast<std::size_t>(p.bit_length()));
            for (auto &b : phi)
                b = static_cast<std::uint8_t>(rng.next() >> 63);
            out.push_back(enforce_spine(p, std::move(phi)));
        }
        return out;
    }

    inline double median(std::vector<double> v)
    {
        if (v.empty())
            return 0.0;
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    // Keeps the first lines whose generation does not exceed the checkpoint.
    inline std::string trimmed_log(const fs::path &log, int generation)
    {
        std::ifstream in(log);
        std::string line, kept;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            try
            {
                if (json::parse(line).at("generation").get<int>() <= generation)
                    kept += line + "\n";
            }
            catch (const json::exception &)
            {
                break;
            }
        }
        return kept;
    }

    inline int cmd_optimize(const RunConfig &c, std::ostream &out)
    {
        const PixelProblem p = c.problem();
        Evaluator ev(p);
        const fs::path dir = prepare_out(c);
        const fs::path log_path = dir / "ga_log.jsonl";
        const fs::path ckpt_path = dir / "ga_checkpoint.json";

        GaRun run;
        std::ofstream log;
        auto checkpoint = [&](const GaRun &r) {
            log << generation_record(r).dump() << '\n';
            log.flush();
            write_text(ckpt_path, checkpoint_json(r).dump() + "\n");
        };
        if (c.resume && fs::exists(ckpt_path))
        {
            run = restore_checkpoint(ev, io::read_json_file(ckpt_path), c.jobs, c.generations);
            write_text(log_path, trimmed_log(log_path, run.generation));
            log.open(log_path, std::ios::app);
            out << "resuming from generation " << run.generation << '\n';
        }
        else
        {
            log.open(log_path, std::ios::trunc);
            run = ga_initialize(ev, c.ga_params());
            checkpoint(run);
        }
        ga_continue(ev, run, checkpoint);
        log.close();

        const Individual &best = run.best();
        if (!best.eval.valid)
            throw NumericalError("every configuration in the final population is degenerate");

        const auto randoms = random_configurations(p, c.random_baseline, c.seed);
        const auto revals = ev.evaluate_batch(randoms, c.jobs);
        std::vector<double> rdofs;
        for (const auto &e : revals)
            if (e.valid)
                rdofs.push_back(e.report.dof_H);
        const Evaluation *sample = nullptr;
        for (const auto &e : revals)
            if (e.valid)
            {
                sample = &e;
                break;
            }

        json j;
        j["best_phi"] = phi_to_hex(best.phi);
        j["generations"] = run.generation;
        j["best_fitness"] = best.fitness();
        j["report"] = io::report_to_json(best.eval.report);
        j["random_median_dof_H"] = median(rdofs);
        j["random_valid"] = rdofs.size();
        j["evaluations"] = ev.assemblies();
        write_text(dir / "best.json", j.dump(2) + "\n");

        plot::Figure conv;
        conv.title = "Convergence";
        conv.xlabel = "generation";
        conv.ylabel = "standard deviation of singular values";
        plot::Series cs{"-fitness", {}, {}, plot::Style::line_markers};
        for (std::size_t k = 0; k < run.best_history.size(); ++k)
        {
            cs.x.push_back(static_cast<double>(k));
            cs.y.push_back(-run.best_history[k]);
        }
        conv.series.push_back(cs);
        plot::write_figure(dir, "convergence", conv);

        std::vector<std::pair<std::string, std::vector<double>>> spectra;
        if (sample)
            spectra.push_back({"random", sample->report.sigma_H});
        spectra.push_back({"optimized", best.eval.report.sigma_H});
        plot::write_figure(dir, "spectrum_compare", spectrum_figure("Random vs optimized", spectra, c.gamma));
        write_metadata(dir, "optimize", c);
        out << "best dof_H = " << best.eval.report.dof_H << " (random median " << median(rdofs) << "), fitness " << best.fitness() << '\n';
        return exit_ok;
    }

    inline int cmd_sweep(const RunConfig &c, std::ostream &out)
    {
        if (c.sweep_values.empty())
            throw ConfigError("sweep_values is empty");
        std::ostringstream csv;
        csv.precision(17);
        csv << "axis,value,dof_G_effective,dof_H_config,dof_H_random_mean,dof_H_optimized,port_mode_upper,lower_bound\n";
        const char *axis = c.sweep_axis == SweepAxis::ports ? "ports" : c.sweep_axis == SweepAxis::separation ? "separation" : "gamma";
        plot::Figure fig;
        fig.title = std::string("DoF versus ") + axis;
        fig.xlabel = axis;
        fig.ylabel = "DoF";
        plot::Series sg{"dof_G", {}, {}, plot::Style::line_markers}, sc{"dof_H configured", {}, {}, plot::Style::line_markers},
            sr{"dof_H random mean", {}, {}, plot::Style::line_markers}, so{"dof_H optimized", {}, {}, plot::Style::line_markers};

        for (double v : c.sweep_values)
        {
            RunConfig pc = c;
            if (c.sweep_axis == SweepAxis::ports)
            {
                if (v != std::floor(v) || v < 1)
                    throw ConfigError("port sweep values must be positive integers");
                pc.ports = static_cast<int>(v);
            }
            else if (c.sweep_axis == SweepAxis::separation)
                pc.separation_lambda = v;
            else
                pc.gamma = v;
            pc.validate();
            const PixelProblem p = pc.problem();
            Evaluator ev(p);

            GaRng rng(pc.seed);
            BitVector phi = resolve_bits(pc.tx_config, p.tx_spec, rng);
            const BitVector br = resolve_bits(pc.rx_config, p.rx_spec, rng);
            phi.insert(phi.end(), br.begin(), br.end());
            const Evaluation conf = ev.evaluate(phi);

            const auto randoms = random_configurations(p, pc.sweep_random, pc.seed);
            double rsum = 0.0;
            int rn = 0;
            for (const auto &e : ev.evaluate_batch(randoms, pc.jobs))
                if (e.valid)
                {
                    rsum += e.report.dof_H;
                    ++rn;
                }
            const double rmean = rn ? rsum / rn : std::numeric_limits<double>::quiet_NaN();

            int opt = -1, upper = conf.report.port_mode_upper, lower = 0;
            Evaluation target = conf;
            if (pc.sweep_optimize)
            {
                const GaRun run = run_ga(ev, pc.ga_params());
                if (run.best().eval.valid)
                {
                    opt = run.best().eval.report.dof_H;
                    target = run.best().eval;
                    phi = run.best().phi;
                }
            }
            if (target.valid)
            {
                // Bounds need the full modal decomposition of the chosen configuration.
                const BitVector bt(phi.begin(), phi.begin() + p.tx_bits()), bb(phi.begin() + p.tx_bits(), phi.end());
                const LinkResult lr = evaluate_link(ev.setup(), analyze_antenna(p.tx_spec, bt, p.frequency, p.n_keep),
                                                    analyze_antenna(p.rx_spec, bb, p.frequency, p.n_keep), true);
                upper = lr.report.port_mode_upper;
                lower = lr.report.lower_bound;
            }
            const int dofG = ev.setup().channel_dof.effective;
            csv << axis << ',' << v << ',' << dofG << ',' << (conf.valid ? std::to_string(conf.report.dof_H) : std::string("nan")) << ','
                << rmean << ',' << (opt >= 0 ? std::to_string(opt) : std::string("nan")) << ',' << upper << ',' << lower << '\n';
            sg.x.push_back(v);
            sg.y.push_back(dofG);
            sc.x.push_back(v);
            sc.y.push_back(conf.valid ? conf.report.dof_H : std::numeric_limits<double>::quiet_NaN());
            sr.x.push_back(v);
            sr.y.push_back(rmean);
            if (pc.sweep_optimize)
            {
                so.x.push_back(v);
                so.y.push_back(opt >= 0 ? opt : std::numeric_limits<double>::quiet_NaN());
            }
            out << axis << " = " << v << ": dof_G " << dofG << ", random mean dof_H " << rmean << '\n';
        }
        fig.series = {sg, sc, sr};
        if (c.sweep_optimize)
            fig.series.push_back(so);

        const fs::path dir = prepare_out(c);
        write_text(dir / "sweep.csv", csv.str());
        plot::write_figure(dir, "sweep_plot", fig);
        write_metadata(dir, "sweep", c);
        return exit_ok;
    }

    inline int cmd_export_mesh(const RunConfig &c, std::ostream &out)
    {
        const PixelProblem p = c.problem();
        const bool tx = c.mesh_side == "tx";
        const PlateSpec &spec = tx ? p.tx_spec : p.rx_spec;
        GaRng rng(c.seed);
        const BitVector bits = resolve_bits(tx ? c.tx_config : c.rx_config, spec, rng);
        const TriMesh mesh = build_plate_mesh(spec, bits);
        std::ostringstream os;
        std::string name;
        if (c.mesh_format == "json")
        {
            os << io::mesh_to_json(mesh).dump(1) << '\n';
            name = "mesh.json";
        }
        else
        {
            io::write_mesh_text(os, mesh);
            name = "mesh.txt";
        }
        const fs::path dir = prepare_out(c);
        write_text(dir / name, os.str());
        write_metadata(dir, "export-mesh", c);
        out << name << ": " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces\n";
        return exit_ok;
    }

    // Parses arguments, dispatches and maps error categories to exit codes.
    inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
    {
        CLI::App app{"Characteristic-mode degrees-of-freedom analysis for pixelated MIMO antennas", "cmamimo"};
        app.require_subcommand(1);
        Flags flags;
        auto add_flags = [&](CLI::App *sub) {
            sub->add_option("--config", flags.config, "key = value run configuration");
            sub->add_option("--seed", flags.seed, "random seed");
            sub->add_option("--out", flags.out, "output directory");
            sub->add_option("--gamma", flags.gamma, "DoF power threshold in (0, 1)");
            sub->add_option("--n-keep", flags.n_keep, "characteristic modes kept per antenna");
            sub->add_option("--jobs", flags.jobs, "worker threads for fitness evaluation");
        };
        auto *modes = app.add_subcommand("modes", "characteristic modes of the transmit plate");
        auto *dof = app.add_subcommand("dof", "achievable DoF of the configured link");
        auto *optimize = app.add_subcommand("optimize", "genetic search for the largest achievable DoF");
        auto *sweep = app.add_subcommand("sweep", "DoF across ports, separation or gamma");
        auto *mesh = app.add_subcommand("export-mesh", "write a plate mesh");
        for (auto *s : {modes, dof, optimize, sweep, mesh})
            add_flags(s);

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::CallForHelp &e)
        {
            out << app.help();
            return exit_ok;
        }
        catch (const CLI::ParseError &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_config;
        }

        try
        {
            const RunConfig c = resolve_config(flags);
            if (*modes)
                return cmd_modes(c, out);
            if (*dof)
                return cmd_dof(c, out);
            if (*optimize)
                return cmd_optimize(c, out);
            if (*sweep)
                return cmd_sweep(c, out);
            return cmd_export_mesh(c, out);
        }
        catch (const ConfigError &e)
        {
            err << "config error: " << e.what() << '\n';
            return exit_config;
        }
        catch (const InputError &e)
        {
            err << "input error: " << e.what() << '\n';
            return exit_config;
        }
        catch (const GeometryError &e)
        {
            err << "geometry error: " << e.what() << '\n';
            return exit_geometry;
        }
        catch (const NumericalError &e)
        {
            err << "numerical error: " << e.what() << '\n';
            return exit_numerical;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_failure;
        }
    }
}

#endif
