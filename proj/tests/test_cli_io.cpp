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

#include "cmamimo/cli.hpp"
#include "cmamimo/config.hpp"
#include "cmamimo/io.hpp"
#include "cmamimo/plot.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace cmamimo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
    constexpr double f0 = 27e9;

    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            static int counter = 0;
            path = fs::temp_directory_path() / ("cmamimo_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
            fs::remove_all(path);
            fs::create_directories(path);
        }
        ~TempDir() { fs::remove_all(path); }
        TempDir(const TempDir &) = delete;
        TempDir &operator=(const TempDir &) = delete;
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path write_config(const fs::path &dir, const std::string &name, const std::string &text)
    {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p;
    }

    struct CliResult
    {
        int code = -1;
        std::string out, err;
    };

    CliResult invoke(std::vector<std::string> args)
    {
        args.insert(args.begin(), "cmamimo");
        std::vector<const char *> argv;
        for (const auto &a : args)
            argv.push_back(a.c_str());
        std::ostringstream o, e;
        CliResult r;
        r.code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
        r.out = o.str();
        r.err = e.str();
        return r;
    }

    std::vector<std::vector<std::string>> read_csv(const fs::path &p, std::string *header = nullptr)
    {
        std::ifstream in(p);
        std::string line;
        std::vector<std::vector<std::string>> rows;
        std::getline(in, line);
        if (header)
            *header = line;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ','))
                cells.push_back(c);
            if (!line.empty() && line.back() == ',')
                cells.emplace_back();
            rows.push_back(cells);
        }
        return rows;
    }

    RunConfig parse(const std::string &text)
    {
        std::istringstream is(text);
        return RunConfig::from_key_values(KeyValueFile::parse(is, "t.cfg"), "t.cfg");
    }

    std::string config_error(const std::string &text)
    {
        try
        {
            parse(text);
        }
        catch (const ConfigError &e)
        {
            return e.what();
        }
        return {};
    }

    // Two ports, 16 bits per plate: small enough for end-to-end GA runs.
    const char *small_link = "ports = 2\nbits_per_port = 8\npixel_size_lambda = 0.3\nseparation_lambda = 1\n";
}

// ---- config ----

TEST(Config, DefaultsMatchOperatingPoint)
{
    const RunConfig c = parse("");
    EXPECT_DOUBLE_EQ(c.frequency, 27e9);
    EXPECT_DOUBLE_EQ(c.gamma, 0.5);
    EXPECT_EQ(c.n_keep, 20);
    EXPECT_EQ(c.bits_per_port, 8);
    EXPECT_EQ(c.ports, 4);
}

TEST(Config, ParsesCommentsAndWhitespace)
{
    const RunConfig c = parse("# header\n\n  ports =  3   # trailing\ngamma=0.25\nsweep_values = 1, 2 ,3\nresume = yes\n");
    EXPECT_EQ(c.ports, 3);
    EXPECT_DOUBLE_EQ(c.gamma, 0.25);
    EXPECT_EQ(c.sweep_values, (std::vector<double>{1, 2, 3}));
    EXPECT_TRUE(c.resume);
}

TEST(Config, DiagnosticsCarrySourceAndLine)
{
    EXPECT_EQ(config_error("ports = 2\nports = 3\n"), "t.cfg:2: duplicate key 'ports' (first set on line 1)");
    EXPECT_EQ(config_error("ports 2\n"), "t.cfg:1: expected 'key = value'");
    EXPECT_EQ(config_error("\n= 2\n"), "t.cfg:2: empty key");
    EXPECT_EQ(config_error("gamma =\n"), "t.cfg:1: key 'gamma' has no value");
    EXPECT_NE(config_error("\n\ncolour = red\n").find("t.cfg:3: key 'colour'"), std::string::npos);
    EXPECT_NE(config_error("\n\ncolour = red\n").find("unknown key"), std::string::npos);
    EXPECT_NE(config_error("ports = two\n").find("t.cfg:1: key 'ports'"), std::string::npos);
}

TEST(Config, RejectsBadValues)
{
    for (const char *bad : {"ports = 2.5", "gamma = 1", "gamma = 0", "gamma = nan", "frequency = -1", "bits_per_port = 7",
                            "parents = 3", "population = 1", "n_keep = 0", "jobs = 0", "resume = maybe", "sweep_axis = height",
                            "mesh_side = both", "mesh_format = xml", "tx_config = zz", "seed = -1", "separation_lambda = inf",
                            "mutation_rate = 2", "generations = -1"})
        EXPECT_FALSE(config_error(std::string(bad) + "\n").empty()) << bad;
    EXPECT_TRUE(config_error("mutation_rate = auto\nseparation_lambda = 0\n").empty());
}

TEST(Config, ResolveBits)
{
    const RunConfig c = parse(small_link);
    const PlateSpec &s = c.problem().tx_spec;
    GaRng rng(7);
    EXPECT_EQ(resolve_bits("all_on", s, rng), BitVector(16, 1));
    const BitVector r = resolve_bits("random", s, rng);
    EXPECT_EQ(r.size(), 16u);
    const BitVector h = resolve_bits("f00f", s, rng);
    EXPECT_EQ(phi_to_hex(h), "f00f");
    EXPECT_THROW(resolve_bits("fff", s, rng), ConfigError);
    GaRng a(3), b(3);
    EXPECT_EQ(resolve_bits("random", s, a), resolve_bits("random", s, b));
}

// ---- serialization ----

TEST(Io, MeshRoundTrips)
{
    const RunConfig c = parse(small_link);
    BitVector bits(16, 1);
    bits[5] = bits[10] = 0;
    const TriMesh m = build_plate_mesh(c.problem().tx_spec, bits);

    std::stringstream text;
    io::write_mesh_text(text, m);
    const TriMesh t = io::read_mesh_text(text);
    const TriMesh j = io::mesh_from_json(json::parse(io::mesh_to_json(m).dump()));
    for (const TriMesh *r : {&t, &j})
    {
        ASSERT_EQ(r->num_vertices(), m.num_vertices());
        ASSERT_EQ(r->faces, m.faces);
        for (int i = 0; i < m.num_vertices(); ++i)
            EXPECT_EQ(r->vertices[i], m.vertices[i]);
    }
    std::istringstream junk("not a mesh\n");
    EXPECT_THROW(io::read_mesh_text(junk), Error);
}

TEST(Io, ImpedanceRoundTripsExactly)
{
    const RunConfig c = parse("ports = 1\nbits_per_port = 2\n");
    const PlateSpec s = c.problem().tx_spec;
    const RwgBasis b = extract_rwg(build_plate_mesh(s, BitVector(s.bit_length(), 1)));
    const ImpedanceOperator op = assemble_impedance(b, f0);
    const ImpedanceOperator back = io::impedance_from_json(json::parse(io::impedance_to_json(op).dump()));
    EXPECT_EQ(back.Z, op.Z);
    EXPECT_EQ(back.frequency, op.frequency);
    EXPECT_THROW(io::impedance_from_json(json{{"Z", 1}}), InputError);
}

TEST(Io, ReportRoundTripsExactly)
{
    DofReport r;
    r.dof_H = 3;
    r.dof_G_effective = 5;
    r.rank_H = 4;
    r.rank_G = 8;
    r.port_mode_upper = 4;
    r.lower_bound = 1;
    r.gamma_matrix_rank = 6;
    r.L_T = r.L_R = 4;
    r.n_T = r.n_R = 20;
    r.gamma = 0.5;
    r.fitness = -0.123456789012345678;
    r.sigma_H = {1.0, 0.9, 1.0 / 3.0, 1e-20};
    r.sigma_G = {2.0, std::sqrt(2.0)};
    const DofReport b = io::report_from_json(json::parse(io::report_to_json(r).dump()));
    EXPECT_EQ(b.dof_H, r.dof_H);
    EXPECT_EQ(b.lower_bound, r.lower_bound);
    EXPECT_EQ(b.fitness, r.fitness);
    EXPECT_EQ(b.sigma_H, r.sigma_H);
    EXPECT_EQ(b.sigma_G, r.sigma_G);
    EXPECT_THROW(io::report_from_json(json::object()), InputError);
}

TEST(Io, ModalSummaryRoundTrips)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    ModalSummary s;
    const int n = 5, L = 2, rows = 12;
    s.significances.resize(n);
    for (int i = 0; i < n; ++i)
        s.significances(i) = modal_significance(g(rng) * 3);
    s.excitation = MatrixXc::NullaryExpr(n, L, [&] { return cplx(g(rng), g(rng)); });
    s.aperture_patterns = MatrixXc::NullaryExpr(rows, n, [&] { return cplx(g(rng), g(rng)); });
    std::stringstream mc, pc;
    io::export_modal_summary(mc, pc, s);
    const ModalSummary b = io::import_modal_summary(mc, pc);
    EXPECT_LT((b.significances - s.significances).norm(), 1e-14);
    EXPECT_EQ(b.excitation, s.excitation);
    EXPECT_EQ(b.aperture_patterns, s.aperture_patterns);

    std::istringstream bad_modes("mode,eigenvalue,re\n0,1,2\n"), empty_p("");
    EXPECT_THROW(io::import_modal_summary(bad_modes, empty_p), InputError);
}

TEST(Plot, CsvCarriesThePlottedNumbers)
{
    plot::Figure f;
    f.title = "t <&>";
    f.log_y = true;
    f.series.push_back({"a", {1, 2, 3}, {1.0, 0.1, 1.0 / 3.0}});
    f.series.push_back({"b", {1, 2}, {5e-7, 2.5}, plot::Style::markers});
    f.hlines.push_back({"cut", 0.25});
    std::istringstream in(f.csv());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "series,x,y");
    std::vector<std::tuple<std::string, std::string, double>> got;
    while (std::getline(in, line))
    {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        got.emplace_back(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1), std::stod(line.substr(c2 + 1)));
    }
    ASSERT_EQ(got.size(), 6u);
    EXPECT_EQ(std::get<2>(got[2]), 1.0 / 3.0);
    EXPECT_EQ(std::get<0>(got[4]), "b");
    EXPECT_EQ(std::get<2>(got[3]), 5e-7);
    EXPECT_EQ(std::get<1>(got[5]), "");
    EXPECT_EQ(std::get<2>(got[5]), 0.25);

    const std::string svg = f.svg();
    EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("<&>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
}

// ---- command line ----

TEST(Cli, ModesAtDefaults)
{
    TempDir t;
    const auto out = t.path / "m";
    const CliResult r = invoke({"modes", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::string header;
    const auto rows = read_csv(out / "modes.csv", &header);
    EXPECT_EQ(header.rfind("mode,eigenvalue,modal_significance,abs_V_port0", 0), 0u);
    ASSERT_EQ(rows.size(), 20u);
    double mx = 0;
    for (const auto &row : rows)
        mx = std::max(mx, std::stod(row[2]));
    EXPECT_GT(std::stod(rows.front()[2]), 0.9 * mx);
    EXPECT_LT(std::stod(rows.back()[2]), 0.5 * mx);
    for (const char *f : {"modal_significance.svg", "modal_significance.csv", "impedance.json", "metadata.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;

    const CliResult one = invoke({"modes", "--out", (t.path / "one").string(), "--n-keep", "1"});
    ASSERT_EQ(one.code, 0) << one.err;
    EXPECT_EQ(read_csv(t.path / "one" / "modes.csv").size(), 1u);
}

TEST(Cli, ConfigErrorsExitTwoWithoutOutput)
{
    TempDir t;
    for (const char *text : {"ports 3\n", "colour = red\n", "gamma = 1.5\n", "ports = 2\nports = 2\n"})
    {
        const fs::path out = t.path / "never";
        const auto cfg = write_config(t.path, "bad.cfg", text);
        const CliResult r = invoke({"dof", "--config", cfg.string(), "--out", out.string()});
        EXPECT_EQ(r.code, 2) << text;
        EXPECT_NE(r.err.find("bad.cfg"), std::string::npos) << r.err;
        EXPECT_FALSE(fs::exists(out));
    }
    EXPECT_EQ(invoke({"dof", "--config", (t.path / "missing.cfg").string()}).code, 2);
    EXPECT_EQ(invoke({"dof", "--gamma", "0"}).code, 2);
    EXPECT_EQ(invoke({"dof", "--bogus"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
}

TEST(Cli, ZeroSeparationIsAGeometryError)
{
    TempDir t;
    const auto cfg = write_config(t.path, "z.cfg", "ports = 2\nbits_per_port = 8\nseparation_lambda = 0\n");
    const CliResult r = invoke({"dof", "--config", cfg.string(), "--out", (t.path / "o").string()});
    EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, DofReport)
{
    TempDir t;
    const auto cfg = write_config(t.path, "l.cfg", small_link);
    const CliResult r = invoke({"dof", "--config", cfg.string(), "--out", (t.path / "a").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = io::read_json_file(t.path / "a" / "dof_report.json");
    const DofReport rep = io::report_from_json(j);
    EXPECT_EQ(rep.dof_H, threshold_count(std::span<const double>(rep.sigma_H), 0.5));
    EXPECT_GE(rep.dof_H, 1);
    EXPECT_LE(rep.dof_H, rep.dof_G_effective);
    EXPECT_EQ(j.at("phi").get<std::string>(), "ffffffff");
    EXPECT_EQ(read_csv(t.path / "a" / "spectrum_H.csv").size(), rep.sigma_H.size());
    EXPECT_TRUE(fs::exists(t.path / "a" / "spectrum.svg"));

    const CliResult hi = invoke({"dof", "--config", cfg.string(), "--out", (t.path / "b").string(), "--gamma", "0.99"});
    ASSERT_EQ(hi.code, 0) << hi.err;
    const DofReport strict = io::report_from_json(io::read_json_file(t.path / "b" / "dof_report.json"));
    EXPECT_LE(strict.dof_H, rep.dof_H);
    EXPECT_EQ(strict.sigma_H, rep.sigma_H);
}

TEST(Cli, OptimizeIsDeterministicAndResumable)
{
    TempDir t;
    const std::string base = std::string(small_link) + "population = 6\nparents = 4\nrandom_baseline = 5\n";
    const auto two = write_config(t.path, "two.cfg", base + "generations = 2\n");
    const auto one = write_config(t.path, "one.cfg", base + "generations = 1\n");
    const auto resume = write_config(t.path, "resume.cfg", base + "generations = 2\nresume = true\n");

    const auto a = t.path / "a", b = t.path / "b", c = t.path / "c";
    ASSERT_EQ(invoke({"optimize", "--config", two.string(), "--out", a.string(), "--seed", "3"}).code, 0);
    ASSERT_EQ(invoke({"optimize", "--config", two.string(), "--out", b.string(), "--seed", "3", "--jobs", "2"}).code, 0);
    for (const char *f : {"ga_log.jsonl", "best.json", "convergence.csv", "spectrum_compare.csv", "ga_checkpoint.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

    ASSERT_EQ(invoke({"optimize", "--config", one.string(), "--out", c.string(), "--seed", "3"}).code, 0);
    const CliResult r = invoke({"optimize", "--config", resume.string(), "--out", c.string(), "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("resuming from generation 1"), std::string::npos);
    EXPECT_EQ(slurp(c / "ga_log.jsonl"), slurp(a / "ga_log.jsonl"));

    std::istringstream log(slurp(a / "ga_log.jsonl"));
    std::string line;
    int lines = 0;
    while (std::getline(log, line))
        EXPECT_EQ(json::parse(line).at("generation").get<int>(), lines++);
    EXPECT_EQ(lines, 3);

    const auto conv = read_csv(a / "convergence.csv");
    ASSERT_EQ(conv.size(), 3u);
    for (std::size_t k = 1; k < conv.size(); ++k)
        EXPECT_LE(std::stod(conv[k][2]), std::stod(conv[k - 1][2]));

    const json best = io::read_json_file(a / "best.json");
    EXPECT_EQ(best.at("generations").get<int>(), 2);
    EXPECT_EQ(best.at("best_phi").get<std::string>().size(), 8u);
}

TEST(Cli, SweepSinglePointMatchesDof)
{
    TempDir t;
    const auto cfg = write_config(t.path, "s.cfg",
                                  std::string(small_link) + "sweep_axis = separation\nsweep_values = 1\nsweep_optimize = false\nsweep_random = 2\n");
    ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (t.path / "s").string()}).code, 0);
    ASSERT_EQ(invoke({"dof", "--config", cfg.string(), "--out", (t.path / "d").string()}).code, 0);
    std::string header;
    const auto rows = read_csv(t.path / "s" / "sweep.csv", &header);
    EXPECT_EQ(header, "axis,value,dof_G_effective,dof_H_config,dof_H_random_mean,dof_H_optimized,port_mode_upper,lower_bound");
    ASSERT_EQ(rows.size(), 1u);
    const DofReport rep = io::report_from_json(io::read_json_file(t.path / "d" / "dof_report.json"));
    EXPECT_EQ(std::stoi(rows[0][2]), rep.dof_G_effective);
    EXPECT_EQ(std::stoi(rows[0][3]), rep.dof_H);
    EXPECT_TRUE(fs::exists(t.path / "s" / "sweep_plot.svg"));
    EXPECT_TRUE(fs::exists(t.path / "s" / "sweep_plot.csv"));
}

TEST(Cli, SweepRowsRespectChannelBound)
{
    TempDir t;
    const auto cfg = write_config(t.path, "s.cfg",
                                  std::string(small_link) + "sweep_axis = gamma\nsweep_values = 0.2, 0.5, 0.9\nsweep_optimize = false\nsweep_random = 2\n");
    ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (t.path / "s").string()}).code, 0);
    const auto rows = read_csv(t.path / "s" / "sweep.csv");
    ASSERT_EQ(rows.size(), 3u);
    for (const auto &row : rows)
        EXPECT_LE(std::stoi(row[3]), std::stoi(row[2]));
    for (std::size_t k = 1; k < rows.size(); ++k)
        EXPECT_LE(std::stoi(rows[k][3]), std::stoi(rows[k - 1][3]));

    const auto empty = write_config(t.path, "e.cfg", std::string(small_link) + "sweep_values = ,\n");
    EXPECT_EQ(invoke({"sweep", "--config", empty.string(), "--out", (t.path / "e").string()}).code, 2);
}

TEST(Cli, ExportMesh)
{
    TempDir t;
    const auto txt = write_config(t.path, "t.cfg", std::string(small_link) + "tx_config = f0ff\n");
    const auto js = write_config(t.path, "j.cfg", std::string(small_link) + "tx_config = f0ff\nmesh_format = json\n");
    ASSERT_EQ(invoke({"export-mesh", "--config", txt.string(), "--out", (t.path / "t").string()}).code, 0);
    ASSERT_EQ(invoke({"export-mesh", "--config", js.string(), "--out", (t.path / "j").string()}).code, 0);
    std::ifstream in(t.path / "t" / "mesh.txt");
    const TriMesh a = io::read_mesh_text(in);
    const TriMesh b = io::mesh_from_json(io::read_json_file(t.path / "j" / "mesh.json"));
    EXPECT_EQ(a.faces, b.faces);
    EXPECT_GT(a.num_faces(), 0);
    EXPECT_LT(a.num_faces(), 2 * 16);
}

TEST(Cli, BinaryExitCodes)
{
    TempDir t;
    const std::string bin = CMAMIMO_CLI_PATH;
    auto status = [&](const std::string &args) {
        const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    const auto bad = write_config(t.path, "bad.cfg", "ports = 2\nports = 3\n");
    const auto zero = write_config(t.path, "zero.cfg", "ports = 2\nseparation_lambda = 0\n");
    const auto ok = write_config(t.path, "ok.cfg", small_link);
    EXPECT_EQ(status("--help"), 0);
    EXPECT_EQ(status("dof --config " + bad.string()), 2);
    EXPECT_EQ(status("dof --config " + zero.string() + " --out " + (t.path / "z").string()), 3);
    EXPECT_EQ(status("export-mesh --config " + ok.string() + " --out " + (t.path / "m").string()), 0);
    EXPECT_TRUE(fs::exists(t.path / "m" / "mesh.txt"));
}
