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

#ifndef CMAMIMO_CONFIG_HPP
#define CMAMIMO_CONFIG_HPP

#include "ga.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace cmamimo
{
    // Flat "key = value" text. '#' starts a comment; blank lines are ignored; each key may appear once.
    struct KeyValueFile
    {
        struct Entry
        {
            std::string value;
            int line = 0;
        };
        std::map<std::string, Entry> entries;

        static std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        static KeyValueFile parse(std::istream &is, const std::string &source = "config")
        {
            KeyValueFile kv;
            std::string raw;
            int line = 0;
            while (std::getline(is, raw))
            {
                ++line;
                const auto hash = raw.find('#');
                const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
                if (text.empty())
                    continue;
                const auto eq = text.find('=');
                if (eq == std::string::npos)
                    throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
                const std::string key = trim(text.substr(0, eq));
                const std::string value = trim(text.substr(eq + 1));
                if (key.empty())
                    throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
                if (value.empty())
                    throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key + "' has no value");
                if (kv.entries.count(key))
                    throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "' (first set on line " +
                                      std::to_string(kv.entries[key].line) + ")");
                kv.entries[key] = {value, line};
            }
            return kv;
        }

        static KeyValueFile load(const std::string &path)
        {
            std::ifstream in(path);
            if (!in)
                throw ConfigError("cannot open config file '" + path + "'");
            return parse(in, path);
        }
    };

    enum class SweepAxis
    {
        ports,
        separation,
        gamma
    };

    struct RunConfig
    {
        // Geometry and operating point.
        double frequency = 27e9;
        int ports = 4;             // L, both sides
        int bits_per_port = 8;     // N_L; two pixel rows per port, so pixel_cols = N_L / 2
        double pixel_size_lambda = 0.24;
        double separation_lambda = 1.0;
        double gamma = 0.5;
        int n_keep = 20;
        std::string tx_config = "all_on"; // all_on, random, or hex bits
        std::string rx_config = "all_on";

        // Genetic algorithm.
        int generations = 40;
        int population = 20;
        int parents = 20;
        double mutation_rate = -1.0; // negative: 1 / bit_length
        int random_baseline = 50;    // random configurations compared against the optimum
        bool resume = false;

        // Sweep.
        SweepAxis sweep_axis = SweepAxis::ports;
        std::vector<double> sweep_values{3, 4, 5, 6, 7};
        int sweep_random = 10; // random configurations averaged per point
        bool sweep_optimize = true;

        // Mesh export.
        std::string mesh_side = "tx";
        std::string mesh_format = "text";

        // Run control; command-line flags override these.
        std::uint64_t seed = 1;
        int jobs = 1;
        std::string out = "out";

        double lambda() const { return wavelength(frequency); }

        PixelProblem problem() const { return problem_for(ports, separation_lambda); }

        PixelProblem problem_for(int L, double sep_lambda) const
        {
            const double lam = lambda();
            const double px = pixel_size_lambda * lam;
            PixelProblem p;
            p.tx_spec = PlateSpec::feed_spine_plate(px * bits_per_port / 2, 2 * L * px, L, bits_per_port / 2);
            p.rx_spec = PlateSpec::feed_spine_plate(px * bits_per_port / 2, 2 * L * px, L, bits_per_port / 2, Vec3(0.0, 0.0, sep_lambda * lam));
            p.frequency = frequency;
            p.separation = sep_lambda * lam;
            p.gamma = gamma;
            p.n_keep = n_keep;
            return p;
        }

        GaParams ga_params() const
        {
            GaParams g;
            g.K = generations;
            g.I = population;
            g.I_p = parents;
            g.mutation_rate = mutation_rate;
            g.seed = seed;
            g.jobs = jobs;
            return g;
        }

        void validate() const
        {
            auto fail = [](const std::string &m) { throw ConfigError(m); };
            if (!(frequency > 0.0))
                fail("frequency must be positive");
            if (ports < 1)
                fail("ports must be at least 1");
            if (bits_per_port < 2 || bits_per_port % 2 != 0)
                fail("bits_per_port must be an even number >= 2");
            if (!(pixel_size_lambda > 0.0))
                fail("pixel_size_lambda must be positive");
            // Coincident plates are a geometry error raised when the link is built, not a config error.
            if (!std::isfinite(separation_lambda))
                fail("separation_lambda must be finite");
            if (!(gamma > 0.0 && gamma < 1.0))
                fail("gamma must lie in (0, 1)");
            if (n_keep < 1)
                fail("n_keep must be at least 1");
            if (generations < 0)
                fail("generations must be non-negative");
            if (population < 2)
                fail("population must be at least 2");
            if (parents < 2 || parents % 2 != 0)
                fail("parents must be even and at least 2");
            if (mutation_rate > 1.0)
                fail("mutation_rate must not exceed 1");
            if (random_baseline < 1)
                fail("random_baseline must be at least 1");
            if (sweep_values.empty())
                fail("sweep_values must list at least one value");
            if (sweep_random < 1)
                fail("sweep_random must be at least 1");
            if (jobs < 1)
                fail("jobs must be at least 1");
            if (mesh_side != "tx" && mesh_side != "rx")
                fail("mesh_side must be tx or rx");
            if (mesh_format != "text" && mesh_format != "json")
                fail("mesh_format must be text or json");
            for (const auto *c : {&tx_config, &rx_config})
                if (*c != "all_on" && *c != "random" && c->find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
                    fail("configuration must be all_on, random or a hex bit string: '" + *c + "'");
            if (out.empty())
                fail("out must not be empty");
        }

        static RunConfig from_key_values(const KeyValueFile &kv, const std::string &source = "config")
        {
            RunConfig c;
            for (const auto &[key, entry] : kv.entries)
            {
                const std::string where = source + ":" + std::to_string(entry.line) + ": key '" + key + "'";
                try
                {
                    c.set(key, entry.value);
                }
                catch (const ConfigError &e)
                {
                    throw ConfigError(where + ": " + e.what());
                }
            }
            try
            {
                c.validate();
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(source + ": " + e.what());
            }
            return c;
        }

        static RunConfig load(const std::string &path) { return from_key_values(KeyValueFile::load(path), path); }

        void set(const std::string &key, const std::string &v)
        {
            if (key == "frequency")
                frequency = to_double(v);
            else if (key == "ports")
                ports = to_int(v);
            else if (key == "bits_per_port")
                bits_per_port = to_int(v);
            else if (key == "pixel_size_lambda")
                pixel_size_lambda = to_double(v);
            else if (key == "separation_lambda")
                separation_lambda = to_double(v);
            else if (key == "gamma")
                gamma = to_double(v);
            else if (key == "n_keep")
                n_keep = to_int(v);
            else if (key == "tx_config")
                tx_config = v;
            else if (key == "rx_config")
                rx_config = v;
            else if (key == "generations")
                generations = to_int(v);
            else if (key == "population")
                population = to_int(v);
            else if (key == "parents")
                parents = to_int(v);
            else if (key == "mutation_rate")
                mutation_rate = v == "auto" ? -1.0 : to_double(v);
            else if (key == "random_baseline")
                random_baseline = to_int(v);
            else if (key == "resume")
                resume = to_bool(v);
            else if (key == "sweep_axis")
            {
                if (v == "ports")
                    sweep_axis = SweepAxis::ports;
                else if (v == "separation")
                    sweep_axis = SweepAxis::separation;
                else if (v == "gamma")
                    sweep_axis = SweepAxis::gamma;
                else
                    throw ConfigError("sweep_axis must be ports, separation or gamma");
            }
            else if (key == "sweep_values")
                sweep_values = to_list(v);
            else if (key == "sweep_random")
                sweep_random = to_int(v);
            else if (key == "sweep_optimize")
                sweep_optimize = to_bool(v);
            else if (key == "mesh_side")
                mesh_side = v;
            else if (key == "mesh_format")
                mesh_format = v;
            else if (key == "seed")
                seed = to_u64(v);
            else if (key == "jobs")
                jobs = to_int(v);
            else if (key == "out")
                out = v;
            else
                throw ConfigError("unknown key");
        }

        static double to_double(const std::string &v)
        {
            double x = 0.0;
            const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
            if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
                throw ConfigError("'" + v + "' is not a finite number");
            return x;
        }

        static int to_int(const std::string &v)
        {
            int x = 0;
            const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
            if (r.ec != std::errc() || r.ptr != v.data() + v.size())
                throw ConfigError("'" + v + "' is not an integer");
            return x;
        }

        static std::uint64_t to_u64(const std::string &v)
        {
            std::uint64_t x = 0;
            const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
            if (r.ec != std::errc() || r.ptr != v.data() + v.size())
                throw ConfigError("'" + v + "' is not an unsigned integer");
            return x;
        }

        static bool to_bool(const std::string &v)
        {
            if (v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "false" || v == "0" || v == "no")
                return false;
            throw ConfigError("'" + v + "' is not a boolean");
        }

        static std::vector<double> to_list(const std::string &v)
        {
            std::vector<double> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = KeyValueFile::trim(item);
                if (!item.empty())
                    out.push_back(to_double(item));
            }
            return out;
        }
    };

    // Resolves a tx_config / rx_config value into plate bits.
    inline BitVector resolve_bits(const std::string &spec, const PlateSpec &plate, GaRng &rng)
    {
        const int n = plate.bit_length();
        if (spec == "all_on")
            return BitVector(static_cast<std::size_t>(n), 1);
        if (spec == "random")
        {
            BitVector b(static_cast<std::size_t>(n));
            for (auto &bit : b)
                bit = static_cast<std::uint8_t>(rng.next() >> 63);
            return b;
        }
        try
        {
            return phi_from_hex(spec, n);
        }
        catch (const InputError &)
        {
            throw ConfigError("hex configuration '" + spec + "' needs " + std::to_string((n + 3) / 4) + " digits for " +
                              std::to_string(n) + " pixels");
        }
    }
}

#endif
