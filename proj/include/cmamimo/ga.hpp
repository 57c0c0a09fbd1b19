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

#ifndef CMAMIMO_GA_HPP
#define CMAMIMO_GA_HPP

#include "log.hpp"
#include "pipeline.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace cmamimo
{
    // Transmit/receive plate pair and operating point searched by the genetic algorithm.
    // The chromosome is phi = [phi_T; phi_R]; spine bits are present but always held at 1.
    struct PixelProblem
    {
        PlateSpec tx_spec, rx_spec;
        double frequency = 27e9;
        double separation = 0.0; // z offset of the receive plate [m]
        double gamma = 0.5;
        int n_keep = 20;

        int tx_bits() const { return tx_spec.bit_length(); }
        int rx_bits() const { return rx_spec.bit_length(); }
        int bit_length() const { return tx_bits() + rx_bits(); }

        void validate() const
        {
            tx_spec.validate();
            rx_spec.validate();
            if (!(frequency > 0.0))
                throw InputError("frequency must be positive");
            if (!(gamma > 0.0 && gamma < 1.0))
                throw InputError("gamma must lie in (0, 1)");
            if (n_keep < 1)
                throw InputError("n_keep must be at least 1");
            if (min_centroid_distance(build_aperture_mesh(tx_spec), build_aperture_mesh(rx_spec)) <= 0.0)
                throw GeometryError("transmit and receive apertures overlap");
        }

        // Two identical spine-fed plates facing each other along z.
        static PixelProblem facing_plates(int ports, double pixel_size, double separation, double frequency = 27e9)
        {
            if (!(separation > 0.0))
                throw GeometryError("plate separation must be positive");
            PixelProblem p;
            p.tx_spec = PlateSpec::reference(ports, pixel_size);
            p.rx_spec = PlateSpec::reference(ports, pixel_size, Vec3(0.0, 0.0, separation));
            p.frequency = frequency;
            p.separation = separation;
            return p;
        }

        // Desk-scale benchmark: 4 ports per side, 0.36-wavelength pixels, one wavelength apart, 27 GHz.
        static PixelProblem desk_reference(int ports = 4)
        {
            const double lam = wavelength(27e9);
            return facing_plates(ports, 0.36 * lam, 1.0 * lam, 27e9);
        }
    };

    inline BitVector enforce_spine(const PixelProblem &p, BitVector phi)
    {
        if (static_cast<int>(phi.size()) != p.bit_length())
            throw InputError("configuration length " + std::to_string(phi.size()) + " does not match bit length " +
                             std::to_string(p.bit_length()));
        for (int i = 0; i < p.bit_length(); ++i)
        {
            const PlateSpec &s = i < p.tx_bits() ? p.tx_spec : p.rx_spec;
            const int j = i < p.tx_bits() ? i : i - p.tx_bits();
            if (s.is_spine(j / s.pixel_cols, j % s.pixel_cols))
                phi[static_cast<std::size_t>(i)] = 1;
            else
                phi[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i)] ? 1 : 0;
        }
        return phi;
    }

    // Bits packed four to a hex digit, first bit in the high nibble bit.
    inline std::string phi_to_hex(const BitVector &phi)
    {
        static const char *digits = "0123456789abcdef";
        std::string out;
        for (std::size_t i = 0; i < phi.size(); i += 4)
        {
            int v = 0;
            for (std::size_t k = 0; k < 4; ++k)
                v = (v << 1) | ((i + k < phi.size() && phi[i + k]) ? 1 : 0);
            out += digits[v];
        }
        return out;
    }

    inline BitVector phi_from_hex(const std::string &hex, int bits)
    {
        if (bits < 0 || hex.size() != static_cast<std::size_t>((bits + 3) / 4))
            throw InputError("hex configuration has the wrong length");
        BitVector phi(static_cast<std::size_t>(bits));
        for (std::size_t d = 0; d < hex.size(); ++d)
        {
            const char c = hex[d];
            int v;
            if (c >= '0' && c <= '9')
                v = c - '0';
            else if (c >= 'a' && c <= 'f')
                v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F')
                v = c - 'A' + 10;
            else
                throw InputError(std::string("invalid hex digit '") + c + "'");
            for (int k = 0; k < 4; ++k)
            {
                const std::size_t i = 4 * d + static_cast<std::size_t>(k);
                if (i < phi.size())
                    phi[i] = static_cast<std::uint8_t>((v >> (3 - k)) & 1);
            }
        }
        return phi;
    }

    inline constexpr double degenerate_fitness = -std::numeric_limits<double>::infinity();

    struct Evaluation
    {
        bool valid = false;
        double fitness = degenerate_fitness;
        DofReport report;
        std::string reason; // why an invalid configuration was rejected
    };

    inline double ga_fitness(const EquivalentChannel &ch, int L_m)
    {
        return singular_spread_fitness(to_std(ch.singulars), L_m);
    }

    // Memoised fitness of a transceiver configuration. Each half is cached separately, so a new phi that
    // reuses a known transmit or receive plate skips that side's impedance assembly. Thread safe.
    class Evaluator
    {
    public:
        explicit Evaluator(PixelProblem problem) : problem_(std::move(problem))
        {
            problem_.validate();
            setup_ = LinkSetup::create(problem_.tx_spec, problem_.rx_spec, problem_.frequency, problem_.gamma, problem_.n_keep);
        }

        const PixelProblem &problem() const { return problem_; }
        const LinkSetup &setup() const { return setup_; }

        // Number of antenna analyses (mesh, impedance, modes) actually performed.
        long assemblies() const { return assemblies_.load(); }
        long cache_hits() const { return hits_.load(); }

        Evaluation evaluate(const BitVector &phi_in)
        {
            const BitVector phi = enforce_spine(problem_, phi_in);
            {
                std::lock_guard lock(mtx_);
                auto it = results_.find(phi);
                if (it != results_.end())
                {
                    ++hits_;
                    return it->second;
                }
            }
            Evaluation e = compute(phi);
            std::lock_guard lock(mtx_);
            return results_.emplace(phi, std::move(e)).first->second;
        }

        std::vector<Evaluation> evaluate_batch(const std::vector<BitVector> &phis, int jobs)
        {
            std::vector<Evaluation> out(phis.size());
            const int n = static_cast<int>(phis.size());
            jobs = std::max(1, std::min(jobs, n));
            if (jobs == 1)
            {
                for (int i = 0; i < n; ++i)
                    out[static_cast<std::size_t>(i)] = evaluate(phis[static_cast<std::size_t>(i)]);
                return out;
            }
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            std::mutex err_mtx;
            std::exception_ptr err;
            for (int t = 0; t < jobs; ++t)
                pool.emplace_back([&] {
                    for (int i = next++; i < n; i = next++)
                    {
                        try
                        {
                            out[static_cast<std::size_t>(i)] = evaluate(phis[static_cast<std::size_t>(i)]);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(err_mtx);
                            if (!err)
                                err = std::current_exception();
                        }
                    }
                });
            for (auto &th : pool)
                th.join();
            if (err)
                std::rethrow_exception(err);
            return out;
        }

    private:
        using Side = std::shared_ptr<const ModalSummary>;

        struct SideResult
        {
            Side model;
            std::string error;
        };

        SideResult side(const PlateSpec &spec, const BitVector &bits, std::map<BitVector, SideResult> &cache)
        {
            {
                std::lock_guard lock(mtx_);
                auto it = cache.find(bits);
                if (it != cache.end())
                    return it->second;
            }
            SideResult r;
            ++assemblies_;
            try
            {
                r.model = std::make_shared<const ModalSummary>(
                    ModalSummary::of(analyze_antenna(spec, bits, problem_.frequency, problem_.n_keep)));
            }
            catch (const NumericalError &e)
            {
                r.error = e.what();
            }
            catch (const GeometryError &e)
            {
                r.error = e.what();
            }
            std::lock_guard lock(mtx_);
            return cache.emplace(bits, r).first->second;
        }

        Evaluation compute(const BitVector &phi)
        {
            const BitVector bt(phi.begin(), phi.begin() + problem_.tx_bits());
            const BitVector br(phi.begin() + problem_.tx_bits(), phi.end());
            Evaluation e;
            const SideResult t = side(problem_.tx_spec, bt, tx_cache_);
            const SideResult r = side(problem_.rx_spec, br, rx_cache_);
            if (!t.model || !r.model)
                e.reason = !t.model ? "transmit: " + t.error : "receive: " + r.error;
            else
            {
                try
                {
                    const LinkResult lr = evaluate_link(setup_, *t.model, *r.model, false);
                    e.report = lr.report;
                    e.fitness = lr.report.fitness;
                    e.valid = true;
                }
                catch (const NumericalError &ex)
                {
                    e.reason = ex.what();
                }
            }
            if (!e.valid)
                log::warn("degenerate configuration " + phi_to_hex(phi) + ": " + e.reason);
            return e;
        }

        PixelProblem problem_;
        LinkSetup setup_;
        std::mutex mtx_;
        std::map<BitVector, Evaluation> results_;
        std::map<BitVector, SideResult> tx_cache_, rx_cache_;
        std::atomic<long> assemblies_{0};
        std::atomic<long> hits_{0};
    };

    // Evolution RNG. Fixed arithmetic on top of mt19937_64 so runs replay identically on every platform.
    class GaRng
    {
    public:
        explicit GaRng(std::uint64_t seed = 1) : eng_(seed) {}

        std::uint64_t next() { return eng_(); }
        std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
        double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
        bool bernoulli(double p) { return uniform() < p; }

        std::string state() const
        {
            std::ostringstream os;
            os << eng_;
            return os.str();
        }

        void set_state(const std::string &s)
        {
            std::istringstream is(s);
            is >> eng_;
            if (!is)
                throw InputError("corrupt random generator state");
        }

    private:
        std::mt19937_64 eng_;
    };

    struct Individual
    {
        BitVector phi;
        Evaluation eval;
        double fitness() const { return eval.fitness; }
    };

    struct GaParams
    {
        int K = 40;                  // generations
        int I = 20;                  // population size
        int I_p = 20;                // parents per generation (even)
        double mutation_rate = -1.0; // per bit; negative means 1 / bit_length
        std::uint64_t seed = 1;
        int jobs = 1;

        void validate() const
        {
            if (I < 2)
                throw InputError("population size must be at least 2");
            if (I_p < 2 || I_p % 2 != 0)
                throw InputError("parent count must be even and at least 2");
            if (K < 0)
                throw InputError("generation count must be non-negative");
            if (mutation_rate > 1.0)
                throw InputError("mutation rate must not exceed 1");
        }
    };

    struct GaRun
    {
        GaParams params;
        double mutation_rate = 0.0; // resolved
        std::vector<Individual> population;
        int generation = 0;
        std::vector<double> best_history;
        std::vector<int> best_dof_history;
        GaRng rng;

        // Population is kept sorted best first.
        const Individual &best() const { return population.front(); }
    };

    // Tournament of size 2 with replacement; ties go to the first contestant.
    inline std::vector<BitVector> select_parents(const std::vector<Individual> &population, int I_p, GaRng &rng)
    {
        if (population.empty())
            throw InputError("cannot select parents from an empty population");
        std::vector<BitVector> out;
        out.reserve(static_cast<std::size_t>(I_p));
        for (int i = 0; i < I_p; ++i)
        {
            const Individual &a = population[rng.index(population.size())];
            const Individual &b = population[rng.index(population.size())];
            out.push_back(b.fitness() > a.fitness() ? b.phi : a.phi);
        }
        return out;
    }

    // Uniform crossover of consecutive pairs, then independent bit flips.
    inline std::vector<BitVector> crossover_mutate(const std::vector<BitVector> &parents, double mutation_rate, GaRng &rng)
    {
        if (parents.size() % 2 != 0)
            throw InputError("crossover needs an even number of parents");
        std::vector<BitVector> children;
        children.reserve(parents.size());
        for (std::size_t p = 0; p < parents.size(); p += 2)
        {
            BitVector c1 = parents[p], c2 = parents[p + 1];
            if (c1.size() != c2.size())
                throw InputError("parents differ in length");
            for (std::size_t i = 0; i < c1.size(); ++i)
                if (rng.bernoulli(0.5))
                    std::swap(c1[i], c2[i]);
            for (BitVector *c : {&c1, &c2})
                for (auto &bit : *c)
                    if (rng.bernoulli(mutation_rate))
                        bit ^= 1;
            children.push_back(std::move(c1));
            children.push_back(std::move(c2));
        }
        return children;
    }

    // Keeps the I fittest, stable with respect to the incoming order. Degenerate individuals sort last.
    inline void truncate_population(std::vector<Individual> &pool, int I)
    {
        std::stable_sort(pool.begin(), pool.end(), [](const Individual &a, const Individual &b) { return a.fitness() > b.fitness(); });
        if (static_cast<int>(pool.size()) > I)
            pool.resize(static_cast<std::size_t>(I));
    }

    namespace detail
    {
        inline std::vector<Individual> evaluate_all(Evaluator &ev, std::vector<BitVector> phis, int jobs)
        {
            for (auto &p : phis)
                p = enforce_spine(ev.problem(), std::move(p));
            auto evals = ev.evaluate_batch(phis, jobs);
            std::vector<Individual> out(phis.size());
            for (std::size_t i = 0; i < phis.size(); ++i)
                out[i] = {std::move(phis[i]), std::move(evals[i])};
            return out;
        }

        inline void record_best(GaRun &run)
        {
            run.best_history.push_back(run.best().fitness());
            run.best_dof_history.push_back(run.best().eval.valid ? run.best().eval.report.dof_H : 0);
        }
    }

    inline GaRun ga_initialize(Evaluator &ev, const GaParams &params)
    {
        params.validate();
        GaRun run;
        run.params = params;
        const int n = ev.problem().bit_length();
        run.mutation_rate = params.mutation_rate < 0.0 ? 1.0 / n : params.mutation_rate;
        run.rng = GaRng(params.seed);
        std::vector<BitVector> phis(static_cast<std::size_t>(params.I), BitVector(static_cast<std::size_t>(n)));
        for (auto &phi : phis)
            for (auto &bit : phi)
                bit = static_cast<std::uint8_t>(run.rng.next() >> 63);
        run.population = detail::evaluate_all(ev, std::move(phis), params.jobs);
        truncate_population(run.population, params.I);
        detail::record_best(run);
        return run;
    }

    // One generation: select, breed, evaluate, merge population and children, keep the top I.
    inline void ga_step(Evaluator &ev, GaRun &run)
    {
        auto parents = select_parents(run.population, run.params.I_p, run.rng);
        auto children = detail::evaluate_all(ev, crossover_mutate(parents, run.mutation_rate, run.rng), run.params.jobs);
        for (auto &c : children)
            run.population.push_back(std::move(c));
        truncate_population(run.population, run.params.I);
        ++run.generation;
        detail::record_best(run);
    }

    using GaObserver = std::function<void(const GaRun &)>;

    // Runs generations until run.generation == K, calling the observer after each one.
    inline void ga_continue(Evaluator &ev, GaRun &run, const GaObserver &observer = {})
    {
        while (run.generation < run.params.K)
        {
            ga_step(ev, run);
            if (observer)
                observer(run);
        }
    }

    inline GaRun run_ga(Evaluator &ev, const GaParams &params, const GaObserver &observer = {})
    {
        GaRun run = ga_initialize(ev, params);
        if (observer)
            observer(run);
        ga_continue(ev, run, observer);
        return run;
    }

    inline nlohmann::json json_number(double v)
    {
        if (std::isfinite(v))
            return v;
        return nullptr;
    }

    // One line of the generation log.
    inline nlohmann::json generation_record(const GaRun &run)
    {
        double sum = 0.0;
        int valid = 0;
        for (const auto &ind : run.population)
            if (ind.eval.valid)
            {
                sum += ind.fitness();
                ++valid;
            }
        nlohmann::json j;
        j["generation"] = run.generation;
        j["best_fitness"] = json_number(run.best().fitness());
        j["mean_fitness"] = valid ? json_number(sum / valid) : nlohmann::json(nullptr);
        j["best_dof_H"] = run.best().eval.valid ? run.best().eval.report.dof_H : 0;
        j["valid_individuals"] = valid;
        j["best_phi"] = phi_to_hex(run.best().phi);
        return j;
    }

    inline nlohmann::json checkpoint_json(const GaRun &run)
    {
        nlohmann::json j;
        j["format"] = "cmamimo-ga-checkpoint";
        j["version"] = 1;
        j["generation"] = run.generation;
        j["K"] = run.params.K;
        j["I"] = run.params.I;
        j["I_p"] = run.params.I_p;
        j["mutation_rate"] = run.mutation_rate;
        j["seed"] = run.params.seed;
        j["rng_state"] = run.rng.state();
        nlohmann::json hist = nlohmann::json::array();
        for (double b : run.best_history)
            hist.push_back(json_number(b));
        j["best_history"] = hist;
        j["best_dof_history"] = run.best_dof_history;
        nlohmann::json pop = nlohmann::json::array();
        for (const auto &ind : run.population)
            pop.push_back(phi_to_hex(ind.phi));
        j["population"] = pop;
        return j;
    }

    // Rebuilds a run from a checkpoint; population fitness is recomputed (evaluation is deterministic).
    // K may be raised to extend a finished run.
    inline GaRun restore_checkpoint(Evaluator &ev, const nlohmann::json &j, int jobs, int K_override = -1)
    {
        try
        {
            if (j.at("format").get<std::string>() != "cmamimo-ga-checkpoint")
                throw InputError("not a GA checkpoint");
            GaRun run;
            run.params.K = K_override >= 0 ? K_override : j.at("K").get<int>();
            run.params.I = j.at("I").get<int>();
            run.params.I_p = j.at("I_p").get<int>();
            run.params.seed = j.at("seed").get<std::uint64_t>();
            run.params.jobs = jobs;
            run.mutation_rate = j.at("mutation_rate").get<double>();
            run.params.mutation_rate = run.mutation_rate;
            run.params.validate();
            run.generation = j.at("generation").get<int>();
            run.rng.set_state(j.at("rng_state").get<std::string>());
            for (const auto &b : j.at("best_history"))
                run.best_history.push_back(b.is_null() ? degenerate_fitness : b.get<double>());
            run.best_dof_history = j.at("best_dof_history").get<std::vector<int>>();
            std::vector<BitVector> phis;
            for (const auto &h : j.at("population"))
                phis.push_back(phi_from_hex(h.get<std::string>(), ev.problem().bit_length()));
            if (static_cast<int>(phis.size()) != run.params.I)
                throw InputError("checkpoint population size does not match I");
            run.population = detail::evaluate_all(ev, std::move(phis), jobs);
            // Already in truncation order; a stable sort keeps it.
            truncate_population(run.population, run.params.I);
            return run;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw InputError(std::string("malformed GA checkpoint: ") + e.what());
        }
    }
}

#endif
