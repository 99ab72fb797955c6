// SPDX-License-Identifier: Apache-2.0
//
// mmpeb  C++ library for mmWave uplink/downlink position and orientation error bounds
// Copyright (C) 2026 mmpeb contributors
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
//
// Command-line front end: sector sweeps, CDF extraction, axis sweeps and the
// separability factor diagnostics, all emitted as CSV.
//
// Exit codes: 0 success, 2 configuration error, 3 all-singular sweep.

#include <CLI11.hpp>

#include "mmpeb/mmpeb.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    mmpeb::SweepConfig load_config(const std::string &path, const std::string &direction,
                                   const std::string &scenario, long long seed)
    {
        std::string text;
        if (!path.empty())
        {
            std::ifstream in(path);
            if (!in)
                throw mmpeb::ConfigError("cannot read config file: " + path);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        mmpeb::SweepConfig cfg = mmpeb::parse_config(text);
        if (!direction.empty())
        {
            if (direction == "ul")
                cfg.direction = mmpeb::LinkDirection::uplink;
            else if (direction == "dl")
                cfg.direction = mmpeb::LinkDirection::downlink;
            else
                throw mmpeb::ConfigError("unknown --direction: " + direction);
        }
        if (!scenario.empty())
        {
            if (scenario == "los")
                cfg.scenario = mmpeb::ScenarioKind::los;
            else if (scenario == "los+r")
                cfg.scenario = mmpeb::ScenarioKind::los_r;
            else if (scenario == "los+s")
                cfg.scenario = mmpeb::ScenarioKind::los_s;
            else if (scenario == "los+c")
                cfg.scenario = mmpeb::ScenarioKind::los_c;
            else if (scenario == "nlos")
                cfg.scenario = mmpeb::ScenarioKind::nlos;
            else
                throw mmpeb::ConfigError("unknown --scenario: " + scenario);
        }
        if (seed >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed);
        return cfg;
    }

    void write_or_print(const std::string &out, const std::function<void(std::ostream &)> &f)
    {
        if (out.empty() || out == "-")
            f(std::cout);
        else
            mmpeb::write_file(out, f);
    }

    int count_finite(const std::vector<mmpeb::GridRecord> &records)
    {
        int n = 0;
        for (const auto &r : records)
            if (!r.flagged)
                ++n;
        return n;
    }

    // lightweight self-checks of the numerical core
    int run_validate()
    {
        using namespace mmpeb;
        int failures = 0;
        auto check = [&](const char *name, bool ok) {
            std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
            if (!ok)
                ++failures;
        };

        const double lambda = kSpeedOfLight / 38e9;
        detail::Rng rng(7);

        // steering norms and rotation orthogonality
        {
            bool ok = true;
            for (int i = 0; i < 20; ++i)
            {
                const ArrayGeometry g = make_ura(2 + i % 7, 2 + (i / 3) % 5, lambda / 2);
                const AnglePair a{rng.uniform(0.1, kPi - 0.1), rng.uniform(-kPi, kPi)};
                ok = ok && std::abs(steering_vector(g, a, lambda).norm() - 1.0) < 1e-12;
                const Orientation o{rng.uniform(-1.0, 1.0), rng.uniform(-kPi, kPi)};
                const Eigen::Matrix3d r = rotation_matrix(o);
                ok = ok && (r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-12;
            }
            check("steering vectors unit norm, rotations orthogonal", ok);
        }

        // closed-form delay correlations against adaptive quadrature
        {
            const PulseSpec pulse = PulseSpec::ideal_sinc(125e6);
            bool ok = true;
            for (int i = 0; i < 40; ++i)
            {
                const double dt = rng.uniform(-4e-8, 4e-8);
                const std::vector<double> taus = {1e-7, 1e-7 + dt};
                const SignalCorrelations cs = correlation_matrices(pulse, taus);
                PulseSpec sampled = pulse;
                sampled.kind = PulseSpec::Kind::sampled_psd;
                const double b = pulse.support();
                for (int k = 0; k <= 64; ++k)
                    sampled.psd_samples.emplace_back(-b / 2 + k * b / 64.0, 1.0 / b);
                const SignalCorrelations qs = correlation_matrices(sampled, taus);
                ok = ok && std::abs(cs.r0(0, 1) - qs.r0(0, 1)) < 1e-8;
                ok = ok && std::abs(cs.r1(0, 1) - qs.r1(0, 1)) / (1.0 + std::abs(cs.r1(0, 1))) < 1e-6;
                ok = ok && std::abs(cs.r2(0, 1) - qs.r2(0, 1)) / std::abs(cs.r2(0, 0)) < 1e-8;
            }
            check("sinc correlation closed forms match quadrature", ok);
        }

        // closed-form LOS bounds equal the transform pipeline
        {
            SweepConfig cfg;
            cfg.grid_az = 4;
            cfg.grid_r = 3;
            const auto sc = detail::scenario_config(cfg);
            bool ok = true;
            for (int i = 0; i < 10 && ok; ++i)
            {
                const Vec3 p(rng.uniform(-20, 20), rng.uniform(8, 45), rng.uniform(-12, -8));
                const Orientation o{rng.uniform(-0.3, 0.3), rng.uniform(-0.5, 0.5)};
                const Scenario s = build_scenario(sc, p, o);
                const BoundsResult a = exact_bounds(s);
                const BoundsResult b = los_closed_form(s);
                if (a.singular || b.singular)
                    continue;
                ok = std::abs(a.speb - b.speb) / a.speb < 1e-9 &&
                     std::abs(a.soeb - b.soeb) / a.soeb < 1e-9;
            }
            check("closed-form LOS bounds match the transform pipeline", ok);
        }
        std::cout << (failures == 0 ? "validate: all checks passed\n"
                                    : "validate: FAILURES present\n");
        return failures == 0 ? 0 : 1;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"mmWave uplink/downlink position and orientation error bounds"};
    app.require_subcommand(1);

    std::string config_path, out_path, direction, scenario, field = "peb";
    long long seed = -1;
    double separation_deg = 10.0;
    std::string n_list = "16,36,64,100,144,256";

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "INI config file (empty = defaults)");
        cmd->add_option("--out", out_path, "output CSV path ('-' = stdout)");
        cmd->add_option("--seed", seed, "override the scenario seed");
        cmd->add_option("--direction", direction, "ul or dl");
        cmd->add_option("--scenario", scenario, "los, los+r, los+s, los+c or nlos");
    };

    CLI::App *grid = app.add_subcommand("grid", "per-location bounds over the sector grid");
    add_common(grid);
    CLI::App *cdfc = app.add_subcommand("cdf", "empirical CDF of a bound over the grid");
    add_common(cdfc);
    cdfc->add_option("--field", field, "peb, oeb, peb_approx or oeb_approx");
    CLI::App *sweep = app.add_subcommand("sweep", "axis sweep (sweep.axis/values from config)");
    add_common(sweep);
    CLI::App *factors = app.add_subcommand("factors", "RX/TX separability factors vs array size");
    add_common(factors);
    factors->add_option("--separation-deg", separation_deg, "angle offset between the two paths");
    factors->add_option("--n", n_list, "comma list of per-side element counts");
    CLI::App *validate = app.add_subcommand("validate", "run the built-in numerical self-checks");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (validate->parsed())
            return run_validate();

        const mmpeb::SweepConfig cfg = load_config(config_path, direction, scenario, seed);

        if (grid->parsed())
        {
            const auto records = mmpeb::grid_sweep(cfg);
            if (count_finite(records) == 0)
            {
                std::cerr << "grid: every location is singular\n";
                return 3;
            }
            write_or_print(out_path, [&](std::ostream &os) { mmpeb::emit_csv(records, cfg, os); });
        }
        else if (cdfc->parsed())
        {
            mmpeb::BoundField bf = mmpeb::BoundField::peb;
            if (field == "oeb")
                bf = mmpeb::BoundField::oeb;
            else if (field == "peb_approx")
                bf = mmpeb::BoundField::peb_approx;
            else if (field == "oeb_approx")
                bf = mmpeb::BoundField::oeb_approx;
            else if (field != "peb")
                throw mmpeb::ConfigError("unknown --field: " + field);
            const auto records = mmpeb::grid_sweep(cfg);
            if (count_finite(records) == 0)
            {
                std::cerr << "cdf: every location is singular\n";
                return 3;
            }
            const auto series = mmpeb::cdf(records, bf);
            write_or_print(out_path, [&](std::ostream &os) { mmpeb::emit_csv(series, cfg, os); });
        }
        else if (sweep->parsed())
        {
            const auto table = mmpeb::axis_sweep(cfg);
            write_or_print(out_path, [&](std::ostream &os) { mmpeb::emit_csv(table, cfg, os); });
        }
        else if (factors->parsed())
        {
            std::vector<int> sides;
            std::istringstream ss(n_list);
            std::string tok;
            while (std::getline(ss, tok, ','))
            {
                const int n_total = std::stoi(tok);
                const int side = static_cast<int>(std::lround(std::sqrt(n_total)));
                sides.push_back(side);
            }
            // base pair: central downlink beam direction, offset by the separation
            const auto dirs = mmpeb::downlink_beam_grid(cfg.sector(), cfg.n_b, cfg.layout);
            const mmpeb::AnglePair base = dirs[dirs.size() / 2];
            const auto rows = mmpeb::factor_scan(base, mmpeb::deg2rad(separation_deg), sides,
                                                 cfg.sector(), cfg.n_b, cfg.lambda(), cfg.layout);
            write_or_print(out_path, [&](std::ostream &os) {
                os << "n,rx_db,tx_raw_db,tx_norm_db\n";
                for (const auto &r : rows)
                    os << r.n << ',' << r.rx_db << ',' << r.tx_raw_db << ',' << r.tx_norm_db
                       << "\n";
            });
        }
    }
    catch (const mmpeb::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
