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

#ifndef MMPEB_HARNESS_HPP
#define MMPEB_HARNESS_HPP

#include "bounds.hpp"
#include "channel.hpp"
#include "version.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace mmpeb
{
    enum class SweepAxis
    {
        none,
        n_b,
        n_r,
        n_t,
        orientation
    };

    // All knobs of a sweep. Defaults reproduce the reference scenario:
    // f = 38 GHz, W = 125 MHz, Es/Ts = 0 dBm, N0 = -170 dBm/Hz, Ns = 16,
    // 12x12 half-wavelength URAs, 25 beams, 120 deg sector of radius 50 m at
    // BS height 10 m, 5 reflectors + 15 scatterers, 10% power threshold.
    struct SweepConfig
    {
        // system
        double f_ghz = 38.0;
        double w_mhz = 125.0;
        double es_dbm = 0.0;      // E_s / T_s with T_s = 1/W
        double n0_dbm_hz = -170.0;
        int n_s = 16;
        double noise_factor = 2.0;
        double pulse_support = 2.0; // ideal-sinc PSD support in units of W

        // arrays
        int bs_side = 12;
        int ue_side = 12;
        double spacing_lambda = 0.5;
        double height_m = 10.0;

        // beams
        int n_b = 25;
        BeamLayout layout = BeamLayout::uniform_polar;

        // sector grid
        int grid_az = 60;
        int grid_r = 50;
        double r_min = 1.0;
        double r_max = 50.0;
        double span_deg = 120.0;

        // environment
        int n_reflectors = 5;
        double reflector_half_width = 5.0;
        int n_scatterers = 15;
        double sigma_rcs = 50.0;
        double gamma_r = 0.7;
        double power_threshold = 0.1;

        // run
        LinkDirection direction = LinkDirection::downlink;
        ScenarioKind scenario = ScenarioKind::los;
        std::uint64_t seed = 1;
        double orientation_theta_deg = 0.0;
        double orientation_phi_deg = 0.0;

        // sweep
        SweepAxis axis = SweepAxis::none;
        std::vector<double> axis_values;

        // numerical flags
        double near_vertical_margin_deg = 10.0;
        double cond_threshold = 1e12;

        double lambda() const { return kSpeedOfLight / (f_ghz * 1e9); }
        double bandwidth() const { return w_mhz * 1e6; }

        SectorSpec sector() const
        {
            SectorSpec s;
            s.radius = r_max;
            s.height = height_m;
            s.span = deg2rad(span_deg);
            s.az_center = kPi / 2;
            s.r_min = r_min;
            return s;
        }

        PowerBudget budget() const
        {
            PowerBudget b;
            const double w = bandwidth();
            b.es = std::pow(10.0, es_dbm / 10.0) * 1e-3 / w; // J, symbol period 1/W
            b.n0 = std::pow(10.0, n0_dbm_hz / 10.0) * 1e-3;  // W/Hz
            b.n_s = n_s;
            b.lambda = lambda();
            b.noise_factor = noise_factor;
            return b;
        }

        PulseSpec pulse() const { return PulseSpec::ideal_sinc(bandwidth(), pulse_support); }

        Orientation orientation() const
        {
            return {deg2rad(orientation_theta_deg), deg2rad(orientation_phi_deg)};
        }
    };

    class ConfigError : public std::runtime_error
    {
    public:
        explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
    };

    namespace detail
    {
        inline double parse_number(const std::string &key, const std::string &v)
        {
            try
            {
                std::size_t used = 0;
                const double x = std::stod(v, &used);
                while (used < v.size() && std::isspace(static_cast<unsigned char>(v[used])))
                    ++used;
                if (used != v.size())
                    throw std::invalid_argument("trailing characters");
                return x;
            }
            catch (const std::exception &)
            {
                throw ConfigError("config: malformed number for key '" + key + "': '" + v + "'");
            }
        }

        inline int parse_int(const std::string &key, const std::string &v)
        {
            const double x = parse_number(key, v);
            if (x != std::floor(x))
                throw ConfigError("config: expected an integer for key '" + key + "'");
            return static_cast<int>(x);
        }

        inline std::string trim(const std::string &s)
        {
            const auto a = s.find_first_not_of(" \t\r\n");
            if (a == std::string::npos)
                return "";
            const auto b = s.find_last_not_of(" \t\r\n");
            return s.substr(a, b - a + 1);
        }
    }

    // INI-style text: [section] headers, key = value lines, '#' or ';' comments.
    // An empty file yields the full reference defaults.
    inline SweepConfig parse_config(const std::string &text)
    {
        SweepConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto cut = line.find_first_of("#;");
            if (cut != std::string::npos)
                line = line.substr(0, cut);
            line = detail::trim(line);
            if (line.empty())
                continue;
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = section + "." + detail::trim(line.substr(0, eq));
            const std::string val = detail::trim(line.substr(eq + 1));

            if (key == "system.f_ghz")
                cfg.f_ghz = detail::parse_number(key, val);
            else if (key == "system.w_mhz")
                cfg.w_mhz = detail::parse_number(key, val);
            else if (key == "system.es_dbm")
                cfg.es_dbm = detail::parse_number(key, val);
            else if (key == "system.n0_dbm_hz")
                cfg.n0_dbm_hz = detail::parse_number(key, val);
            else if (key == "system.n_s")
                cfg.n_s = detail::parse_int(key, val);
            else if (key == "system.noise_factor")
                cfg.noise_factor = detail::parse_number(key, val);
            else if (key == "system.pulse")
            {
                if (val == "sinc_fullband")
                    cfg.pulse_support = 2.0;
                else if (val == "sinc_strict")
                    cfg.pulse_support = 1.0;
                else
                    throw ConfigError("config: unknown pulse '" + val + "' for key '" + key + "'");
            }
            else if (key == "bs.n_side")
                cfg.bs_side = detail::parse_int(key, val);
            else if (key == "bs.height_m")
                cfg.height_m = detail::parse_number(key, val);
            else if (key == "ue.n_side")
                cfg.ue_side = detail::parse_int(key, val);
            else if (key == "arrays.spacing_lambda")
                cfg.spacing_lambda = detail::parse_number(key, val);
            else if (key == "beams.n_b")
                cfg.n_b = detail::parse_int(key, val);
            else if (key == "beams.layout")
            {
                if (val == "uniform")
                    cfg.layout = BeamLayout::uniform_polar;
                else if (val == "equal_spacing")
                    cfg.layout = BeamLayout::equal_spacing;
                else
                    throw ConfigError("config: unknown layout '" + val + "' for key '" + key + "'");
            }
            else if (key == "grid.n_az")
                cfg.grid_az = detail::parse_int(key, val);
            else if (key == "grid.n_r")
                cfg.grid_r = detail::parse_int(key, val);
            else if (key == "grid.r_min")
                cfg.r_min = detail::parse_number(key, val);
            else if (key == "grid.r_max")
                cfg.r_max = detail::parse_number(key, val);
            else if (key == "grid.span_deg")
                cfg.span_deg = detail::parse_number(key, val);
            else if (key == "env.n_reflectors")
                cfg.n_reflectors = detail::parse_int(key, val);
            else if (key == "env.reflector_half_width_m")
                cfg.reflector_half_width = detail::parse_number(key, val);
            else if (key == "env.n_scatterers")
                cfg.n_scatterers = detail::parse_int(key, val);
            else if (key == "env.sigma_rcs")
                cfg.sigma_rcs = detail::parse_number(key, val);
            else if (key == "env.gamma_r")
                cfg.gamma_r = detail::parse_number(key, val);
            else if (key == "env.power_threshold")
                cfg.power_threshold = detail::parse_number(key, val);
            else if (key == "run.direction")
            {
                if (val == "ul")
                    cfg.direction = LinkDirection::uplink;
                else if (val == "dl")
                    cfg.direction = LinkDirection::downlink;
                else
                    throw ConfigError("config: unknown direction '" + val + "' for key '" + key + "'");
            }
            else if (key == "run.scenario")
            {
                if (val == "los")
                    cfg.scenario = ScenarioKind::los;
                else if (val == "los+r")
                    cfg.scenario = ScenarioKind::los_r;
                else if (val == "los+s")
                    cfg.scenario = ScenarioKind::los_s;
                else if (val == "los+c")
                    cfg.scenario = ScenarioKind::los_c;
                else if (val == "nlos")
                    cfg.scenario = ScenarioKind::nlos;
                else
                    throw ConfigError("config: unknown scenario '" + val + "' for key '" + key + "'");
            }
            else if (key == "run.seed")
                cfg.seed = static_cast<std::uint64_t>(detail::parse_number(key, val));
            else if (key == "run.orientation_theta_deg")
                cfg.orientation_theta_deg = detail::parse_number(key, val);
            else if (key == "run.orientation_phi_deg")
                cfg.orientation_phi_deg = detail::parse_number(key, val);
            else if (key == "sweep.axis")
            {
                if (val == "none")
                    cfg.axis = SweepAxis::none;
                else if (val == "n_b")
                    cfg.axis = SweepAxis::n_b;
                else if (val == "n_r")
                    cfg.axis = SweepAxis::n_r;
                else if (val == "n_t")
                    cfg.axis = SweepAxis::n_t;
                else if (val == "orientation")
                    cfg.axis = SweepAxis::orientation;
                else
                    throw ConfigError("config: unknown axis '" + val + "' for key '" + key + "'");
            }
            else if (key == "sweep.values")
            {
                cfg.axis_values.clear();
                std::istringstream vs(val);
                std::string tok;
                while (std::getline(vs, tok, ','))
                    cfg.axis_values.push_back(detail::parse_number(key, detail::trim(tok)));
                std::sort(cfg.axis_values.begin(), cfg.axis_values.end());
            }
            else if (key == "flags.near_vertical_margin_deg")
                cfg.near_vertical_margin_deg = detail::parse_number(key, val);
            else if (key == "flags.cond_threshold")
                cfg.cond_threshold = detail::parse_number(key, val);
            else
                throw ConfigError("config: unknown key '" + key + "'");
        }
        if (cfg.grid_az < 1 || cfg.grid_r < 1)
            throw ConfigError("config: grid must be non-empty (grid.n_az, grid.n_r)");
        if (cfg.r_min <= 0.0 || cfg.r_max <= cfg.r_min)
            throw ConfigError("config: need 0 < grid.r_min < grid.r_max");
        return cfg;
    }

    // FNV-1a over the fields that define the run, for the CSV metadata header.
    inline std::uint64_t config_hash(const SweepConfig &c)
    {
        std::ostringstream os;
        os.precision(17);
        os << c.f_ghz << '|' << c.w_mhz << '|' << c.es_dbm << '|' << c.n0_dbm_hz << '|' << c.n_s
           << '|' << c.noise_factor << '|' << c.pulse_support << '|' << c.bs_side << '|'
           << c.ue_side << '|' << c.spacing_lambda << '|' << c.height_m << '|' << c.n_b << '|'
           << static_cast<int>(c.layout) << '|' << c.grid_az << '|' << c.grid_r << '|' << c.r_min
           << '|' << c.r_max << '|' << c.span_deg << '|' << c.n_reflectors << '|'
           << c.reflector_half_width << '|' << c.n_scatterers << '|' << c.sigma_rcs << '|'
           << c.gamma_r << '|' << c.power_threshold << '|' << static_cast<int>(c.direction) << '|'
           << static_cast<int>(c.scenario) << '|' << c.seed << '|' << c.orientation_theta_deg
           << '|' << c.orientation_phi_deg << '|' << static_cast<int>(c.axis) << '|'
           << c.near_vertical_margin_deg << '|' << c.cond_threshold;
        for (double v : c.axis_values)
            os << '|' << v;
        std::uint64_t h = 1469598103934665603ull;
        for (char ch : os.str())
        {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        return h;
    }

    struct GridRecord
    {
        Vec3 position{0, 0, 0};
        int n_paths = 0;
        double snr_db = 0.0;
        double peb_m = std::numeric_limits<double>::infinity();
        double oeb_deg = std::numeric_limits<double>::infinity();
        double peb_approx_m = std::numeric_limits<double>::infinity();
        double oeb_approx_deg = std::numeric_limits<double>::infinity();
        bool flagged = true;
    };

    inline std::vector<Vec3> sector_grid_points(const SweepConfig &c)
    {
        std::vector<Vec3> pts;
        const SectorSpec sec = c.sector();
        for (int j = 0; j < c.grid_r; ++j)
        {
            const double r = c.r_min + (j + 0.5) * (c.r_max - c.r_min) / c.grid_r;
            for (int i = 0; i < c.grid_az; ++i)
            {
                const double az = sec.az_center - 0.5 * sec.span + (i + 0.5) * sec.span / c.grid_az;
                pts.emplace_back(r * std::cos(az), r * std::sin(az), -c.height_m);
            }
        }
        return pts;
    }

    namespace detail
    {
        inline ScenarioConfig scenario_config(const SweepConfig &c)
        {
            ScenarioConfig sc;
            sc.bs = make_ura(c.bs_side, c.bs_side, c.spacing_lambda * c.lambda());
            sc.ue = make_ura(c.ue_side, c.ue_side, c.spacing_lambda * c.lambda());
            sc.sector = c.sector();
            sc.env = sample_environment(sc.sector, c.n_reflectors, c.n_scatterers, c.seed,
                                        c.reflector_half_width, c.sigma_rcs, c.gamma_r,
                                        c.power_threshold);
            sc.pulse = c.pulse();
            sc.budget = c.budget();
            sc.n_b = c.n_b;
            sc.layout = c.layout;
            sc.direction = c.direction;
            sc.kind = c.scenario;
            return sc;
        }

        // Near-vertical LOS geometry is reported singular: the azimuth
        // information at both ends collapses like sin(theta) toward the pole,
        // the counterpart of the singular ring around the BS in the maps.
        inline bool near_vertical(const Vec3 &p, const Orientation &o, double margin_rad)
        {
            const PathGeometry g = los_path_geometry(p, o);
            return g.degenerate || g.bs.theta > kPi - margin_rad || g.bs.theta < margin_rad ||
                   g.ue.theta > kPi - margin_rad || g.ue.theta < margin_rad;
        }

        template <typename F>
        inline void parallel_for(std::size_t n, F &&body)
        {
            const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
            if (hw == 1 || n < 2)
            {
                for (std::size_t i = 0; i < n; ++i)
                    body(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < hw; ++t)
                pool.emplace_back([&] {
                    for (;;)
                    {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= n)
                            return;
                        body(i);
                    }
                });
            for (auto &th : pool)
                th.join();
        }
    }

    // Exact and approximate bounds at every grid point. Uplink uses the
    // configured UE orientation; downlink bounds do not depend on it (the
    // BS-side precoder and geometry are orientation free and the UE receive
    // side is isotropic), so downlink records are evaluated at the canonical
    // zero orientation.
    inline std::vector<GridRecord> grid_sweep(const SweepConfig &c)
    {
        const ScenarioConfig sc = detail::scenario_config(c);
        const std::vector<Vec3> pts = sector_grid_points(c);
        const Orientation o = c.direction == LinkDirection::downlink ? Orientation{}
                                                                     : c.orientation();
        const double margin = deg2rad(c.near_vertical_margin_deg);
        std::vector<GridRecord> records(pts.size());
        detail::parallel_for(pts.size(), [&](std::size_t i) {
            GridRecord rec;
            rec.position = pts[i];
            try
            {
                const Scenario s = build_scenario(sc, pts[i], o);
                rec.n_paths = static_cast<int>(s.paths.size());
                if (s.has_los())
                    rec.snr_db = los_snr_db(s);
                else
                    rec.snr_db = -std::numeric_limits<double>::infinity();
                const bool geo_singular = detail::near_vertical(pts[i], o, margin);
                const BoundsResult exact = exact_bounds(s, c.cond_threshold);
                const BoundsResult approx = approx_bounds(s, c.cond_threshold);
                const bool nlos_without_los =
                    !s.has_los() && s.paths.size() < 3; // (o,p,q) not identifiable
                rec.flagged = geo_singular || exact.singular || approx.singular ||
                              nlos_without_los;
                if (!rec.flagged)
                {
                    rec.peb_m = exact.peb;
                    rec.oeb_deg = rad2deg(exact.oeb);
                    rec.peb_approx_m = approx.peb;
                    rec.oeb_approx_deg = rad2deg(approx.oeb);
                }
            }
            catch (const std::exception &)
            {
                rec.flagged = true;
            }
            records[i] = rec;
        });
        return records;
    }

    // Empirical CDF over the finite values; quantiles interpolate linearly at
    // position q (n - 1).
    struct CdfSeries
    {
        std::vector<double> values; // sorted, finite
        std::size_t n_flagged = 0;

        double quantile(double q) const
        {
            if (values.empty())
                throw std::runtime_error("CdfSeries: no finite values");
            if (q <= 0.0)
                return values.front();
            if (q >= 1.0)
                return values.back();
            const double pos = q * static_cast<double>(values.size() - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const double t = pos - static_cast<double>(lo);
            if (lo + 1 >= values.size())
                return values.back();
            return values[lo] * (1.0 - t) + values[lo + 1] * t;
        }

        double level(std::size_t i) const
        {
            return static_cast<double>(i + 1) / static_cast<double>(values.size());
        }
    };

    enum class BoundField
    {
        peb,
        oeb,
        peb_approx,
        oeb_approx
    };

    inline CdfSeries cdf(const std::vector<GridRecord> &records, BoundField field)
    {
        CdfSeries s;
        for (const auto &r : records)
        {
            if (r.flagged)
            {
                ++s.n_flagged;
                continue;
            }
            double v = 0;
            switch (field)
            {
            case BoundField::peb: v = r.peb_m; break;
            case BoundField::oeb: v = r.oeb_deg; break;
            case BoundField::peb_approx: v = r.peb_approx_m; break;
            case BoundField::oeb_approx: v = r.oeb_approx_deg; break;
            }
            if (std::isfinite(v))
                s.values.push_back(v);
            else
                ++s.n_flagged;
        }
        if (s.values.empty())
            throw std::runtime_error("cdf: all records flagged or infinite");
        std::sort(s.values.begin(), s.values.end());
        return s;
    }

    struct AxisRow
    {
        double axis_value = 0;
        double peb90_ul = 0, peb90_dl = 0;
        double oeb90_ul = 0, oeb90_dl = 0;
    };

    struct AxisTable
    {
        std::vector<AxisRow> rows;
        double slope_speb_ul = 0, slope_speb_dl = 0; // log(bound^2) vs log(N) fits
        bool has_slopes = false;
    };

    // One grid sweep per axis value and direction; 90%-quantiles plus, for the
    // antenna-count axes, the fitted scaling slopes.
    inline AxisTable axis_sweep(const SweepConfig &base)
    {
        if (base.axis == SweepAxis::none || base.axis_values.empty())
            throw ConfigError("axis_sweep: sweep.axis and sweep.values must be set");
        AxisTable table;
        std::vector<std::pair<double, double>> ul_pts, dl_pts;
        for (double v : base.axis_values)
        {
            AxisRow row;
            row.axis_value = v;
            for (LinkDirection dir : {LinkDirection::uplink, LinkDirection::downlink})
            {
                SweepConfig c = base;
                c.direction = dir;
                switch (base.axis)
                {
                case SweepAxis::n_b:
                    c.n_b = static_cast<int>(v);
                    break;
                case SweepAxis::n_r:
                    // receive side of this link direction
                    if (dir == LinkDirection::downlink)
                        c.ue_side = static_cast<int>(std::lround(std::sqrt(v)));
                    else
                        c.bs_side = static_cast<int>(std::lround(std::sqrt(v)));
                    break;
                case SweepAxis::n_t:
                    if (dir == LinkDirection::downlink)
                        c.bs_side = static_cast<int>(std::lround(std::sqrt(v)));
                    else
                        c.ue_side = static_cast<int>(std::lround(std::sqrt(v)));
                    break;
                case SweepAxis::orientation:
                    c.orientation_theta_deg = v;
                    c.orientation_phi_deg = v;
                    break;
                default:
                    break;
                }
                const auto records = grid_sweep(c);
                const CdfSeries peb = cdf(records, BoundField::peb);
                const CdfSeries oeb = cdf(records, BoundField::oeb);
                if (dir == LinkDirection::uplink)
                {
                    row.peb90_ul = peb.quantile(0.9);
                    row.oeb90_ul = oeb.quantile(0.9);
                }
                else
                {
                    row.peb90_dl = peb.quantile(0.9);
                    row.oeb90_dl = oeb.quantile(0.9);
                }
            }
            table.rows.push_back(row);
            if (base.axis == SweepAxis::n_r || base.axis == SweepAxis::n_t)
            {
                ul_pts.emplace_back(v, row.peb90_ul);
                dl_pts.emplace_back(v, row.peb90_dl);
            }
        }
        if (ul_pts.size() >= 4)
        {
            table.slope_speb_ul = scaling_fit(ul_pts);
            table.slope_speb_dl = scaling_fit(dl_pts);
            table.has_slopes = true;
        }
        return table;
    }

    namespace detail
    {
        inline void csv_header(std::ostream &os, const SweepConfig &c)
        {
            os << "# mmpeb " << kVersion << "\n";
            os << "# seed " << c.seed << "\n";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%016llx",
                          static_cast<unsigned long long>(config_hash(c)));
            os << "# config " << buf << "\n";
        }

        inline std::string fmt(double v)
        {
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            return buf;
        }
    }

    inline void emit_csv(const std::vector<GridRecord> &records, const SweepConfig &c,
                         std::ostream &os)
    {
        detail::csv_header(os, c);
        os << "x,y,z,M,snr_db,peb_m,oeb_deg,peb_approx_m,oeb_approx_deg,flag\n";
        for (const auto &r : records)
        {
            os << detail::fmt(r.position.x()) << ',' << detail::fmt(r.position.y()) << ','
               << detail::fmt(r.position.z()) << ',' << r.n_paths << ','
               << detail::fmt(r.snr_db) << ',' << detail::fmt(r.peb_m) << ','
               << detail::fmt(r.oeb_deg) << ',' << detail::fmt(r.peb_approx_m) << ','
               << detail::fmt(r.oeb_approx_deg) << ',' << (r.flagged ? 1 : 0) << "\n";
        }
    }

    inline void emit_csv(const CdfSeries &series, const SweepConfig &c, std::ostream &os)
    {
        detail::csv_header(os, c);
        os << "# flagged " << series.n_flagged << "\n";
        os << "value,cdf\n";
        for (std::size_t i = 0; i < series.values.size(); ++i)
            os << detail::fmt(series.values[i]) << ',' << detail::fmt(series.level(i)) << "\n";
    }

    inline void emit_csv(const AxisTable &table, const SweepConfig &c, std::ostream &os)
    {
        detail::csv_header(os, c);
        if (table.has_slopes)
            os << "# slope_speb_ul " << detail::fmt(table.slope_speb_ul) << " slope_speb_dl "
               << detail::fmt(table.slope_speb_dl) << "\n";
        os << "axis_value,peb90_ul,peb90_dl,oeb90_ul,oeb90_dl\n";
        for (const auto &r : table.rows)
            os << detail::fmt(r.axis_value) << ',' << detail::fmt(r.peb90_ul) << ','
               << detail::fmt(r.peb90_dl) << ',' << detail::fmt(r.oeb90_ul) << ','
               << detail::fmt(r.oeb90_dl) << "\n";
    }

    inline void write_file(const std::string &path, const std::function<void(std::ostream &)> &f)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open output file: " + path);
        f(os);
    }
}

#endif
