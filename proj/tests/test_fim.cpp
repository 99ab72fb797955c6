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

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace mmpeb;

namespace
{
    const double kLambda = kSpeedOfLight / 38e9;
}

TEST_CASE("derivative stacks: centroid traces and finite differences")
{
    // Tr(Ktilde) = Tr(Ptilde) = 0 for centroid-at-origin arrays
    const ArrayGeometry g = make_ura(5, 4, kLambda / 2);
    detail::Rng rng(31);
    for (int i = 0; i < 10; ++i)
    {
        const AnglePair a{rng.uniform(0.2, kPi - 0.2), rng.uniform(-kPi, kPi)};
        const VectorXd kt = g.elements.transpose() * wavenumber_dtheta(a, kLambda);
        const VectorXd pt = g.elements.transpose() * wavenumber_dphi(a, kLambda);
        CHECK(std::abs(kt.sum()) < 1e-9);
        CHECK(std::abs(pt.sum()) < 1e-9);
    }

    // x-axis ULA at theta = pi/2: Ptilde = -(2 pi/lambda) sin(phi) x
    const ArrayGeometry ula = make_ula(8, kLambda / 2);
    const AnglePair a{kPi / 2, 0.9};
    const VectorXd pt = ula.elements.transpose() * wavenumber_dphi(a, kLambda);
    for (int n = 0; n < 8; ++n)
        CHECK(pt(n) == Catch::Approx(-(2 * kPi / kLambda) * std::sin(a.phi) *
                                     ula.elements(0, n)).margin(1e-12));

    // d a / d theta = -j Ktilde a, against central differences
    const double h = 1e-6;
    for (int i = 0; i < 5; ++i)
    {
        const AnglePair ang{rng.uniform(0.3, kPi - 0.3), rng.uniform(-kPi, kPi)};
        const VectorXcd a0 = steering_vector(g, ang, kLambda);
        const VectorXcd ap = steering_vector(g, {ang.theta + h, ang.phi}, kLambda);
        const VectorXcd am = steering_vector(g, {ang.theta - h, ang.phi}, kLambda);
        const VectorXcd fd = (ap - am) / (2 * h);
        const VectorXd kt = g.elements.transpose() * wavenumber_dtheta(ang, kLambda);
        VectorXcd analytic(a0.size());
        for (Eigen::Index n = 0; n < a0.size(); ++n)
            analytic(n) = cplx(0, -1) * kt(n) * a0(n);
        CHECK((fd - analytic).norm() / analytic.norm() < 1e-6);
    }
}

TEST_CASE("exact FIM: single-path identities")
{
    detail::Rng rng(32);
    const Scenario s = oracles::random_scenario(rng, 1, 4, 3);
    const ChannelFim f = exact_channel_fim(s);
    const SinglePathScalars sc = single_path_scalars(s, 0);
    const double gb2 = f.gamma_eff * std::norm(s.paths[0].beta);

    // J(theta_R, theta_R) = gamma_eff |beta|^2 R_theta G
    CHECK(f.matrix(f.index(ParamBlock::theta_rx, 0), f.index(ParamBlock::theta_rx, 0)) ==
          Catch::Approx(gb2 * sc.r_theta * sc.g).epsilon(1e-9));

    // J(tau, tau) = gamma_eff |beta|^2 G 4 pi^2 Weff^2
    const double weff = effective_bandwidth(s.pulse);
    CHECK(f.matrix(f.index(ParamBlock::tau, 0), f.index(ParamBlock::tau, 0)) ==
          Catch::Approx(gb2 * sc.g * 4 * kPi * kPi * weff * weff).epsilon(1e-9));

    // J(theta_R, phi_R) = gamma_eff |beta|^2 X G
    CHECK(f.matrix(f.index(ParamBlock::theta_rx, 0), f.index(ParamBlock::phi_rx, 0)) ==
          Catch::Approx(gb2 * sc.x_thph * sc.g).epsilon(1e-8).margin(1e-30));
}

TEST_CASE("exact FIM matches the finite-difference quadrature oracle")
{
    detail::Rng rng(33);
    for (int trial = 0; trial < 4; ++trial)
    {
        const std::size_t m = 1 + trial % 2;
        const Scenario s = oracles::random_scenario(rng, m, 4, 2 + trial % 3,
                                                    trial % 2 == 0 ? LinkDirection::uplink
                                                                   : LinkDirection::downlink,
                                                    trial >= 2);
        const ChannelFim f = exact_channel_fim(s);
        const MatrixXd oracle = oracles::fd_channel_fim(s);
        const double rel = (f.matrix - oracle).norm() / oracle.norm();
        CHECK(rel < 1e-6);
    }
}

TEST_CASE("exact FIM: symmetry, PSD floor, SNR linearity, relabeling")
{
    detail::Rng rng(34);
    Scenario s = oracles::random_scenario(rng, 2, 4, 4);
    const ChannelFim f = exact_channel_fim(s);
    CHECK((f.matrix - f.matrix.transpose()).norm() / f.matrix.norm() < 1e-12);

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(f.matrix);
    CHECK(eig.eigenvalues().minCoeff() > -1e-8 * f.matrix.norm());

    // doubling E_s doubles every entry exactly
    Scenario s2 = s;
    s2.budget.es *= 2.0;
    const ChannelFim f2 = exact_channel_fim(s2);
    CHECK((f2.matrix - 2.0 * f.matrix).norm() < 1e-12 * f2.matrix.norm());

    // relabeling: swap the array roles and the per-path angle pairs; the
    // matrix must reproduce bit-for-bit
    Scenario swapped = s;
    swapped.direction = LinkDirection::downlink; // s was uplink
    std::swap(swapped.bs, swapped.ue);
    for (auto &path : swapped.paths)
        std::swap(path.geometry.bs, path.geometry.ue);
    const ChannelFim f3 = exact_channel_fim(swapped);
    CHECK((f3.matrix - f.matrix).norm() == 0.0);
}

TEST_CASE("efim: hand cases and the single-path partitioned form")
{
    // scalar Schur: [[a, b], [b, c]] keeping the first entry
    MatrixXd j(2, 2);
    j << 4.0, 1.5, 1.5, 3.0;
    const MatrixXd e = efim(j, {0});
    CHECK(e(0, 0) == Catch::Approx(4.0 - 1.5 * 1.5 / 3.0).epsilon(1e-14));

    // block-diagonal input: unchanged
    MatrixXd bd = MatrixXd::Zero(4, 4);
    bd.topLeftCorner(2, 2) << 2, 0.3, 0.3, 1;
    bd.bottomRightCorner(2, 2) << 5, 0, 0, 7;
    const MatrixXd e2 = efim(bd, {0, 1});
    CHECK((e2 - bd.topLeftCorner(2, 2)).norm() < 1e-14);

    // singular nuisance block carries its condition number
    MatrixXd sing = MatrixXd::Zero(3, 3);
    sing(0, 0) = 1.0;
    sing(1, 1) = 1.0;
    CHECK_THROWS_AS(efim(sing, {0}), SingularMatrixError);

    // M = 1: the (DOA, DOD, TOA) EFIM reproduces the partitioned closed form
    detail::Rng rng(35);
    const Scenario s = oracles::random_scenario(rng, 1, 4, 3);
    const ChannelFim f = exact_channel_fim(s);
    const MatrixXd je = efim(f.matrix, channel_keep_indices(1));
    const SinglePathScalars sc = single_path_scalars(s, 0);
    const double gb2 = f.gamma_eff * std::norm(s.paths[0].beta);
    // tau decouples from every angle
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(je(4, i)) < 1e-9 * std::abs(je(4, 4)));
    MatrixXd want(4, 4);
    want << sc.r_theta * sc.g, 0, sc.x_thph * sc.g, 0,
        0, sc.l_theta / sc.g, 0, sc.y_thph / sc.g,
        sc.x_thph * sc.g, 0, sc.r_phi * sc.g, 0,
        0, sc.y_thph / sc.g, 0, sc.l_phi / sc.g;
    want *= gb2;
    CHECK((je.topLeftCorner(4, 4) - want).norm() / want.norm() < 1e-9);
}

TEST_CASE("single-path scalars: defining identities")
{
    detail::Rng rng(36);
    for (int i = 0; i < 10; ++i)
    {
        const Scenario s = oracles::random_scenario(rng, 1, 3 + i % 3, 2 + i % 4);
        const SinglePathScalars sc = single_path_scalars(s, 0);
        CHECK(sc.g >= 0.0);
        CHECK(sc.l_theta == Catch::Approx(sc.g * sc.t_theta - std::norm(sc.v_theta)));
        CHECK(sc.l_phi == Catch::Approx(sc.g * sc.t_phi - std::norm(sc.v_phi)));
        CHECK(sc.zeta1 == Catch::Approx(sc.r_theta * sc.r_phi - sc.x_thph * sc.x_thph));
        CHECK(sc.zeta2 == Catch::Approx(sc.l_theta * sc.l_phi - sc.y_thph * sc.y_thph));
    }
}

TEST_CASE("single-path CRLBs equal numeric inversion")
{
    detail::Rng rng(37);
    for (int i = 0; i < 20; ++i)
    {
        const Scenario s = oracles::random_scenario(rng, 1, 4, 4);
        const ChannelFim f = exact_channel_fim(s);
        const MatrixXd je = efim(f.matrix, channel_keep_indices(1));
        const SinglePathScalars sc = single_path_scalars(s, 0);
        const double gb2 = f.gamma_eff * std::norm(s.paths[0].beta);
        const double weff = effective_bandwidth(s.pulse);
        const SinglePathCrlbs c = single_path_crlbs(sc, gb2, weff * weff);

        const MatrixXd inv = je.topLeftCorner(4, 4).inverse();
        CHECK(c.theta_rx == Catch::Approx(inv(0, 0)).epsilon(1e-9));
        CHECK(c.theta_tx == Catch::Approx(inv(1, 1)).epsilon(1e-9));
        CHECK(c.phi_rx == Catch::Approx(inv(2, 2)).epsilon(1e-9));
        CHECK(c.phi_tx == Catch::Approx(inv(3, 3)).epsilon(1e-9));
        CHECK(c.cov_rx == Catch::Approx(inv(0, 2)).epsilon(1e-8).margin(1e-30));
        CHECK(c.cov_tx == Catch::Approx(inv(1, 3)).epsilon(1e-8).margin(1e-30));
        CHECK(c.tau == Catch::Approx(1.0 / je(4, 4)).epsilon(1e-9));
    }
}

TEST_CASE("decoupled receive angles when X vanishes")
{
    // theta = pi/2 at the receive side of an x-axis ULA forces Ktilde = 0
    detail::Rng rng(38);
    Scenario s = oracles::random_scenario(rng, 1, 4, 4);
    s.bs = make_ula(8, kLambda / 2); // uplink: BS receives
    s.paths[0].geometry.bs.theta = kPi / 2;
    const SinglePathScalars sc = single_path_scalars(s, 0);
    CHECK(std::abs(sc.x_thph) < 1e-12 * sc.r_phi);
    // planar reduction formulas
    const double gb2 = 2.0 * s.gamma() * std::norm(s.paths[0].beta);
    const SinglePathCrlbs2d c2 = single_path_crlbs_2d(sc, gb2);
    CHECK(c2.phi_rx == Catch::Approx(1.0 / (gb2 * sc.r_phi * sc.g)).epsilon(1e-12));
    CHECK(c2.phi_tx == Catch::Approx(sc.g / (gb2 * sc.l_phi)).epsilon(1e-12));
}

TEST_CASE("zero gain toward the path makes the bounds diverge")
{
    detail::Rng rng(39);
    Scenario s = oracles::random_scenario(rng, 1, 4, 8);
    // point every beam far away from the DOD
    std::vector<AnglePair> away;
    const AnglePair dod = s.paths[0].geometry.ue; // uplink TX side
    for (int l = 0; l < 5; ++l)
        away.push_back({std::clamp(dod.theta + kPi / 2, 0.05, kPi - 0.05),
                        wrap_angle(dod.phi + kPi)});
    s.precoder = beamformer(s.ue, away, s.budget.lambda);
    const SinglePathScalars sc = single_path_scalars(s, 0);
    CHECK(sc.g < 1e-2);
    const double gb2 = 2.0 * s.gamma() * std::norm(s.paths[0].beta);
    const double weff = effective_bandwidth(s.pulse);
    bool diverged = false;
    try
    {
        const SinglePathCrlbs c = single_path_crlbs(sc, gb2, weff * weff);
        const Scenario aligned = oracles::random_scenario(rng, 1, 4, 8);
        (void)aligned;
        diverged = c.tau > 1e-18; // far above an on-beam delay bound
    }
    catch (const SingularMatrixError &)
    {
        diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("approximate FIM: M = 1 identity and cross-path decay")
{
    detail::Rng rng(40);
    const Scenario s1 = oracles::random_scenario(rng, 1, 4, 3);
    const ChannelFim f1 = exact_channel_fim(s1);
    const auto blocks = approx_channel_fim(s1);
    REQUIRE(blocks.size() == 1);
    CHECK((blocks[0] - f1.matrix).norm() < 1e-12 * f1.matrix.norm());

    // widely separated delays: cross-path entries fall away
    Scenario s2 = oracles::random_scenario(rng, 2, 4, 4);
    s2.paths[0].geometry.toa = 4e-8;
    s2.paths[1].geometry.toa = 4e-8 + 40.5 / s2.pulse.bandwidth;
    const ChannelFim f2 = exact_channel_fim(s2);
    double max_cross = 0, max_diag = 0;
    for (int bu = 0; bu < 7; ++bu)
        for (int bv = 0; bv < 7; ++bv)
        {
            max_cross = std::max(max_cross, std::abs(f2.matrix(2 * bu, 2 * bv + 1)));
            max_diag = std::max(max_diag, std::abs(f2.matrix(2 * bu, 2 * bv)));
        }
    CHECK(max_cross < 1e-1 * max_diag);
}

TEST_CASE("ad ratio: hand values and behaviour in N")
{
    CHECK(ad_ratio(MatrixXd(MatrixXd::Identity(4, 4))).delta == 0.0);
    MatrixXd ones = MatrixXd::Ones(2, 2);
    CHECK(ad_ratio(ones).delta == Catch::Approx(1.0));

    // steering gram of two paths separated by 10 degrees in both angles
    double prev = 1e300;
    bool nonincreasing = true;
    for (int side : {6, 8, 10, 12})
    {
        const ArrayGeometry g = make_ura(side, side, kLambda / 2);
        const AnglePair u{deg2rad(100), deg2rad(80)};
        const AnglePair v{deg2rad(110), deg2rad(90)};
        MatrixXcd a(g.size(), 2);
        a.col(0) = steering_vector(g, u, kLambda);
        a.col(1) = steering_vector(g, v, kLambda);
        const double delta = ad_ratio(MatrixXcd(a.adjoint() * a)).delta;
        if (side == 10)
            CHECK(delta < 0.05); // N = 100 at 10 degrees separation
        nonincreasing = nonincreasing && (delta < prev + 1e-12);
        prev = delta;
    }
    CHECK(nonincreasing);

    CHECK_THROWS_AS(ad_ratio(MatrixXd(MatrixXd::Zero(3, 3))), std::invalid_argument);
}

TEST_CASE("factor scan: zero separation and the receive-side claim")
{
    SectorSpec sec;
    const auto rows0 = factor_scan({deg2rad(110), deg2rad(90)}, 0.0, {4, 10}, sec, 25,
                                   kLambda);
    for (const auto &r : rows0)
    {
        CHECK(r.rx_db == Catch::Approx(0.0).margin(1e-9));
        CHECK(r.tx_norm_db == Catch::Approx(0.0).margin(1e-9));
    }

    const auto rows = factor_scan({deg2rad(100), deg2rad(80)}, deg2rad(10),
                                  {4, 6, 8, 10, 12}, sec, 25, kLambda);
    for (const auto &r : rows)
        if (r.n == 100)
            CHECK(r.rx_db < -20.0);
}
