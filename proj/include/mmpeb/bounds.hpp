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
// Transformation of channel-parameter information into location information.
// Location parameters are [theta0, phi0, p, q_2..q_M]; channel columns are
// [theta(2M), phi(2M), tau(M)] where the first M angle entries belong to the
// receive side of the link and the second M to the transmit side.

#ifndef MMPEB_BOUNDS_HPP
#define MMPEB_BOUNDS_HPP

#include "channel.hpp"
#include "fim.hpp"
#include "geometry.hpp"
#include "types.hpp"

#include <optional>
#include <vector>

namespace mmpeb
{
    namespace detail
    {
        // Partial derivatives of the UE angles of one path w.r.t. orientation
        // and w.r.t. the endpoint vector v (v = p for LOS, v = p - q for NLOS).
        struct UePartials
        {
            Eigen::Vector2d dtheta_do; // [d/dtheta0, d/dphi0]
            Eigen::Vector2d dphi_do;
            Vec3 dtheta_dv;
            Vec3 dphi_dv;
        };

        inline UePartials ue_angle_partials(const Vec3 &v, const Orientation &o)
        {
            const Eigen::Matrix3d r = rotation_matrix(o);
            const Vec3 vp = -(r.transpose() * v);
            const double rho2 = vp.x() * vp.x() + vp.y() * vp.y();
            const double rho = std::sqrt(rho2);
            if (rho2 == 0.0)
                throw SingularMatrixError(std::numeric_limits<double>::infinity());
            const Vec3 r1 = r.col(0), r2 = r.col(1), r3 = r.col(2);
            UePartials u;
            u.dphi_do(0) = -vp.x() * vp.z() / rho2; // d phi_UE / d theta0
            u.dphi_do(1) = (-vp.x() * vp.x() * std::cos(o.theta0) +
                            (v.y() * std::cos(o.phi0) - v.x() * std::sin(o.phi0)) * vp.y()) /
                           rho2;
            u.dtheta_do(0) = -vp.y() / rho;
            u.dtheta_do(1) = vp.x() * std::sin(o.theta0) / rho;
            u.dphi_dv = (r2 * r1.dot(v) - r1 * r2.dot(v)) / rho2;
            u.dtheta_dv = (r3 + vp.z() * v / v.squaredNorm()) / rho;
            return u;
        }

        // Gradients of the spherical angles of v w.r.t. v.
        inline void sphere_partials(const Vec3 &v, Vec3 &dtheta, Vec3 &dphi)
        {
            const double rho2 = v.x() * v.x() + v.y() * v.y();
            const double rho = std::sqrt(rho2);
            if (rho2 == 0.0)
                throw SingularMatrixError(std::numeric_limits<double>::infinity());
            const double n2 = v.squaredNorm();
            dphi = Vec3(-v.y(), v.x(), 0.0) / rho2;
            dtheta = Vec3(v.x() * v.z(), v.y() * v.z(), -rho2) / (n2 * rho);
        }
    }

    // Jacobian Upsilon = d phi_CH^T / d phi_L with phi_L = [o, p, q_2..q_M].
    struct TransformationMatrix
    {
        MatrixXd matrix;        // (5 + 3(M-1)) x 5M
        std::size_t n_paths = 0;

        // 5x5 block of the o/p rows against path m's [th_R, th_T, ph_R, ph_T, tau]
        MatrixXd path_block_op(std::size_t m) const
        {
            const auto mm = static_cast<Eigen::Index>(n_paths);
            MatrixXd b(5, 5);
            const std::array<Eigen::Index, 5> cols = {
                static_cast<Eigen::Index>(m), mm + static_cast<Eigen::Index>(m),
                2 * mm + static_cast<Eigen::Index>(m), 3 * mm + static_cast<Eigen::Index>(m),
                4 * mm + static_cast<Eigen::Index>(m)};
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    b(i, j) = matrix(i, cols[static_cast<std::size_t>(j)]);
            return b;
        }

        // 3x5 cluster rows of path m (m >= 1, 0-based; LOS has none)
        MatrixXd path_block_cluster(std::size_t m, std::size_t cluster_row) const
        {
            const auto mm = static_cast<Eigen::Index>(n_paths);
            MatrixXd b(3, 5);
            const std::array<Eigen::Index, 5> cols = {
                static_cast<Eigen::Index>(m), mm + static_cast<Eigen::Index>(m),
                2 * mm + static_cast<Eigen::Index>(m), 3 * mm + static_cast<Eigen::Index>(m),
                4 * mm + static_cast<Eigen::Index>(m)};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 5; ++j)
                    b(i, j) = matrix(5 + 3 * static_cast<Eigen::Index>(cluster_row) + i,
                                     cols[static_cast<std::size_t>(j)]);
            return b;
        }
    };

    inline TransformationMatrix transformation_matrix(const Scenario &s)
    {
        const std::size_t m = s.paths.size();
        std::size_t n_clusters = 0;
        for (const auto &path : s.paths)
            if (path.cluster)
                ++n_clusters;
        TransformationMatrix t;
        t.n_paths = m;
        const auto rows = static_cast<Eigen::Index>(5 + 3 * n_clusters);
        t.matrix.setZero(rows, static_cast<Eigen::Index>(5 * m));

        const bool rx_is_bs = s.direction == LinkDirection::uplink;
        std::size_t cluster_row = 0;
        for (std::size_t pm = 0; pm < m; ++pm)
        {
            const auto &path = s.paths[pm];
            const auto mi = static_cast<Eigen::Index>(pm);
            const auto mm = static_cast<Eigen::Index>(m);
            // column index per parameter of this path
            const Eigen::Index c_th_rx = mi, c_th_tx = mm + mi;
            const Eigen::Index c_ph_rx = 2 * mm + mi, c_ph_tx = 3 * mm + mi;
            const Eigen::Index c_tau = 4 * mm + mi;
            const Eigen::Index c_th_bs = rx_is_bs ? c_th_rx : c_th_tx;
            const Eigen::Index c_th_ue = rx_is_bs ? c_th_tx : c_th_rx;
            const Eigen::Index c_ph_bs = rx_is_bs ? c_ph_rx : c_ph_tx;
            const Eigen::Index c_ph_ue = rx_is_bs ? c_ph_tx : c_ph_rx;

            if (path.geometry.degenerate)
                throw SingularMatrixError(std::numeric_limits<double>::infinity());

            if (!path.cluster)
            {
                Vec3 dth_bs, dph_bs;
                detail::sphere_partials(s.p, dth_bs, dph_bs);
                const auto ue = detail::ue_angle_partials(s.p, s.o);
                t.matrix.block<3, 1>(2, c_th_bs) = dth_bs;
                t.matrix.block<3, 1>(2, c_ph_bs) = dph_bs;
                t.matrix.block<2, 1>(0, c_th_ue) = ue.dtheta_do;
                t.matrix.block<2, 1>(0, c_ph_ue) = ue.dphi_do;
                t.matrix.block<3, 1>(2, c_th_ue) = ue.dtheta_dv;
                t.matrix.block<3, 1>(2, c_ph_ue) = ue.dphi_dv;
                t.matrix.block<3, 1>(2, c_tau) = s.p / (kSpeedOfLight * s.p.norm());
            }
            else
            {
                const Vec3 q = *path.cluster;
                const Vec3 w = s.p - q;
                Vec3 dth_bs, dph_bs;
                detail::sphere_partials(q, dth_bs, dph_bs);
                const auto ue = detail::ue_angle_partials(w, s.o);
                const Eigen::Index qr = 5 + 3 * static_cast<Eigen::Index>(cluster_row);
                // BS angles depend on the cluster only
                t.matrix.block<3, 1>(qr, c_th_bs) = dth_bs;
                t.matrix.block<3, 1>(qr, c_ph_bs) = dph_bs;
                // UE angles: orientation, position, cluster (chain through w)
                t.matrix.block<2, 1>(0, c_th_ue) = ue.dtheta_do;
                t.matrix.block<2, 1>(0, c_ph_ue) = ue.dphi_do;
                t.matrix.block<3, 1>(2, c_th_ue) = ue.dtheta_dv;
                t.matrix.block<3, 1>(2, c_ph_ue) = ue.dphi_dv;
                t.matrix.block<3, 1>(qr, c_th_ue) = -ue.dtheta_dv;
                t.matrix.block<3, 1>(qr, c_ph_ue) = -ue.dphi_dv;
                // delay: tau = (|q| + |w|)/c
                t.matrix.block<3, 1>(2, c_tau) = w / (kSpeedOfLight * w.norm());
                t.matrix.block<3, 1>(qr, c_tau) =
                    q / (kSpeedOfLight * q.norm()) - w / (kSpeedOfLight * w.norm());
                ++cluster_row;
            }
        }
        return t;
    }

    // J_L = Upsilon J_e Upsilon^T with the Psi/Phi/Omega partition.
    struct LocationFim
    {
        MatrixXd matrix;
        std::size_t n_clusters = 0;

        MatrixXd psi() const { return matrix.topLeftCorner(5, 5); }
        MatrixXd phi() const { return matrix.topRightCorner(5, matrix.cols() - 5); }
        MatrixXd omega() const
        {
            return matrix.bottomRightCorner(matrix.rows() - 5, matrix.cols() - 5);
        }
    };

    inline LocationFim location_fim(const MatrixXd &channel_efim, const TransformationMatrix &t)
    {
        if (channel_efim.rows() != t.matrix.cols())
            throw std::invalid_argument("location_fim: dimension mismatch");
        LocationFim l;
        l.matrix = t.matrix * channel_efim * t.matrix.transpose();
        l.n_clusters = static_cast<std::size_t>((t.matrix.rows() - 5) / 3);
        return l;
    }

    // EFIM of (o, p): Psi - Phi Omega^{-1} Phi^T.
    inline MatrixXd position_orientation_efim(const LocationFim &l, double cond_threshold = 1e12)
    {
        if (l.n_clusters == 0)
            return l.matrix;
        std::vector<Eigen::Index> keep = {0, 1, 2, 3, 4};
        return efim(l.matrix, keep, cond_threshold);
    }

    struct BoundsResult
    {
        double peb = std::numeric_limits<double>::infinity();    // m
        double oeb = std::numeric_limits<double>::infinity();    // rad
        double speb = std::numeric_limits<double>::infinity();   // m^2
        double soeb = std::numeric_limits<double>::infinity();   // rad^2
        Vec3 position_var{0, 0, 0};                              // per-axis variances
        bool singular = false;
        double condition = 0.0;

        static BoundsResult flagged(double cond)
        {
            BoundsResult r;
            r.singular = true;
            r.condition = cond;
            return r;
        }
    };

    // Invert the 5x5 (o, p) EFIM; rows 1-2 are orientation, 3-5 position.
    inline BoundsResult peb_oeb(const MatrixXd &efim_op, double cond_threshold = 1e12)
    {
        if (efim_op.rows() != 5 || efim_op.cols() != 5)
            throw std::invalid_argument("peb_oeb: expected a 5x5 matrix");
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(efim_op);
        const double lmax = eig.eigenvalues().maxCoeff();
        const double lmin = eig.eigenvalues().minCoeff();
        if (lmin <= 0.0 || lmax / lmin > cond_threshold)
            return BoundsResult::flagged(lmin > 0.0 ? lmax / lmin
                                                    : std::numeric_limits<double>::infinity());
        const MatrixXd inv = eig.eigenvectors() *
                             eig.eigenvalues().cwiseInverse().asDiagonal() *
                             eig.eigenvectors().transpose();
        BoundsResult r;
        r.singular = false;
        r.condition = lmax / lmin;
        r.soeb = inv(0, 0) + inv(1, 1);
        r.speb = inv(2, 2) + inv(3, 3) + inv(4, 4);
        r.position_var = Vec3(inv(2, 2), inv(3, 3), inv(4, 4));
        r.oeb = std::sqrt(r.soeb);
        r.peb = std::sqrt(r.speb);
        return r;
    }

    // Full pipeline: exact FIM -> beta EFIM -> transform -> cluster EFIM -> invert.
    inline BoundsResult exact_bounds(const Scenario &s, double cond_threshold = 1e12)
    {
        try
        {
            const ChannelFim fim = exact_channel_fim(s);
            const MatrixXd je = efim(fim.matrix, channel_keep_indices(s.paths.size()),
                                     cond_threshold);
            const TransformationMatrix t = transformation_matrix(s);
            const LocationFim l = location_fim(je, t);
            const MatrixXd jop = position_orientation_efim(l, cond_threshold);
            return peb_oeb(jop, cond_threshold);
        }
        catch (const SingularMatrixError &e)
        {
            return BoundsResult::flagged(e.condition);
        }
    }

    // Approximate (o, p) EFIM: per-path EFIMs transformed and summed, with the
    // gain-uncertainty term and, for cluster paths, the cluster-location term.
    inline BoundsResult approx_bounds(const Scenario &s, double cond_threshold = 1e12)
    {
        try
        {
            const std::vector<MatrixXd> per_path = approx_channel_fim(s);
            const TransformationMatrix t = transformation_matrix(s);
            MatrixXd total = MatrixXd::Zero(5, 5);
            std::size_t cluster_row = 0;
            const std::vector<Eigen::Index> keep5 = {0, 1, 2, 3, 4};
            for (std::size_t m = 0; m < s.paths.size(); ++m)
            {
                // Lambda^e: 5x5 EFIM of [th_R, th_T, ph_R, ph_T, tau] after beta
                const MatrixXd lam_e = efim(per_path[m], keep5, cond_threshold);
                const MatrixXd up = t.path_block_op(m);
                MatrixXd contrib = up * lam_e * up.transpose();
                if (s.paths[m].cluster)
                {
                    const MatrixXd uq = t.path_block_cluster(m, cluster_row++);
                    const MatrixXd inner = uq * lam_e * uq.transpose();
                    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(inner);
                    const double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
                    const double lmin = eig.eigenvalues().cwiseAbs().minCoeff();
                    if (lmin <= 0.0 || lmax / lmin > cond_threshold)
                        return BoundsResult::flagged(lmin > 0.0 ? lmax / lmin
                                                                : std::numeric_limits<double>::infinity());
                    const MatrixXd inner_inv = eig.eigenvectors() *
                                               eig.eigenvalues().cwiseInverse().asDiagonal() *
                                               eig.eigenvectors().transpose();
                    const MatrixXd cross = up * lam_e * uq.transpose();
                    contrib -= cross * inner_inv * cross.transpose();
                }
                total += contrib;
            }
            return peb_oeb(total, cond_threshold);
        }
        catch (const SingularMatrixError &e)
        {
            return BoundsResult::flagged(e.condition);
        }
    }

    namespace detail
    {
        // Rows d(theta0, phi0)/d[th_BS, th_UE, ph_BS, ph_UE, tau] of the inverse
        // of the LOS map phi_L -> phi_CH, via the 2x2 orientation system:
        //   d(angles_UE) = Mo d(o) + Mp d(p),  p = p(th_BS, ph_BS, tau).
        struct OrientationGradients
        {
            Eigen::Vector2d d_thbs, d_thue, d_phbs, d_phue; // [dtheta0, dphi0]
        };

        inline OrientationGradients orientation_gradients(const Vec3 &p, const Orientation &o)
        {
            const auto ue = ue_angle_partials(p, o);
            Eigen::Matrix2d mo;
            mo << ue.dtheta_do(0), ue.dtheta_do(1),
                ue.dphi_do(0), ue.dphi_do(1);
            Eigen::Matrix<double, 2, 3> mp;
            mp.row(0) = ue.dtheta_dv.transpose();
            mp.row(1) = ue.dphi_dv.transpose();
            const double det = mo.determinant();
            if (std::abs(det) < 1e-300)
                throw SingularMatrixError(std::numeric_limits<double>::infinity());
            const Eigen::Matrix2d moi = mo.inverse();

            bool deg = false;
            const AnglePair bs = angles_of(p, &deg);
            if (deg)
                throw SingularMatrixError(std::numeric_limits<double>::infinity());
            const double ct = std::cos(bs.theta), st = std::sin(bs.theta);
            const double cp = std::cos(bs.phi), sp = std::sin(bs.phi);
            const double nrm = p.norm();
            const Vec3 dp_dth = nrm * Vec3(cp * ct, sp * ct, -st);
            const Vec3 dp_dph = nrm * Vec3(-sp * st, cp * st, 0.0);

            OrientationGradients g;
            g.d_thue = moi.col(0);
            g.d_phue = moi.col(1);
            g.d_thbs = -moi * (mp * dp_dth);
            g.d_phbs = -moi * (mp * dp_dph);
            return g;
        }
    }

    // Closed-form LOS bounds: SPEB from the BS-side CRLBs and the delay, SOEB
    // as the weighted sum of the angular bounds with the orientation-gradient
    // weights. Identical to the transform pipeline wherever both are defined.
    inline BoundsResult los_closed_form(const Scenario &s)
    {
        if (!s.has_los() || s.paths.size() != 1)
            throw std::invalid_argument("los_closed_form: single LOS path required");
        try
        {
            const SinglePathScalars sc = single_path_scalars(s, 0);
            const double gb2 = s.budget.noise_factor * s.gamma() * std::norm(s.paths[0].beta);
            const double weff = effective_bandwidth(s.pulse);
            const SinglePathCrlbs c = single_path_crlbs(sc, gb2, weff * weff);

            // map R/T to BS/UE by link direction
            const bool rx_is_bs = s.direction == LinkDirection::uplink;
            const double s_thbs = rx_is_bs ? c.theta_rx : c.theta_tx;
            const double s_phbs = rx_is_bs ? c.phi_rx : c.phi_tx;
            const double s_thphbs = rx_is_bs ? c.cov_rx : c.cov_tx;
            const double s_thue = rx_is_bs ? c.theta_tx : c.theta_rx;
            const double s_phue = rx_is_bs ? c.phi_tx : c.phi_rx;
            const double s_thphue = rx_is_bs ? c.cov_tx : c.cov_rx;

            bool deg = false;
            const AnglePair bs = angles_of(s.p, &deg);
            if (deg || s.paths[0].geometry.degenerate)
                return BoundsResult::flagged(std::numeric_limits<double>::infinity());
            const double p2 = s.p.squaredNorm();

            BoundsResult r;
            r.singular = false;
            r.speb = p2 * s_thbs + p2 * std::sin(bs.theta) * std::sin(bs.theta) * s_phbs +
                     kSpeedOfLight * kSpeedOfLight * c.tau;
            const auto g = detail::orientation_gradients(s.p, s.o);
            r.soeb = g.d_thbs.squaredNorm() * s_thbs + g.d_thue.squaredNorm() * s_thue +
                     g.d_phbs.squaredNorm() * s_phbs + g.d_phue.squaredNorm() * s_phue +
                     2.0 * g.d_thbs.dot(g.d_phbs) * s_thphbs +
                     2.0 * g.d_thue.dot(g.d_phue) * s_thphue;
            r.peb = std::sqrt(r.speb);
            r.oeb = std::sqrt(r.soeb);
            return r;
        }
        catch (const SingularMatrixError &e)
        {
            return BoundsResult::flagged(e.condition);
        }
    }

    // Planar reduction (arrays and geometry in the xy-plane):
    //   SPEB = c^2 CRLB(tau) + |p|^2 CRLB(phi_BS)
    //   SOEB = CRLB(phi_BS) + CRLB(phi_UE)
    struct Bounds2d
    {
        double speb = 0, soeb = 0;
    };

    inline Bounds2d los_closed_form_2d(const Scenario &s)
    {
        if (!s.has_los() || s.paths.size() != 1)
            throw std::invalid_argument("los_closed_form_2d: single LOS path required");
        const SinglePathScalars sc = single_path_scalars(s, 0);
        const double gb2 = s.budget.noise_factor * s.gamma() * std::norm(s.paths[0].beta);
        const double weff = effective_bandwidth(s.pulse);
        const SinglePathCrlbs2d c2 = single_path_crlbs_2d(sc, gb2);
        const double crlb_tau = 1.0 / (4.0 * kPi * kPi * weff * weff * gb2 * sc.g);
        const bool rx_is_bs = s.direction == LinkDirection::uplink;
        const double phbs = rx_is_bs ? c2.phi_rx : c2.phi_tx;
        const double phue = rx_is_bs ? c2.phi_tx : c2.phi_rx;
        Bounds2d b;
        b.speb = kSpeedOfLight * kSpeedOfLight * crlb_tau + s.p.squaredNorm() * phbs;
        b.soeb = phbs + phue;
        return b;
    }

    // Least-squares slope of log(bound^2) against log(N).
    inline double scaling_fit(const std::vector<std::pair<double, double>> &n_bound)
    {
        if (n_bound.size() < 4)
            throw std::invalid_argument("scaling_fit: need at least 4 sweep points");
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [n, bound] : n_bound)
        {
            if (bound <= 0.0 || n <= 0.0)
                throw std::invalid_argument("scaling_fit: positive values required");
            const double x = std::log(n);
            const double y = std::log(bound * bound);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(n_bound.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
}

#endif
