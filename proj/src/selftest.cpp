#include "cbfnav/selftest.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>

#include "cbfnav/vision.hpp"

namespace cbfnav {

namespace {

using namespace vision;
using clock_t_ = std::chrono::steady_clock;

struct Recorder {
    std::vector<SelftestCheck>& out;
    clock_t_::time_point t0 = clock_t_::now();

    void add(const std::string& name, double measured, double threshold,
             bool less_than = true) {
        SelftestCheck c;
        c.name = name;
        c.measured = measured;
        c.threshold = threshold;
        c.less_than = less_than;
        c.passed = less_than ? measured < threshold : measured >= threshold;
        c.seconds = std::chrono::duration<double>(clock_t_::now() - t0).count();
        out.push_back(c);
        t0 = clock_t_::now();
    }
};

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& A, const Eigen::Matrix3d& B) {
    const Eigen::AngleAxisd aa(A * B.transpose());
    return aa.angle() * aa.axis();
}

Eigen::Vector3d triangulate_gn(const std::vector<RigidPose3D>& poses,
                               const std::vector<std::pair<int, Eigen::Vector3d>>& obs,
                               const CameraIntrinsics& K, Eigen::Vector3d x) {
    for (int it = 0; it < 50; ++it) {
        Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
        Eigen::Vector3d g = Eigen::Vector3d::Zero();
        for (const auto& [frame, uvz] : obs) {
            const Eigen::Vector3d pc = poses[frame].apply(x);
            Eigen::Matrix3d Pi;
            Pi << K.fx / pc.z(), 0, -K.fx * pc.x() / (pc.z() * pc.z()), 0,
                K.fy / pc.z(), -K.fy * pc.y() / (pc.z() * pc.z()), 0, 0, 1;
            const Eigen::Vector3d pred(K.fx * pc.x() / pc.z() + K.cx,
                                       K.fy * pc.y() / pc.z() + K.cy, pc.z());
            const Eigen::Matrix3d J = -Pi * poses[frame].R;
            H += J.transpose() * J;
            g += J.transpose() * (uvz - pred);
        }
        const Eigen::Vector3d delta = H.ldlt().solve(-g);
        x += delta;
        if (delta.norm() < 1e-14) break;
    }
    return x;
}

}  // namespace

std::vector<SelftestCheck> run_vision_selftest(std::uint64_t seed, double sigma_px) {
    std::vector<SelftestCheck> checks;
    Recorder rec{checks};

    // Matching: a permuted set with distinct descriptors comes back exactly.
    {
        SceneSpec spec;
        spec.n_landmarks = 150;
        spec.sigma_px = 0.0;
        const SyntheticScene scene = generate_scene(spec, seed + 1);
        const Matches m = match_features(scene.feature_sets[0], scene.feature_sets[0], 0.99);
        int wrong = static_cast<int>(scene.feature_sets[0].features.size()) -
                    static_cast<int>(m.pairs.size());
        for (const auto& p : m.pairs) wrong += (p.i_prev != p.j_curr) ? 1 : 0;
        rec.add("matching_identity_errors", wrong, 1.0);
    }

    // Epipolar distance: a point displaced 3 px along the line normal.
    {
        SceneSpec spec;
        spec.n_landmarks = 40;
        spec.sigma_px = 0.0;
        const SyntheticScene scene = generate_scene(spec, seed + 2);
        const Eigen::Matrix3d F = scene.true_fundamental(0, 1);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const Eigen::Vector2d p1 = scene.pairs[i].p1;
            const Eigen::Vector3d l = F * Eigen::Vector3d(p1.x(), p1.y(), 1.0);
            const Eigen::Vector2d n = Eigen::Vector2d(l(0), l(1)).normalized();
            const Eigen::Vector2d p2 = scene.pairs[i].p2 + 3.0 * n;
            worst = std::max(worst,
                             std::fabs(epipolar_distance(F, p1, p2) - 3.0));
        }
        rec.add("epipolar_displacement_error_px", worst, 1e-9);
    }

    // RANSAC on a noiseless scene: every true pair within 1e-6 px.
    {
        SceneSpec spec;
        spec.n_landmarks = 200;
        spec.sigma_px = 0.0;
        const SyntheticScene scene = generate_scene(spec, seed + 3);
        std::vector<Correspondence> pairs;
        for (const auto& p : scene.pairs) pairs.push_back({p.p1, p.p2});
        const RansacResult res =
            estimate_fundamental_ransac(pairs, kRansacThresholdPx, kRansacMaxIters, seed + 3);
        double worst = 0.0;
        for (const auto& p : pairs)
            worst = std::max(worst, epipolar_distance(res.F, p.p1, p.p2));
        rec.add("ransac_noiseless_max_distance_px", worst, 1e-6);
    }

    // RANSAC classification on the noisy outlier scene.
    {
        SceneSpec spec;
        spec.n_landmarks = 200;
        spec.sigma_px = sigma_px;
        spec.outlier_fraction = 0.3;
        const SyntheticScene scene = generate_scene(spec, seed + 4);
        std::vector<Correspondence> pairs;
        for (const auto& p : scene.pairs) pairs.push_back({p.p1, p.p2});
        const RansacResult res =
            estimate_fundamental_ransac(pairs, kRansacThresholdPx, kRansacMaxIters, seed + 4);
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const bool truth = !scene.pairs[i].outlier;
            const bool got = res.inliers[i] != 0;
            tp += (got && truth) ? 1 : 0;
            fp += (got && !truth) ? 1 : 0;
            fn += (!got && truth) ? 1 : 0;
        }
        const auto filtered = filter_outliers(pairs, res.F, kRansacThresholdPx);
        rec.add("ransac_precision", tp + fp > 0 ? double(tp) / (tp + fp) : 0.0, 0.95, false);
        rec.add("ransac_recall", tp + fn > 0 ? double(tp) / (tp + fn) : 0.0, 0.95, false);
        rec.add("filter_vs_inlier_mask_size_diff",
                std::fabs(double(filtered.size()) - res.inlier_count), 0.5);
    }

    // Motion-only BA: perturbed pose recovered on a noiseless scene.
    {
        SceneSpec spec;
        spec.n_landmarks = 50;
        spec.sigma_px = 0.0;
        const SyntheticScene scene = generate_scene(spec, seed + 5);
        std::mt19937_64 rng(seed + 5);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
        axis.normalize();
        Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
        dir.normalize();
        RigidPose3D init;
        init.R = exp_so3(0.1 * axis) * scene.poses[1].R;
        init.t = scene.poses[1].t + 0.1 * dir;
        const MotionBAResult res =
            motion_only_ba(scene.landmarks, scene.observations[1], init, spec.K);
        rec.add("motion_ba_rotation_error_rad",
                rotation_log(res.pose.R, scene.poses[1].R).norm(), 1e-3);
        rec.add("motion_ba_translation_error_m",
                (res.pose.t - scene.poses[1].t).norm(), 1e-3);
    }

    // Motion BA Jacobians against central finite differences.
    {
        SceneSpec spec;
        spec.n_landmarks = 20;
        spec.sigma_px = 0.3;
        const SyntheticScene scene = generate_scene(spec, seed + 6);
        const RigidPose3D pose = scene.poses[1];
        const auto blocks = motion_residual_blocks_serial(
            scene.landmarks, scene.observations[1], pose, spec.K, 1.345);
        double worst = 0.0;
        const double step = 1e-6;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            for (int k = 0; k < 6; ++k) {
                Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();
                d(k) = step;
                RigidPose3D plus{exp_so3(d.head<3>()) * pose.R, pose.t + d.tail<3>()};
                RigidPose3D minus{exp_so3(-d.head<3>()) * pose.R, pose.t - d.tail<3>()};
                const Eigen::Vector3d rp = scene.observations[1][i] -
                                           project_rgbd(scene.landmarks[i], plus, spec.K);
                const Eigen::Vector3d rm = scene.observations[1][i] -
                                           project_rgbd(scene.landmarks[i], minus, spec.K);
                const Eigen::Vector3d fd = (rp - rm) / (2.0 * step);
                const Eigen::Vector3d an = blocks[i].jacobian.col(k);
                worst = std::max(worst, (fd - an).norm() / std::max(1.0, an.norm()));
            }
        }
        rec.add("motion_ba_jacobian_fd_rel_error", worst, 1e-5);
    }

    // Local BA: fixed frames bitwise unchanged; noiseless recovery.
    {
        SceneSpec spec;
        spec.n_landmarks = 40;
        spec.n_frames = 3;
        spec.sigma_px = 0.0;
        const SyntheticScene scene = generate_scene(spec, seed + 7);
        std::vector<LocalBAObservation> observations;
        for (int f = 0; f < spec.n_frames; ++f)
            for (int i = 0; i < spec.n_landmarks; ++i)
                observations.push_back({f, i, scene.observations[f][i]});
        std::mt19937_64 rng(seed + 7);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<RigidPose3D> init_poses = scene.poses;
        for (int f = 1; f < spec.n_frames; ++f) {
            init_poses[f].R =
                exp_so3(0.05 * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng))) *
                scene.poses[f].R;
            init_poses[f].t = scene.poses[f].t +
                              0.05 * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        }
        std::vector<Eigen::Vector3d> init_points = scene.landmarks;
        for (auto& p : init_points)
            p += 0.05 * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        std::vector<char> fixed(spec.n_frames, 0);
        fixed[0] = 1;
        const LocalBAResult res = local_ba(init_poses, fixed, init_points,
                                           observations, spec.K, 1.345, 200, 1e-18);
        const bool frame0_same = res.poses[0].R == init_poses[0].R &&
                                 res.poses[0].t == init_poses[0].t;
        double ss = 0.0;
        for (const auto& o : observations) {
            const Eigen::Vector3d pred =
                project_rgbd(res.points[o.point], res.poses[o.frame], spec.K);
            ss += (o.uvz.head<2>() - pred.head<2>()).squaredNorm();
        }
        rec.add("local_ba_fixed_frame_changed", frame0_same ? 0.0 : 1.0, 0.5);
        rec.add("local_ba_rms_reprojection_px",
                std::sqrt(ss / double(observations.size())), 1e-6);
    }

    // Local BA with every frame fixed against per-point GN triangulation.
    {
        SceneSpec spec;
        spec.n_landmarks = 30;
        spec.n_frames = 3;
        spec.sigma_px = 0.2;
        const SyntheticScene scene = generate_scene(spec, seed + 8);
        std::vector<LocalBAObservation> observations;
        for (int f = 0; f < spec.n_frames; ++f)
            for (int i = 0; i < spec.n_landmarks; ++i)
                observations.push_back({f, i, scene.observations[f][i]});
        std::mt19937_64 rng(seed + 8);
        std::normal_distribution<double> gauss(0.0, 0.02);
        std::vector<Eigen::Vector3d> jittered = scene.landmarks;
        for (auto& p : jittered) p += Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        const std::vector<char> fixed(spec.n_frames, 1);
        const LocalBAResult res = local_ba(scene.poses, fixed, jittered, observations,
                                           spec.K, 1.345, 200, 1e-16);
        double worst = 0.0;
        for (int i = 0; i < spec.n_landmarks; ++i) {
            std::vector<std::pair<int, Eigen::Vector3d>> obs;
            for (int f = 0; f < spec.n_frames; ++f)
                obs.emplace_back(f, scene.observations[f][i]);
            const Eigen::Vector3d ref = triangulate_gn(scene.poses, obs, spec.K, jittered[i]);
            worst = std::max(worst, (res.points[i] - ref).norm());
        }
        rec.add("local_ba_triangulation_error_m", worst, 1e-6);
    }

    // Sim3 pair against composing the 4x4 matrices.
    {
        std::mt19937_64 rng(seed + 9);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Sim3 a, b;
        a.scale = 0.7;
        a.R = exp_so3(Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
        a.t = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        b.scale = 1.9;
        b.R = exp_so3(Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
        b.t = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        const Eigen::Matrix4d M = b.matrix() * a.matrix();
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Eigen::Vector3d p(gauss(rng), gauss(rng), gauss(rng));
            const auto moved = correct_points_sim3({p}, a, b);
            worst = std::max(worst,
                             (moved[0] - (M * p.homogeneous()).head<3>()).norm());
        }
        rec.add("sim3_composition_error", worst, 1e-12);
    }

    return checks;
}

bool print_selftest_report(std::ostream& out, const std::vector<SelftestCheck>& checks) {
    bool all = true;
    for (const auto& c : checks) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-36s %12.6g %s %-8g %s (%.3fs)\n",
                      c.name.c_str(), c.measured, c.less_than ? "<" : ">=",
                      c.threshold, c.passed ? "PASS" : "FAIL", c.seconds);
        out << buf;
        all = all && c.passed;
    }
    return all;
}

}  // namespace cbfnav
