#include <algorithm>
#include <cmath>
#include <random>

#include "cbfnav/vision.hpp"

namespace cbfnav::vision {

Eigen::Matrix3d SyntheticScene::true_fundamental(int frame_a, int frame_b) const {
    const RigidPose3D& a = poses.at(frame_a);
    const RigidPose3D& b = poses.at(frame_b);
    const Eigen::Matrix3d R_rel = b.R * a.R.transpose();
    const Eigen::Vector3d t_rel = b.t - R_rel * a.t;
    const Eigen::Matrix3d E = skew3(t_rel) * R_rel;
    Eigen::Matrix3d Ka, Kb;
    Ka << spec.K.fx, 0, spec.K.cx, 0, spec.K.fy, spec.K.cy, 0, 0, 1;
    Kb = Ka;
    Eigen::Matrix3d F = Kb.inverse().transpose() * E * Ka.inverse();
    F /= F.norm();
    int r = 0, c = 0;
    F.cwiseAbs().maxCoeff(&r, &c);
    if (F(r, c) < 0.0) F = -F;
    return F;
}

SyntheticScene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
    if (spec.n_landmarks <= 0 || spec.n_frames < 2)
        throw std::invalid_argument("generate_scene: need landmarks and >= 2 frames");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-2.5, 2.5);
    std::uniform_real_distribution<double> uy(-1.9, 1.9);
    std::uniform_real_distribution<double> uz(4.0, 9.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticScene scene;
    scene.spec = spec;

    // Camera path: lateral track with a slight yaw so every frame keeps the
    // landmark volume in view.
    for (int k = 0; k < spec.n_frames; ++k) {
        RigidPose3D pose;
        pose.R = exp_so3(Eigen::Vector3d(0.01 * k, -0.04 * k, 0.005 * k));
        const Eigen::Vector3d center(spec.baseline * k, 0.02 * k, 0.0);
        pose.t = -pose.R * center;
        scene.poses.push_back(pose);
    }

    const double margin = 12.0;
    auto visible_everywhere = [&](const Eigen::Vector3d& X) {
        for (const auto& pose : scene.poses) {
            const Eigen::Vector3d pc = pose.apply(X);
            if (pc.z() < 0.5) return false;
            const double u = spec.K.fx * pc.x() / pc.z() + spec.K.cx;
            const double v = spec.K.fy * pc.y() / pc.z() + spec.K.cy;
            if (u < margin || u > spec.image_width - margin || v < margin ||
                v > spec.image_height - margin)
                return false;
        }
        return true;
    };

    long attempts = 0;
    while (static_cast<int>(scene.landmarks.size()) < spec.n_landmarks) {
        if (++attempts > 1000L * spec.n_landmarks + 100000L)
            throw std::runtime_error(
                "generate_scene: landmark volume barely visible; check baseline");
        const Eigen::Vector3d X(ux(rng), uy(rng), uz(rng));
        if (visible_everywhere(X)) scene.landmarks.push_back(X);
    }

    // Per-landmark descriptor and direction bases, shared across frames.
    std::vector<Eigen::VectorXd> descriptor_base(spec.n_landmarks);
    std::vector<double> direction_base(spec.n_landmarks);
    for (int i = 0; i < spec.n_landmarks; ++i) {
        Eigen::VectorXd d(spec.descriptor_dim);
        for (int k = 0; k < spec.descriptor_dim; ++k) d(k) = gauss(rng);
        descriptor_base[i] = d;
        direction_base[i] = std::uniform_real_distribution<double>(
            -3.14159265358979323846, 3.14159265358979323846)(rng);
    }

    const int grid_cols = (spec.image_height + spec.cell_size - 1) / spec.cell_size;
    scene.observations.resize(spec.n_frames);
    scene.feature_sets.resize(spec.n_frames);
    for (int k = 0; k < spec.n_frames; ++k) {
        scene.feature_sets[k].cell_size = spec.cell_size;
        scene.feature_sets[k].grid_cols = grid_cols;
        for (int i = 0; i < spec.n_landmarks; ++i) {
            const Eigen::Vector3d pc = scene.poses[k].apply(scene.landmarks[i]);
            double u = spec.K.fx * pc.x() / pc.z() + spec.K.cx;
            double v = spec.K.fy * pc.y() / pc.z() + spec.K.cy;
            double Z = pc.z();
            if (spec.sigma_px > 0.0) {
                u += spec.sigma_px * gauss(rng);
                v += spec.sigma_px * gauss(rng);
                Z += spec.sigma_px * Z / spec.K.fx * gauss(rng);
            }
            scene.observations[k].push_back(Eigen::Vector3d(u, v, Z));

            Feature f;
            f.u = u;
            f.v = v;
            f.descriptor = descriptor_base[i];
            if (spec.sigma_px > 0.0)
                for (int d = 0; d < spec.descriptor_dim; ++d)
                    f.descriptor(d) += 0.05 * gauss(rng);
            const double ang = direction_base[i] + (spec.sigma_px > 0.0 ? 0.05 * gauss(rng) : 0.0);
            f.direction = Eigen::Vector2d(std::cos(ang), std::sin(ang));
            f.grid_id = grid_id_for(u, v, spec.cell_size, grid_cols);
            scene.feature_sets[k].features.push_back(std::move(f));
        }
    }

    // Frame 0 <-> frame 1 correspondences with an exact count of planted
    // outliers: the chosen pairs get a uniformly random second point.
    scene.pairs.reserve(spec.n_landmarks);
    for (int i = 0; i < spec.n_landmarks; ++i) {
        ScenePair pair;
        pair.landmark = i;
        pair.p1 = scene.observations[0][i].head<2>();
        pair.p2 = scene.observations[1][i].head<2>();
        scene.pairs.push_back(pair);
    }
    const int n_outliers =
        static_cast<int>(std::lround(spec.outlier_fraction * spec.n_landmarks));
    std::vector<int> order(spec.n_landmarks);
    for (int i = 0; i < spec.n_landmarks; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> px(0.0, spec.image_width);
    std::uniform_real_distribution<double> py(0.0, spec.image_height);
    for (int k = 0; k < n_outliers; ++k) {
        ScenePair& pair = scene.pairs[order[k]];
        pair.outlier = true;
        pair.p2 = Eigen::Vector2d(px(rng), py(rng));
    }
    return scene;
}

}  // namespace cbfnav::vision
