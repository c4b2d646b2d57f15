#include <cmath>
#include <limits>

#include "cbfnav/vision.hpp"

namespace cbfnav::vision {

Eigen::Matrix3d skew3(const Eigen::Vector3d& w) {
    Eigen::Matrix3d S;
    S << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return S;
}

namespace {

// d pi / d p_c at the camera-frame point.
Eigen::Matrix3d projection_jacobian(const Eigen::Vector3d& pc,
                                    const CameraIntrinsics& K) {
    const double X = pc.x(), Y = pc.y(), Z = pc.z();
    Eigen::Matrix3d J;
    J << K.fx / Z, 0, -K.fx * X / (Z * Z), 0, K.fy / Z, -K.fy * Y / (Z * Z), 0, 0, 1;
    return J;
}

Eigen::Vector3d project_camera(const Eigen::Vector3d& pc, const CameraIntrinsics& K) {
    return {K.fx * pc.x() / pc.z() + K.cx, K.fy * pc.y() / pc.z() + K.cy, pc.z()};
}

void check_noncollinear(const std::vector<Eigen::Vector3d>& pts) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    // Two significant spreads rule out a line.
    if (es.eigenvalues()(1) <= 1e-12 * std::max(es.eigenvalues()(2), 1.0))
        throw DegenerateConfiguration("motion_only_ba: landmarks are collinear");
}

}  // namespace

void RigidPose3D::validate() const {
    if ((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
        std::fabs(R.determinant() - 1.0) > 1e-10)
        throw std::invalid_argument("RigidPose3D: R is not a rotation");
}

void Sim3::validate() const {
    if (!(scale > 0.0)) throw std::invalid_argument("Sim3: scale must be > 0");
    if ((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
        std::fabs(R.determinant() - 1.0) > 1e-10)
        throw std::invalid_argument("Sim3: R is not a rotation");
}

Eigen::Matrix4d Sim3::matrix() const {
    Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
    M.topLeftCorner<3, 3>() = scale * R;
    M.topRightCorner<3, 1>() = t;
    return M;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
    const double angle = w.norm();
    const Eigen::Matrix3d S = skew3(w);
    if (angle < 1e-10)
        return Eigen::Matrix3d::Identity() + S + 0.5 * S * S;
    const double a = std::sin(angle) / angle;
    const double b = (1.0 - std::cos(angle)) / (angle * angle);
    return Eigen::Matrix3d::Identity() + a * S + b * S * S;
}

Eigen::Vector3d project_rgbd(const Eigen::Vector3d& point_world,
                             const RigidPose3D& pose, const CameraIntrinsics& K) {
    const Eigen::Vector3d pc = pose.apply(point_world);
    if (pc.z() <= 0.0) throw BehindCamera("project_rgbd: point has depth <= 0");
    return project_camera(pc, K);
}

double huber_cost(double squared_norm, double delta) {
    if (squared_norm <= delta * delta) return squared_norm;
    return 2.0 * delta * std::sqrt(squared_norm) - delta * delta;
}

double huber_weight(double squared_norm, double delta) {
    if (squared_norm <= delta * delta) return 1.0;
    return delta / std::sqrt(squared_norm);
}

namespace {

MotionResidualBlock motion_block(const Eigen::Vector3d& landmark,
                                 const Eigen::Vector3d& obs, const RigidPose3D& pose,
                                 const CameraIntrinsics& K, double huber_delta) {
    MotionResidualBlock blk;
    const Eigen::Vector3d pc = pose.apply(landmark);
    if (pc.z() <= 1e-9) return blk;  // invalid
    const Eigen::Matrix3d Pi = projection_jacobian(pc, K);
    blk.residual = obs - project_camera(pc, K);
    const Eigen::Vector3d q = pose.R * landmark;
    blk.jacobian.leftCols<3>() = Pi * skew3(q);
    blk.jacobian.rightCols<3>() = -Pi;
    blk.weight = huber_weight(blk.residual.squaredNorm(), huber_delta);
    blk.valid = true;
    return blk;
}

}  // namespace

std::vector<MotionResidualBlock> motion_residual_blocks_serial(
    const std::vector<Eigen::Vector3d>& landmarks,
    const std::vector<Eigen::Vector3d>& observations, const RigidPose3D& pose,
    const CameraIntrinsics& K, double huber_delta) {
    std::vector<MotionResidualBlock> blocks(landmarks.size());
    for (std::size_t i = 0; i < landmarks.size(); ++i)
        blocks[i] = motion_block(landmarks[i], observations[i], pose, K, huber_delta);
    return blocks;
}

std::vector<MotionResidualBlock> motion_residual_blocks(
    const std::vector<Eigen::Vector3d>& landmarks,
    const std::vector<Eigen::Vector3d>& observations, const RigidPose3D& pose,
    const CameraIntrinsics& K, double huber_delta) {
    std::vector<MotionResidualBlock> blocks(landmarks.size());
    const int n = static_cast<int>(landmarks.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        blocks[i] = motion_block(landmarks[i], observations[i], pose, K, huber_delta);
    return blocks;
}

namespace {

double blocks_cost(const std::vector<MotionResidualBlock>& blocks, double delta) {
    double cost = 0.0;
    for (const auto& b : blocks) {
        if (!b.valid) return std::numeric_limits<double>::infinity();
        cost += huber_cost(b.residual.squaredNorm(), delta);
    }
    return cost;
}

}  // namespace

MotionBAResult motion_only_ba(const std::vector<Eigen::Vector3d>& landmarks,
                              const std::vector<Eigen::Vector3d>& observations,
                              const RigidPose3D& init, const CameraIntrinsics& K,
                              double huber_delta, int max_iters, double tol) {
    if (landmarks.size() != observations.size())
        throw std::invalid_argument("motion_only_ba: size mismatch");
    if (landmarks.size() < 3)
        throw DegenerateConfiguration("motion_only_ba: need at least 3 landmarks");
    check_noncollinear(landmarks);
    init.validate();

    MotionBAResult res;
    res.pose = init;
    auto blocks = motion_residual_blocks(landmarks, observations, res.pose, K, huber_delta);
    double cost = blocks_cost(blocks, huber_delta);
    res.initial_cost = cost;
    double mu = 1e-4;

    for (int iter = 0; iter < max_iters; ++iter) {
        res.iterations = iter + 1;
        Eigen::Matrix<double, 6, 6> H = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
        for (const auto& b : blocks) {
            if (!b.valid) continue;
            H += b.weight * b.jacobian.transpose() * b.jacobian;
            g += b.weight * b.jacobian.transpose() * b.residual;
        }
        if (g.lpNorm<Eigen::Infinity>() < 1e-12) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            const Eigen::Matrix<double, 6, 6> Hd =
                H + mu * Eigen::Matrix<double, 6, 6>::Identity();
            const Eigen::Matrix<double, 6, 1> delta = Hd.ldlt().solve(-g);
            if (!delta.allFinite()) {
                mu *= 4.0;
                continue;
            }
            RigidPose3D trial;
            trial.R = exp_so3(delta.head<3>()) * res.pose.R;
            trial.t = res.pose.t + delta.tail<3>();
            auto trial_blocks =
                motion_residual_blocks(landmarks, observations, trial, K, huber_delta);
            const double trial_cost = blocks_cost(trial_blocks, huber_delta);
            if (trial_cost < cost) {
                const double improvement = cost - trial_cost;
                res.pose = trial;
                blocks = std::move(trial_blocks);
                cost = trial_cost;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                if (improvement <= tol * std::max(1.0, cost)) res.converged = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) {
            res.converged = true;  // no descent direction left at damping limit
            break;
        }
        if (res.converged) break;
    }
    res.final_cost = cost;
    return res;
}

LocalBAResult local_ba(const std::vector<RigidPose3D>& poses,
                       const std::vector<char>& fixed,
                       const std::vector<Eigen::Vector3d>& points,
                       const std::vector<LocalBAObservation>& observations,
                       const CameraIntrinsics& K, double huber_delta, int max_iters,
                       double tol) {
    if (poses.size() != fixed.size())
        throw std::invalid_argument("local_ba: fixed flags size mismatch");
    if (std::find(fixed.begin(), fixed.end(), char(1)) == fixed.end())
        throw std::invalid_argument("local_ba: at least one frame must be fixed");
    std::vector<int> obs_per_point(points.size(), 0);
    for (const auto& o : observations) {
        if (o.frame < 0 || o.frame >= static_cast<int>(poses.size()) || o.point < 0 ||
            o.point >= static_cast<int>(points.size()))
            throw std::invalid_argument("local_ba: observation index out of range");
        ++obs_per_point[o.point];
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        if (obs_per_point[i] < 2)
            throw UnderconstrainedPoint("local_ba: point observed fewer than 2 times");

    // Parameter layout: 6 per free frame, then 3 per point.
    std::vector<int> pose_offset(poses.size(), -1);
    int np = 0;
    for (std::size_t k = 0; k < poses.size(); ++k)
        if (!fixed[k]) {
            pose_offset[k] = np;
            np += 6;
        }
    const int point_base = np;
    np += 3 * static_cast<int>(points.size());

    LocalBAResult res;
    res.poses = poses;
    res.points = points;

    auto total_cost = [&](const std::vector<RigidPose3D>& ps,
                          const std::vector<Eigen::Vector3d>& xs) {
        double cost = 0.0;
        for (const auto& o : observations) {
            const Eigen::Vector3d pc = ps[o.frame].apply(xs[o.point]);
            if (pc.z() <= 1e-9) return std::numeric_limits<double>::infinity();
            const Eigen::Vector3d r = o.uvz - project_camera(pc, K);
            cost += huber_cost(r.squaredNorm(), huber_delta);
        }
        return cost;
    };

    double cost = total_cost(res.poses, res.points);
    res.initial_cost = cost;
    double mu = 1e-4;

    for (int iter = 0; iter < max_iters; ++iter) {
        res.iterations = iter + 1;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(np, np);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(np);
        for (const auto& o : observations) {
            const RigidPose3D& pose = res.poses[o.frame];
            const Eigen::Vector3d& X = res.points[o.point];
            const Eigen::Vector3d pc = pose.apply(X);
            if (pc.z() <= 1e-9) continue;
            const Eigen::Matrix3d Pi = projection_jacobian(pc, K);
            const Eigen::Vector3d r = o.uvz - project_camera(pc, K);
            const double w = huber_weight(r.squaredNorm(), huber_delta);
            const Eigen::Matrix3d Jx = -Pi * pose.R;
            const int xo = point_base + 3 * o.point;

            H.block<3, 3>(xo, xo) += w * Jx.transpose() * Jx;
            g.segment<3>(xo) += w * Jx.transpose() * r;

            if (pose_offset[o.frame] >= 0) {
                Eigen::Matrix<double, 3, 6> Jp;
                Jp.leftCols<3>() = Pi * skew3(pose.R * X);
                Jp.rightCols<3>() = -Pi;
                const int po = pose_offset[o.frame];
                H.block<6, 6>(po, po) += w * Jp.transpose() * Jp;
                g.segment<6>(po) += w * Jp.transpose() * r;
                H.block<6, 3>(po, xo) += w * Jp.transpose() * Jx;
                H.block<3, 6>(xo, po) += w * Jx.transpose() * Jp;
            }
        }
        if (g.lpNorm<Eigen::Infinity>() < 1e-12) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            const Eigen::VectorXd delta =
                (H + mu * Eigen::MatrixXd::Identity(np, np)).ldlt().solve(-g);
            if (!delta.allFinite()) {
                mu *= 4.0;
                continue;
            }
            std::vector<RigidPose3D> trial_poses = res.poses;
            std::vector<Eigen::Vector3d> trial_points = res.points;
            for (std::size_t k = 0; k < poses.size(); ++k) {
                if (pose_offset[k] < 0) continue;
                const auto d = delta.segment<6>(pose_offset[k]);
                trial_poses[k].R = exp_so3(d.head<3>()) * res.poses[k].R;
                trial_poses[k].t = res.poses[k].t + d.tail<3>();
            }
            for (std::size_t i = 0; i < points.size(); ++i)
                trial_points[i] += delta.segment<3>(point_base + 3 * static_cast<int>(i));

            const double trial_cost = total_cost(trial_poses, trial_points);
            if (trial_cost < cost) {
                const double improvement = cost - trial_cost;
                res.poses = std::move(trial_poses);
                res.points = std::move(trial_points);
                cost = trial_cost;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                if (improvement <= tol * std::max(1.0, cost)) res.converged = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) {
            res.converged = true;
            break;
        }
        if (res.converged) break;
    }
    res.final_cost = cost;
    return res;
}

std::vector<Eigen::Vector3d> correct_points_sim3(
    const std::vector<Eigen::Vector3d>& points, const Sim3& s_rw,
    const Sim3& cor_s_wr) {
    s_rw.validate();
    cor_s_wr.validate();
    std::vector<Eigen::Vector3d> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(cor_s_wr.apply(s_rw.apply(p)));
    return out;
}

}  // namespace cbfnav::vision
