#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cbfnav::vision {

struct CameraIntrinsics {
    double fx = 500.0;
    double fy = 500.0;
    double cx = 320.0;
    double cy = 240.0;
};

struct RigidPose3D {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();

    void validate() const;  // R'R = I within 1e-10, det R = 1
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return R * p + t; }
};

// Similarity transform p -> s R p + t.
struct Sim3 {
    double scale = 1.0;
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();

    void validate() const;
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return scale * (R * p) + t; }
    Eigen::Matrix4d matrix() const;
};

Eigen::Matrix3d skew3(const Eigen::Vector3d& w);
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w);

// ---------------------------------------------------------------------------
// Feature matching
// ---------------------------------------------------------------------------

struct Feature {
    double u = 0.0;
    double v = 0.0;
    Eigen::VectorXd descriptor;
    int grid_id = 0;
    Eigen::Vector2d direction = Eigen::Vector2d::UnitX();
};

// grid_id = floor(u / cell) * grid_cols + floor(v / cell); grid_cols is the
// number of cells along v, so ids are unique per cell.
int grid_id_for(double u, double v, int cell_size, int grid_cols);

struct FeatureSet {
    std::vector<Feature> features;
    int cell_size = 40;
    int grid_cols = 12;
};

struct MatchPair {
    int i_prev = 0;
    int j_curr = 0;
    double distance = 0.0;  // descriptor Euclidean distance
    double cosine = 0.0;    // direction-vector cosine similarity
};

struct Matches {
    std::vector<MatchPair> pairs;
};

// Candidates share a grid id; each side keeps its nearest descriptor; a pair
// survives only if mutually nearest and its direction cosine reaches the
// threshold. The result is one-to-one.
Matches match_features(const FeatureSet& prev, const FeatureSet& curr,
                       double cos_threshold);

// ---------------------------------------------------------------------------
// Epipolar geometry
// ---------------------------------------------------------------------------

struct DegenerateLine : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooFewMatches : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point-to-epipolar-line distance: l = F [p1;1], D = |[p2;1].l| / sqrt(l0^2+l1^2).
double epipolar_distance(const Eigen::Matrix3d& F, const Eigen::Vector2d& p1,
                         const Eigen::Vector2d& p2);

struct Correspondence {
    Eigen::Vector2d p1;
    Eigen::Vector2d p2;
};

// Inlier gate on the transfer distance. With both endpoints at sigma = 0.5 px
// the distance spreads to roughly 0.75 px, so 2.0 px keeps the miss rate on
// true pairs below a few percent while a uniform outlier rarely lands inside.
inline constexpr double kRansacThresholdPx = 2.0;
inline constexpr int kRansacMaxIters = 2000;

// Normalized 8-point fit on all given correspondences, rank-2 enforced,
// Frobenius-normalised with a deterministic sign.
Eigen::Matrix3d fit_fundamental_8point(const std::vector<Correspondence>& pairs);

struct RansacResult {
    Eigen::Matrix3d F = Eigen::Matrix3d::Zero();
    std::vector<char> inliers;  // one flag per input pair
    int inlier_count = 0;
    int best_iteration = 0;
};

// RANSAC over seeded 8-point samples; the winner (most inliers, ties by
// lower inlier residual sum, then lower iteration index) is refit on its
// consensus set. The parallel version scores iterations with OpenMP into
// per-iteration slots and reduces serially, so both versions return
// identical results.
RansacResult estimate_fundamental_ransac(const std::vector<Correspondence>& pairs,
                                         double threshold_px, int max_iters,
                                         std::uint64_t seed);
RansacResult estimate_fundamental_ransac_serial(
    const std::vector<Correspondence>& pairs, double threshold_px, int max_iters,
    std::uint64_t seed);

// Keeps exactly the pairs with epipolar distance <= threshold.
std::vector<Correspondence> filter_outliers(const std::vector<Correspondence>& pairs,
                                            const Eigen::Matrix3d& F,
                                            double threshold_px);

// ---------------------------------------------------------------------------
// Projection and bundle adjustment
// ---------------------------------------------------------------------------

struct BehindCamera : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnderconstrainedPoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RGB-D projection (u, v, Z) of a world point. Throws BehindCamera if the
// camera-frame depth is <= 0.
Eigen::Vector3d project_rgbd(const Eigen::Vector3d& point_world,
                             const RigidPose3D& pose, const CameraIntrinsics& K);

// Huber cost on the squared residual norm s = |r|^2:
// rho(s) = s for s <= delta^2, else 2 delta sqrt(s) - delta^2.
double huber_cost(double squared_norm, double delta);
double huber_weight(double squared_norm, double delta);  // rho'(s)

struct MotionResidualBlock {
    Eigen::Vector3d residual = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 3, 6> jacobian = Eigen::Matrix<double, 3, 6>::Zero();
    double weight = 0.0;
    bool valid = false;
};

// Residuals and pose Jacobians for every (landmark, observation) pair at the
// given pose. The OpenMP version fills one slot per observation; the two
// versions are bit-identical.
std::vector<MotionResidualBlock> motion_residual_blocks(
    const std::vector<Eigen::Vector3d>& landmarks,
    const std::vector<Eigen::Vector3d>& observations, const RigidPose3D& pose,
    const CameraIntrinsics& K, double huber_delta);
std::vector<MotionResidualBlock> motion_residual_blocks_serial(
    const std::vector<Eigen::Vector3d>& landmarks,
    const std::vector<Eigen::Vector3d>& observations, const RigidPose3D& pose,
    const CameraIntrinsics& K, double huber_delta);

struct MotionBAResult {
    RigidPose3D pose;
    bool converged = false;
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
};

// Levenberg-Marquardt over the 6-dof pose minimising the robust reprojection
// cost sum rho(|obs - pi_d(R X + t)|^2). Observations pair up with landmarks
// by index.
MotionBAResult motion_only_ba(const std::vector<Eigen::Vector3d>& landmarks,
                              const std::vector<Eigen::Vector3d>& observations,
                              const RigidPose3D& init, const CameraIntrinsics& K,
                              double huber_delta = 1.345, int max_iters = 100,
                              double tol = 1e-14);

struct LocalBAObservation {
    int frame = 0;
    int point = 0;
    Eigen::Vector3d uvz = Eigen::Vector3d::Zero();
};

struct LocalBAResult {
    std::vector<RigidPose3D> poses;
    std::vector<Eigen::Vector3d> points;
    bool converged = false;
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
};

// Joint LM over the non-fixed poses and all points. Fixed poses contribute
// observations but are returned bit-for-bit unchanged. Requires at least one
// fixed frame and two observations per point.
LocalBAResult local_ba(const std::vector<RigidPose3D>& poses,
                       const std::vector<char>& fixed,
                       const std::vector<Eigen::Vector3d>& points,
                       const std::vector<LocalBAObservation>& observations,
                       const CameraIntrinsics& K, double huber_delta = 1.345,
                       int max_iters = 100, double tol = 1e-14);

// Applies cor_s_wr after s_rw to every point.
std::vector<Eigen::Vector3d> correct_points_sim3(
    const std::vector<Eigen::Vector3d>& points, const Sim3& s_rw,
    const Sim3& cor_s_wr);

// ---------------------------------------------------------------------------
// Synthetic scenes
// ---------------------------------------------------------------------------

struct SceneSpec {
    int n_landmarks = 200;
    int n_frames = 2;
    double sigma_px = 0.5;
    double outlier_fraction = 0.0;
    CameraIntrinsics K;
    int image_width = 640;
    int image_height = 480;
    int descriptor_dim = 32;
    int cell_size = 40;
    double baseline = 0.5;  // camera-centre spacing between frames, metres
};

struct ScenePair {
    Eigen::Vector2d p1;
    Eigen::Vector2d p2;
    bool outlier = false;
    int landmark = 0;
};

struct SyntheticScene {
    SceneSpec spec;
    std::vector<Eigen::Vector3d> landmarks;
    std::vector<RigidPose3D> poses;  // world -> camera
    // Noisy (u, v, Z) per frame; observation i views landmark i.
    std::vector<std::vector<Eigen::Vector3d>> observations;
    std::vector<FeatureSet> feature_sets;
    std::vector<ScenePair> pairs;  // frame 0 <-> frame 1, with planted outliers

    Eigen::Matrix3d true_fundamental(int frame_a, int frame_b) const;
};

// Deterministic given (spec, seed); emits ground truth for every downstream
// check.
SyntheticScene generate_scene(const SceneSpec& spec, std::uint64_t seed);

}  // namespace cbfnav::vision
