#include <algorithm>
#include <cmath>
#include <random>

#include "cbfnav/vision.hpp"

namespace cbfnav::vision {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Hartley normalisation: centroid to origin, RMS distance to sqrt(2).
Eigen::Matrix3d normalising_transform(const std::vector<Correspondence>& pairs,
                                      bool second) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& c : pairs) mean += second ? c.p2 : c.p1;
    mean /= static_cast<double>(pairs.size());
    double rms = 0.0;
    for (const auto& c : pairs) rms += ((second ? c.p2 : c.p1) - mean).squaredNorm();
    rms = std::sqrt(rms / static_cast<double>(pairs.size()));
    const double s = rms > 0.0 ? std::sqrt(2.0) / rms : 1.0;
    Eigen::Matrix3d T;
    T << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
    return T;
}

void sample_indices(std::uint64_t seed, int n, int k, std::vector<int>& out) {
    std::mt19937_64 rng(seed);
    out.clear();
    while (static_cast<int>(out.size()) < k) {
        const int idx = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
}

struct IterScore {
    int inliers = -1;
    double residual = 0.0;
};

IterScore score_iteration(const std::vector<Correspondence>& pairs,
                          std::uint64_t seed, int iter, double threshold) {
    std::vector<int> idx;
    sample_indices(splitmix64(seed + 0x517cc1b727220a95ull * (iter + 1)),
                   static_cast<int>(pairs.size()), 8, idx);
    std::vector<Correspondence> sample;
    sample.reserve(8);
    for (int i : idx) sample.push_back(pairs[i]);

    IterScore score;
    Eigen::Matrix3d F;
    try {
        F = fit_fundamental_8point(sample);
    } catch (const std::exception&) {
        return score;
    }
    int count = 0;
    double resid = 0.0;
    for (const auto& c : pairs) {
        double d;
        try {
            d = epipolar_distance(F, c.p1, c.p2);
        } catch (const DegenerateLine&) {
            continue;
        }
        if (d <= threshold) {
            ++count;
            resid += d;
        }
    }
    score.inliers = count;
    score.residual = resid;
    return score;
}

RansacResult ransac_impl(const std::vector<Correspondence>& pairs,
                         double threshold_px, int max_iters, std::uint64_t seed,
                         bool parallel) {
    if (static_cast<int>(pairs.size()) < 8)
        throw TooFewMatches("estimate_fundamental_ransac: need at least 8 matches");

    std::vector<IterScore> scores(max_iters);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int it = 0; it < max_iters; ++it)
            scores[it] = score_iteration(pairs, seed, it, threshold_px);
    } else {
        for (int it = 0; it < max_iters; ++it)
            scores[it] = score_iteration(pairs, seed, it, threshold_px);
    }

    int best = 0;
    for (int it = 1; it < max_iters; ++it) {
        if (scores[it].inliers > scores[best].inliers ||
            (scores[it].inliers == scores[best].inliers &&
             scores[it].residual < scores[best].residual))
            best = it;
    }
    if (scores[best].inliers < 8)
        throw DegenerateConfiguration("estimate_fundamental_ransac: consensus below 8");

    // Rebuild the winning model, collect its consensus set, refit on it.
    std::vector<int> idx;
    sample_indices(splitmix64(seed + 0x517cc1b727220a95ull * (best + 1)),
                   static_cast<int>(pairs.size()), 8, idx);
    std::vector<Correspondence> sample;
    for (int i : idx) sample.push_back(pairs[i]);
    const Eigen::Matrix3d F0 = fit_fundamental_8point(sample);

    std::vector<Correspondence> consensus;
    for (const auto& c : pairs)
        if (epipolar_distance(F0, c.p1, c.p2) <= threshold_px) consensus.push_back(c);

    RansacResult res;
    res.F = fit_fundamental_8point(consensus);
    res.best_iteration = best;
    res.inliers.assign(pairs.size(), 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (epipolar_distance(res.F, pairs[i].p1, pairs[i].p2) <= threshold_px) {
            res.inliers[i] = 1;
            ++res.inlier_count;
        }
    }
    if (res.inlier_count < 8)
        throw DegenerateConfiguration("estimate_fundamental_ransac: refit consensus below 8");
    return res;
}

}  // namespace

double epipolar_distance(const Eigen::Matrix3d& F, const Eigen::Vector2d& p1,
                         const Eigen::Vector2d& p2) {
    const Eigen::Vector3d l = F * Eigen::Vector3d(p1.x(), p1.y(), 1.0);
    const double denom = std::hypot(l(0), l(1));
    if (denom == 0.0)
        throw DegenerateLine("epipolar_distance: epipolar line has no direction");
    return std::fabs(Eigen::Vector3d(p2.x(), p2.y(), 1.0).dot(l)) / denom;
}

Eigen::Matrix3d fit_fundamental_8point(const std::vector<Correspondence>& pairs) {
    if (pairs.size() < 8)
        throw TooFewMatches("fit_fundamental_8point: need at least 8 pairs");
    const Eigen::Matrix3d T1 = normalising_transform(pairs, false);
    const Eigen::Matrix3d T2 = normalising_transform(pairs, true);

    Eigen::MatrixXd A(static_cast<int>(pairs.size()), 9);
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        const Eigen::Vector3d q1 = T1 * Eigen::Vector3d(pairs[i].p1.x(), pairs[i].p1.y(), 1.0);
        const Eigen::Vector3d q2 = T2 * Eigen::Vector3d(pairs[i].p2.x(), pairs[i].p2.y(), 1.0);
        A.row(i) << q2.x() * q1.x(), q2.x() * q1.y(), q2.x(), q2.y() * q1.x(),
            q2.y() * q1.y(), q2.y(), q1.x(), q1.y(), 1.0;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXd f = svd.matrixV().col(8);
    Eigen::Matrix3d Fn;
    Fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

    // Enforce rank 2.
    Eigen::JacobiSVD<Eigen::Matrix3d> fs(Fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d sv = fs.singularValues();
    sv(2) = 0.0;
    Fn = fs.matrixU() * sv.asDiagonal() * fs.matrixV().transpose();

    Eigen::Matrix3d F = T2.transpose() * Fn * T1;
    F /= F.norm();
    // Deterministic sign: largest-magnitude entry positive.
    int r = 0, c = 0;
    F.cwiseAbs().maxCoeff(&r, &c);
    if (F(r, c) < 0.0) F = -F;
    return F;
}

RansacResult estimate_fundamental_ransac(const std::vector<Correspondence>& pairs,
                                         double threshold_px, int max_iters,
                                         std::uint64_t seed) {
    return ransac_impl(pairs, threshold_px, max_iters, seed, true);
}

RansacResult estimate_fundamental_ransac_serial(
    const std::vector<Correspondence>& pairs, double threshold_px, int max_iters,
    std::uint64_t seed) {
    return ransac_impl(pairs, threshold_px, max_iters, seed, false);
}

std::vector<Correspondence> filter_outliers(const std::vector<Correspondence>& pairs,
                                            const Eigen::Matrix3d& F,
                                            double threshold_px) {
    std::vector<Correspondence> kept;
    for (const auto& c : pairs)
        if (epipolar_distance(F, c.p1, c.p2) <= threshold_px) kept.push_back(c);
    return kept;
}

}  // namespace cbfnav::vision
