#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cbfnav/vision.hpp"

using namespace cbfnav::vision;

namespace {

FeatureSet random_set(int n, std::mt19937& rng, int dim = 16) {
    std::uniform_real_distribution<double> upix(0.0, 639.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FeatureSet fs;
    for (int i = 0; i < n; ++i) {
        Feature f;
        f.u = upix(rng);
        f.v = upix(rng) * 479.0 / 639.0;
        f.descriptor.resize(dim);
        for (int k = 0; k < dim; ++k) f.descriptor(k) = gauss(rng);
        const double ang = gauss(rng);
        f.direction = Eigen::Vector2d(std::cos(ang), std::sin(ang));
        f.grid_id = grid_id_for(f.u, f.v, fs.cell_size, fs.grid_cols);
        fs.features.push_back(std::move(f));
    }
    return fs;
}

}  // namespace

TEST_CASE("grid id layout is unique per cell") {
    const int cell = 40, cols = 12;
    CHECK(grid_id_for(0, 0, cell, cols) == 0);
    CHECK(grid_id_for(39.9, 39.9, cell, cols) == 0);
    CHECK(grid_id_for(40.0, 0, cell, cols) == 12);
    CHECK(grid_id_for(0, 40.0, cell, cols) == 1);
    CHECK(grid_id_for(639, 479, cell, cols) == 15 * 12 + 11);
}

TEST_CASE("identity matching: every feature matches itself at distance zero") {
    std::mt19937 rng(9);
    const FeatureSet fs = random_set(120, rng);
    const Matches m = match_features(fs, fs, 0.9);
    CHECK(m.pairs.size() == fs.features.size());
    for (const auto& p : m.pairs) {
        CHECK(p.i_prev == p.j_curr);
        CHECK(p.distance == doctest::Approx(0.0));
        CHECK(p.cosine == doctest::Approx(1.0));
    }
}

TEST_CASE("pairs below the cosine threshold are discarded") {
    FeatureSet prev, curr;
    Feature a;
    a.u = a.v = 10.0;
    a.descriptor = Eigen::VectorXd::Zero(4);
    a.direction = Eigen::Vector2d(1, 0);
    a.grid_id = grid_id_for(a.u, a.v, prev.cell_size, prev.grid_cols);
    Feature b = a;
    b.direction = Eigen::Vector2d(-1, 0);  // opposite direction
    prev.features.push_back(a);
    curr.features.push_back(b);
    CHECK(match_features(prev, curr, 0.5).pairs.empty());
    b.direction = Eigen::Vector2d(1, 0);
    curr.features[0] = b;
    CHECK(match_features(prev, curr, 0.5).pairs.size() == 1);
}

TEST_CASE("permuted set with distinct descriptors: permutation recovered exactly") {
    std::mt19937 rng(21);
    const FeatureSet prev = random_set(150, rng);
    std::vector<int> perm(prev.features.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::shuffle(perm.begin(), perm.end(), rng);
    FeatureSet curr = prev;
    for (std::size_t i = 0; i < perm.size(); ++i)
        curr.features[perm[i]] = prev.features[i];

    const Matches m = match_features(prev, curr, 0.99);
    CHECK(m.pairs.size() == prev.features.size());
    for (const auto& p : m.pairs) CHECK(p.j_curr == perm[p.i_prev]);

    // Brute-force all-pairs nearest check (restricted to equal grids, which
    // the permutation preserves).
    for (const auto& p : m.pairs) {
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (int j = 0; j < static_cast<int>(curr.features.size()); ++j) {
            if (curr.features[j].grid_id != prev.features[p.i_prev].grid_id) continue;
            const double d =
                (prev.features[p.i_prev].descriptor - curr.features[j].descriptor).norm();
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        CHECK(best_j == p.j_curr);
    }
}

TEST_CASE("matches are one-to-one") {
    std::mt19937 rng(33);
    // Clustered positions force shared grid cells.
    FeatureSet prev = random_set(80, rng, 3);
    FeatureSet curr = random_set(80, rng, 3);
    for (auto& f : curr.features) {
        f.u = std::min(f.u, 79.0);
        f.v = std::min(f.v, 79.0);
        f.grid_id = grid_id_for(f.u, f.v, curr.cell_size, curr.grid_cols);
    }
    for (auto& f : prev.features) {
        f.u = std::min(f.u, 79.0);
        f.v = std::min(f.v, 79.0);
        f.grid_id = grid_id_for(f.u, f.v, prev.cell_size, prev.grid_cols);
    }
    const Matches m = match_features(prev, curr, -1.0);
    std::vector<int> seen_i, seen_j;
    for (const auto& p : m.pairs) {
        CHECK(std::find(seen_i.begin(), seen_i.end(), p.i_prev) == seen_i.end());
        CHECK(std::find(seen_j.begin(), seen_j.end(), p.j_curr) == seen_j.end());
        seen_i.push_back(p.i_prev);
        seen_j.push_back(p.j_curr);
    }
}

TEST_CASE("empty feature sets are rejected") {
    std::mt19937 rng(1);
    const FeatureSet fs = random_set(5, rng);
    CHECK_THROWS_AS((void)match_features(FeatureSet{}, fs, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)match_features(fs, FeatureSet{}, 0.5), std::invalid_argument);
}

TEST_CASE("scene feature sets carry consistent grid ids") {
    SceneSpec spec;
    spec.n_landmarks = 60;
    const SyntheticScene scene = generate_scene(spec, 77);
    for (const auto& fs : scene.feature_sets)
        for (const auto& f : fs.features)
            CHECK(f.grid_id == grid_id_for(f.u, f.v, fs.cell_size, fs.grid_cols));
}
