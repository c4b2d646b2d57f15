#include <cmath>
#include <unordered_map>

#include "cbfnav/vision.hpp"

namespace cbfnav::vision {

int grid_id_for(double u, double v, int cell_size, int grid_cols) {
    return static_cast<int>(std::floor(u / cell_size)) * grid_cols +
           static_cast<int>(std::floor(v / cell_size));
}

Matches match_features(const FeatureSet& prev, const FeatureSet& curr,
                       double cos_threshold) {
    if (prev.features.empty() || curr.features.empty())
        throw std::invalid_argument("match_features: empty feature set");

    std::unordered_map<int, std::vector<int>> curr_by_grid;
    for (int j = 0; j < static_cast<int>(curr.features.size()); ++j)
        curr_by_grid[curr.features[j].grid_id].push_back(j);
    std::unordered_map<int, std::vector<int>> prev_by_grid;
    for (int i = 0; i < static_cast<int>(prev.features.size()); ++i)
        prev_by_grid[prev.features[i].grid_id].push_back(i);

    auto nearest = [](const Feature& f, const std::vector<Feature>& pool,
                      const std::vector<int>& candidates, double& best_dist) {
        int best = -1;
        best_dist = std::numeric_limits<double>::infinity();
        for (int c : candidates) {
            const double d = (f.descriptor - pool[c].descriptor).norm();
            if (d < best_dist) {
                best_dist = d;
                best = c;
            }
        }
        return best;
    };

    Matches out;
    for (int i = 0; i < static_cast<int>(prev.features.size()); ++i) {
        const Feature& fp = prev.features[i];
        const auto it = curr_by_grid.find(fp.grid_id);
        if (it == curr_by_grid.end()) continue;
        double dist_fwd = 0.0;
        const int j = nearest(fp, curr.features, it->second, dist_fwd);
        if (j < 0) continue;

        const Feature& fc = curr.features[j];
        double dist_bwd = 0.0;
        const int i_back = nearest(fc, prev.features, prev_by_grid[fc.grid_id], dist_bwd);
        if (i_back != i) continue;

        const double np = fp.direction.norm();
        const double nc = fc.direction.norm();
        const double cosine = (np > 0.0 && nc > 0.0)
                                  ? fp.direction.dot(fc.direction) / (np * nc)
                                  : -1.0;
        if (cosine < cos_threshold) continue;
        out.pairs.push_back({i, j, dist_fwd, cosine});
    }
    return out;
}

}  // namespace cbfnav::vision
