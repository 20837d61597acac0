// Copyright (c) 2026 The vcaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vcaug/bottleneck.hpp"

#include <cmath>
#include <limits>

namespace vcaug {

namespace {

int64_t total_frames(const std::vector<FeatureSequence>& fs) {
  int64_t n = 0;
  for (const auto& f : fs) n += f.n_frames();
  return n;
}

MatF gather_frames(const std::vector<FeatureSequence>& fs) {
  require(!fs.empty(), "no feature sequences given");
  const int dim = fs.front().dim();
  const int64_t n = total_frames(fs);
  MatF x(n, dim);
  int64_t at = 0;
  for (const auto& f : fs) {
    require(f.dim() == dim, "feature dimension mismatch in collection");
    x.middleRows(at, f.n_frames()) = f.vectors;
    at += f.n_frames();
  }
  return x;
}

}  // namespace

NormalizationStats fit_stats(const std::vector<FeatureSequence>& features) {
  require(!features.empty() && total_frames(features) >= 1,
          "fit_stats: need at least one frame");
  const int dim = features.front().dim();
  const int64_t n = total_frames(features);

  VecD sum = VecD::Zero(dim);
  for (const auto& f : features) {
    require(f.dim() == dim, "fit_stats: feature dimension mismatch");
    sum += f.vectors.cast<double>().colwise().sum().transpose();
  }
  VecD mean = sum / static_cast<double>(n);

  VecD sq = VecD::Zero(dim);
  for (const auto& f : features) {
    MatD centered = f.vectors.cast<double>();
    centered.rowwise() -= mean.transpose();
    sq += centered.array().square().colwise().sum().matrix().transpose();
  }

  NormalizationStats st;
  st.mean = std::move(mean);
  st.variance = (sq / static_cast<double>(n)).cwiseMax(0.0);
  st.n_frames = n;
  return st;
}

NormalizationStats fit_stats(const FeatureSequence& features) {
  return fit_stats(std::vector<FeatureSequence>{features});
}

FeatureSequence normalize(const FeatureSequence& f,
                          const NormalizationStats& stats) {
  require(f.dim() == stats.dim(), "normalize: dimension mismatch");
  require(stats.mean.allFinite() && stats.variance.allFinite(),
          "normalize: non-finite stats");
  const VecD denom =
      (stats.variance.array() + kNormalizeEps).sqrt().matrix();
  FeatureSequence out = f;
  MatD x = f.vectors.cast<double>();
  x.rowwise() -= stats.mean.transpose();
  x.array().rowwise() /= denom.transpose().array();
  out.vectors = x.cast<float>();
  return out;
}

int nearest_centroid(const Eigen::Ref<const RowVec<float>>& frame,
                     const Codebook& cb) {
  require(frame.cols() == cb.dim(), "quantize: dimension mismatch");
  int best = 0;
  float best_d = std::numeric_limits<float>::infinity();
  for (int i = 0; i < cb.k(); ++i) {
    const float d = (frame - cb.centroids.row(i)).squaredNorm();
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = i;
    }
  }
  return best;
}

FeatureSequence quantize(const FeatureSequence& f, const Codebook& cb) {
  require(f.dim() == cb.dim(), "quantize: dimension mismatch");
  FeatureSequence out = f;
  for (int t = 0; t < f.n_frames(); ++t)
    out.vectors.row(t) = cb.centroids.row(nearest_centroid(f.vectors.row(t), cb));
  return out;
}

Codebook fit_codebook(const std::vector<FeatureSequence>& features, int k,
                      uint64_t seed, const KmeansOptions& opt) {
  require(k >= 1, "fit_codebook: k must be >= 1");
  MatF x = gather_frames(features);
  const int64_t n = x.rows();
  const int dim = static_cast<int>(x.cols());
  require(n >= k, "fit_codebook: fewer frames than clusters");

  Rng rng(seed);

  // k-means++ seeding.
  MatF centroids(k, dim);
  std::uniform_int_distribution<int64_t> first(0, n - 1);
  centroids.row(0) = x.row(first(rng));
  VecF d2 = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = static_cast<double>(d2.sum());
    int64_t pick = 0;
    if (total > 0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      double acc = 0.0;
      for (int64_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centroids.row(c) = x.row(pick);
    d2 = d2.cwiseMin(
        (x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(n, -1);
  double prev_inertia = std::numeric_limits<double>::infinity();
  double inertia = prev_inertia;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    // Assignment (ties to lowest index).
    inertia = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      int best = 0;
      float best_d = std::numeric_limits<float>::infinity();
      for (int c = 0; c < k; ++c) {
        const float d = (x.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      inertia += best_d;
    }

    // Update (double accumulation).
    MatD sums = MatD::Zero(k, dim);
    std::vector<int64_t> counts(k, 0);
    for (int64_t i = 0; i < n; ++i) {
      sums.row(assign[i]) += x.row(i).cast<double>();
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) =
            (sums.row(c) / static_cast<double>(counts[c])).cast<float>();
      } else {
        // Re-seed an empty cluster at the point farthest from its centroid.
        int64_t far = 0;
        float far_d = -1.0f;
        for (int64_t i = 0; i < n; ++i) {
          const float d =
              (x.row(i) - centroids.row(assign[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = x.row(far);
      }
    }

    if (prev_inertia < std::numeric_limits<double>::infinity()) {
      const double rel =
          std::abs(prev_inertia - inertia) / std::max(prev_inertia, 1e-12);
      if (rel < opt.relative_tolerance) {
        ++iter;
        break;
      }
    }
    prev_inertia = inertia;
  }

  // Centroids must be pairwise distinct; nudge exact duplicates apart.
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if (centroids.row(a) == centroids.row(b)) {
        std::normal_distribution<double> jitter(0.0, 1e-5);
        for (int dd = 0; dd < dim; ++dd)
          centroids(b, dd) += static_cast<float>(jitter(rng));
      }
    }
  }

  Codebook cb;
  cb.centroids = std::move(centroids);
  cb.fit_metadata.n_training_frames = n;
  cb.fit_metadata.iterations = iter;
  cb.fit_metadata.inertia = inertia;
  cb.fit_metadata.seed = seed;
  return cb;
}

}  // namespace vcaug
