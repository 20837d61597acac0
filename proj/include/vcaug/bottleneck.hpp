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
//
// Block Q: per-speaker feature normalization followed by nearest-centroid
// quantization against a precomputed K-means codebook.

#pragma once

#include <cstdint>
#include <vector>

#include "vcaug/common.hpp"
#include "vcaug/features.hpp"

namespace vcaug {

inline constexpr double kNormalizeEps = 1e-8;

struct NormalizationStats {
  VecD mean;      // per dimension
  VecD variance;  // population variance, per dimension
  int64_t n_frames = 0;

  int dim() const { return static_cast<int>(mean.size()); }
};

struct CodebookMeta {
  int64_t n_training_frames = 0;
  int iterations = 0;
  double inertia = 0.0;
  bool normalized_input = true;
  uint64_t seed = 0;
};

struct Codebook {
  MatF centroids;  // [K x dim]
  CodebookMeta fit_metadata;

  int k() const { return static_cast<int>(centroids.rows()); }
  int dim() const { return static_cast<int>(centroids.cols()); }
};

// Exact two-pass population mean/variance over every frame of the
// collection. Empty input is a validation error.
NormalizationStats fit_stats(const std::vector<FeatureSequence>& features);
NormalizationStats fit_stats(const FeatureSequence& features);

// (f - mean) / sqrt(variance + 1e-8), per dimension.
FeatureSequence normalize(const FeatureSequence& f,
                          const NormalizationStats& stats);

struct KmeansOptions {
  int max_iterations = 100;
  double relative_tolerance = 1e-6;
};

// Standard K-means with k-means++ init and a fixed seed. Total frames
// must be >= k.
Codebook fit_codebook(const std::vector<FeatureSequence>& features, int k,
                      uint64_t seed, const KmeansOptions& opt = {});

// Index of the nearest centroid by Euclidean distance; ties break to the
// lowest index.
int nearest_centroid(const Eigen::Ref<const RowVec<float>>& frame,
                     const Codebook& cb);

// Replaces every frame by its nearest centroid (bit-equal to a codebook
// row). Idempotent.
FeatureSequence quantize(const FeatureSequence& f, const Codebook& cb);

}  // namespace vcaug
