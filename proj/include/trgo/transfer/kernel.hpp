#pragma once

// Kernels, the stacked feature set of two domains, the MMD coefficient
// matrix L and the discrepancy tr(K L).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "trgo/error.hpp"

namespace trgo::transfer {

enum class KernelKind { gaussian, linear };

inline const char* to_string(KernelKind k) { return k == KernelKind::gaussian ? "gaussian" : "linear"; }

inline KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "linear") return KernelKind::linear;
  throw ParameterError("unknown kernel " + name);
}

struct KernelConfig {
  KernelKind kind = KernelKind::gaussian;
  double bandwidth = 0.0;  // sigma; <= 0 selects the median heuristic

  bool median_heuristic() const { return !(bandwidth > 0.0); }
  bool operator==(const KernelConfig&) const = default;
};

enum class FeatureKind { objective_space, genome_space };

inline const char* to_string(FeatureKind k) {
  return k == FeatureKind::objective_space ? "objective" : "genome";
}

inline FeatureKind parse_feature_kind(const std::string& name) {
  if (name == "objective") return FeatureKind::objective_space;
  if (name == "genome") return FeatureKind::genome_space;
  throw ParameterError("unknown feature kind " + name + " (expected objective or genome)");
}

struct FeatureSet {
  std::vector<Eigen::VectorXd> source;
  std::vector<Eigen::VectorXd> target;
  FeatureKind kind = FeatureKind::objective_space;

  std::size_t m() const { return source.size(); }
  std::size_t n() const { return target.size(); }
  std::size_t total() const { return source.size() + target.size(); }
  Eigen::Index dim() const { return source.empty() ? 0 : source.front().size(); }

  void validate() const {
    if (source.empty() || target.empty()) throw ParameterError("both domains need at least one sample");
    const auto d = dim();
    if (d == 0) throw ParameterError("features must have at least one component");
    for (const auto* side : {&source, &target}) {
      for (const auto& v : *side) {
        if (v.size() != d) throw ParameterError("feature dimensions differ");
        if (!v.allFinite()) throw ParameterError("feature vector is not finite");
      }
    }
  }

  /// Source samples first, then target samples.
  std::vector<Eigen::VectorXd> stacked() const {
    std::vector<Eigen::VectorXd> all = source;
    all.insert(all.end(), target.begin(), target.end());
    return all;
  }
};

inline double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          const KernelConfig& cfg) {
  if (x.size() != y.size()) throw ParameterError("kernel arguments differ in dimension");
  if (cfg.kind == KernelKind::linear) return x.dot(y);
  if (cfg.median_heuristic()) throw ParameterError("gaussian kernel needs a resolved bandwidth");
  return std::exp(-(x - y).squaredNorm() / (2.0 * cfg.bandwidth * cfg.bandwidth));
}

/// Median of the pairwise Euclidean distances; 1 when every distance is 0.
inline double median_bandwidth(const std::vector<Eigen::VectorXd>& samples) {
  std::vector<double> dist;
  dist.reserve(samples.size() * (samples.size() - 1) / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) dist.push_back((samples[i] - samples[j]).norm());
  }
  if (dist.empty()) return 1.0;
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  double med = *mid;
  if (dist.size() % 2 == 0) med = 0.5 * (med + *std::max_element(dist.begin(), mid));
  return med > 0.0 ? med : 1.0;
}

/// Copy of cfg with the median heuristic replaced by a concrete bandwidth.
inline KernelConfig resolve_kernel(const KernelConfig& cfg, const FeatureSet& feats) {
  KernelConfig out = cfg;
  if (out.kind == KernelKind::gaussian && out.median_heuristic()) {
    out.bandwidth = median_bandwidth(feats.stacked());
  }
  return out;
}

inline Eigen::MatrixXd kernel_matrix(const std::vector<Eigen::VectorXd>& a,
                                     const std::vector<Eigen::VectorXd>& b,
                                     const KernelConfig& cfg) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel_eval(a[i], b[j], cfg);
    }
  }
  return k;
}

/// [K_ss K_st; K_ts K_tt] over the stacked samples. `cfg` must be resolved.
inline Eigen::MatrixXd build_kernel_matrix(const FeatureSet& feats, const KernelConfig& cfg) {
  feats.validate();
  const auto all = feats.stacked();
  const auto n = static_cast<Eigen::Index>(all.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = kernel_eval(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(i)], cfg);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_eval(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)], cfg);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

inline Eigen::MatrixXd build_L(std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) throw ParameterError("build_L needs m, n >= 1");
  const auto mi = static_cast<Eigen::Index>(m), ni = static_cast<Eigen::Index>(n);
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  Eigen::MatrixXd l(mi + ni, mi + ni);
  l.topLeftCorner(mi, mi).setConstant(1.0 / (dm * dm));
  l.bottomRightCorner(ni, ni).setConstant(1.0 / (dn * dn));
  l.topRightCorner(mi, ni).setConstant(-1.0 / (dm * dn));
  l.bottomLeftCorner(ni, mi).setConstant(-1.0 / (dm * dn));
  return l;
}

/// H = I - 11^T / N.
inline Eigen::MatrixXd centering_matrix(std::size_t total) {
  const auto n = static_cast<Eigen::Index>(total);
  return Eigen::MatrixXd::Identity(n, n) -
         Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(total));
}

/// tr(K L). A median-heuristic config is resolved against `feats` first.
inline double mmd(const FeatureSet& feats, const KernelConfig& cfg) {
  const auto kc = resolve_kernel(cfg, feats);
  const Eigen::MatrixXd k = build_kernel_matrix(feats, kc);
  const Eigen::MatrixXd l = build_L(feats.m(), feats.n());
  return (k.cwiseProduct(l.transpose())).sum();
}

}  // namespace trgo::transfer
