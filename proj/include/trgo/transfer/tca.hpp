#pragma once

// Transfer component analysis: W spans the d leading generalized
// eigenvectors of (K H K, K L K + mu I), scaled so W^T K H K W = I.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/transfer/kernel.hpp"

namespace trgo::transfer {

inline constexpr double kTcaTolerance = 1e-6;

struct TcaOptions {
  std::size_t d = 20;
  double mu = 0.5;
  // Eigenvalues at or below rel_eigen_floor * largest are treated as zero.
  double rel_eigen_floor = 1e-12;
  // Shrink d to the number of usable components instead of failing.
  bool clip_to_rank = false;

  void validate() const {
    if (d < 1) throw ParameterError("latent dimension must be >= 1");
    if (!(mu > 0.0)) throw ParameterError("mu must be > 0");
  }
};

struct TransferModel {
  Eigen::MatrixXd W;                      // (m+n) x d
  std::vector<Eigen::VectorXd> stacked;   // m source then n target samples
  std::size_t m = 0;
  std::size_t n = 0;
  KernelConfig kernel;                    // resolved
  FeatureKind feature_kind = FeatureKind::objective_space;
  std::size_t d = 0;
  double mu = 0.5;
  Eigen::VectorXd eigenvalues;            // descending, length d

  Eigen::Index feature_dim() const { return stacked.empty() ? 0 : stacked.front().size(); }

  bool operator==(const TransferModel& o) const {
    if (m != o.m || n != o.n || d != o.d || mu != o.mu || !(kernel == o.kernel) ||
        feature_kind != o.feature_kind || stacked.size() != o.stacked.size()) {
      return false;
    }
    for (std::size_t i = 0; i < stacked.size(); ++i) {
      if (stacked[i] != o.stacked[i]) return false;
    }
    return W == o.W && eigenvalues == o.eigenvalues;
  }
};

inline Eigen::MatrixXd constraint_matrix(const TransferModel& model) {
  FeatureSet f;
  f.source.assign(model.stacked.begin(), model.stacked.begin() + static_cast<std::ptrdiff_t>(model.m));
  f.target.assign(model.stacked.begin() + static_cast<std::ptrdiff_t>(model.m), model.stacked.end());
  const Eigen::MatrixXd k = build_kernel_matrix(f, model.kernel);
  const Eigen::MatrixXd h = centering_matrix(model.m + model.n);
  return model.W.transpose() * (k * h * k) * model.W;
}

/// max |W^T K H K W - I|.
inline double constraint_error(const TransferModel& model) {
  const auto g = constraint_matrix(model);
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

inline TransferModel tca_fit(const FeatureSet& feats, const TcaOptions& opt,
                             const KernelConfig& cfg = {}) {
  feats.validate();
  opt.validate();
  const std::size_t total = feats.total();
  if (opt.d > total) {
    throw ParameterError("latent dimension " + std::to_string(opt.d) + " exceeds sample count " +
                         std::to_string(total));
  }
  const auto kc = resolve_kernel(cfg, feats);
  const Eigen::MatrixXd k = build_kernel_matrix(feats, kc);
  const Eigen::MatrixXd l = build_L(feats.m(), feats.n());
  const Eigen::MatrixXd h = centering_matrix(total);
  const auto nt = static_cast<Eigen::Index>(total);

  Eigen::MatrixXd a = k * h * k;
  Eigen::MatrixXd b = k * l * k + opt.mu * Eigen::MatrixXd::Identity(nt, nt);
  a = 0.5 * (a + a.transpose());
  b = 0.5 * (b + b.transpose());

  Eigen::LLT<Eigen::MatrixXd> chol(b);
  if (chol.info() != Eigen::Success) {
    b.diagonal().array() += 1e-10;
    chol.compute(b);
  }
  if (chol.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(b, Eigen::EigenvaluesOnly);
    const double lo = bs.eigenvalues().minCoeff(), hi = bs.eigenvalues().maxCoeff();
    throw FitFailure("K L K + mu I is not positive definite", lo > 0.0 ? hi / lo : INFINITY);
  }

  // Reduce to the standard problem C y = lambda y with C = L^-1 A L^-T.
  const auto& lower = chol.matrixL();
  Eigen::MatrixXd c = lower.solve(a);
  c = lower.solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw FitFailure("eigen decomposition did not converge", INFINITY);

  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const double top = evals[nt - 1];
  const double floor = std::max(0.0, top) * opt.rel_eigen_floor;
  std::size_t usable = 0;
  while (usable < total && evals[nt - 1 - static_cast<Eigen::Index>(usable)] > floor) ++usable;

  std::size_t d = opt.d;
  if (usable < d) {
    if (!opt.clip_to_rank || usable == 0) {
      const double smallest = evals[nt - static_cast<Eigen::Index>(opt.d)];
      throw FitFailure("only " + std::to_string(usable) + " of " + std::to_string(opt.d) +
                           " transfer components are numerically nonzero",
                       smallest > 0.0 ? top / smallest : INFINITY);
    }
    d = usable;
  }

  const auto di = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd y(nt, di);
  Eigen::VectorXd lambda(di);
  for (Eigen::Index i = 0; i < di; ++i) {
    lambda[i] = evals[nt - 1 - i];
    y.col(i) = es.eigenvectors().col(nt - 1 - i) / std::sqrt(lambda[i]);
  }

  TransferModel model;
  model.W = lower.transpose().solve(y);
  model.stacked = feats.stacked();
  model.m = feats.m();
  model.n = feats.n();
  model.kernel = kc;
  model.feature_kind = feats.kind;
  model.d = d;
  model.mu = opt.mu;
  model.eigenvalues = lambda;

  // Leading k x k blocks of W^T A W - I; with clip_to_rank, keep the longest
  // prefix that meets the tolerance.
  const Eigen::MatrixXd g = model.W.transpose() * a * model.W - Eigen::MatrixXd::Identity(di, di);
  std::size_t keep = 0;
  double prefix_err = 0.0;
  for (Eigen::Index k = 0; k < di; ++k) {
    prefix_err = std::max({prefix_err, g.row(k).head(k + 1).cwiseAbs().maxCoeff(),
                           g.col(k).head(k + 1).cwiseAbs().maxCoeff()});
    if (!(prefix_err < kTcaTolerance)) break;
    keep = static_cast<std::size_t>(k) + 1;
  }
  if (keep < d) {
    if (!opt.clip_to_rank || keep == 0) {
      const double err = g.cwiseAbs().maxCoeff();
      throw FitFailure("constraint W^T K H K W = I violated by " + std::to_string(err), top / lambda[di - 1]);
    }
    const auto ki = static_cast<Eigen::Index>(keep);
    model.W = model.W.leftCols(ki).eval();
    model.eigenvalues = model.eigenvalues.head(ki).eval();
    model.d = keep;
  }
  return model;
}

/// W^T kappa_p, kappa_p = [k(s_1, p), ..., k(s_{m+n}, p)].
inline Eigen::VectorXd tca_project(const TransferModel& model, const Eigen::VectorXd& p) {
  if (p.size() != model.feature_dim()) throw ParameterError("feature dimension does not match the model");
  Eigen::VectorXd kp(static_cast<Eigen::Index>(model.stacked.size()));
  for (std::size_t i = 0; i < model.stacked.size(); ++i) {
    kp[static_cast<Eigen::Index>(i)] = kernel_eval(model.stacked[i], p, model.kernel);
  }
  return model.W.transpose() * kp;
}

// ---------------------------------------------------------------------------
// Binary format: magic, u32 version, u64 m, n, feature dim, d, u32 kernel
// kind, u32 feature kind, f64 bandwidth, f64 mu, stacked samples row-major,
// eigenvalues, W row-major. Little-endian host layout.

inline constexpr char kModelMagic[8] = {'T', 'R', 'G', 'O', 'T', 'C', 'A', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated transfer model");
  return v;
}

}  // namespace detail

inline void write_transfer_model(std::ostream& out, const TransferModel& model) {
  out.write(kModelMagic, sizeof(kModelMagic));
  detail::put<std::uint32_t>(out, kModelVersion);
  detail::put<std::uint64_t>(out, model.m);
  detail::put<std::uint64_t>(out, model.n);
  detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(model.feature_dim()));
  detail::put<std::uint64_t>(out, model.d);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.kernel.kind));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.feature_kind));
  detail::put<double>(out, model.kernel.bandwidth);
  detail::put<double>(out, model.mu);
  for (const auto& s : model.stacked) {
    for (Eigen::Index j = 0; j < s.size(); ++j) detail::put<double>(out, s[j]);
  }
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) detail::put<double>(out, model.eigenvalues[i]);
  for (Eigen::Index r = 0; r < model.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.W.cols(); ++c) detail::put<double>(out, model.W(r, c));
  }
  if (!out) throw IoError("failed writing transfer model");
}

inline TransferModel read_transfer_model(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) throw IoError("not a transfer model file");
  if (detail::get<std::uint32_t>(in) != kModelVersion) throw IoError("unsupported transfer model version");
  TransferModel model;
  model.m = detail::get<std::uint64_t>(in);
  model.n = detail::get<std::uint64_t>(in);
  const auto dim = detail::get<std::uint64_t>(in);
  model.d = detail::get<std::uint64_t>(in);
  const auto kind = detail::get<std::uint32_t>(in);
  const auto fkind = detail::get<std::uint32_t>(in);
  if (kind > 1 || fkind > 1) throw IoError("corrupt transfer model header");
  model.kernel.kind = static_cast<KernelKind>(kind);
  model.feature_kind = static_cast<FeatureKind>(fkind);
  model.kernel.bandwidth = detail::get<double>(in);
  model.mu = detail::get<double>(in);
  const std::size_t total = model.m + model.n;
  if (total == 0 || dim == 0 || model.d == 0 || model.d > total || total > (1u << 24) || dim > (1u << 20)) {
    throw IoError("corrupt transfer model header");
  }
  model.stacked.resize(total, Eigen::VectorXd(static_cast<Eigen::Index>(dim)));
  for (auto& s : model.stacked) {
    for (Eigen::Index j = 0; j < s.size(); ++j) s[j] = detail::get<double>(in);
  }
  const auto di = static_cast<Eigen::Index>(model.d);
  model.eigenvalues.resize(di);
  for (Eigen::Index i = 0; i < di; ++i) model.eigenvalues[i] = detail::get<double>(in);
  model.W.resize(static_cast<Eigen::Index>(total), di);
  for (Eigen::Index r = 0; r < model.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < di; ++c) model.W(r, c) = detail::get<double>(in);
  }
  return model;
}

inline void save_transfer_model(const std::string& path, const TransferModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_transfer_model(out, model);
}

inline TransferModel load_transfer_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_transfer_model(in);
}

}  // namespace trgo::transfer
