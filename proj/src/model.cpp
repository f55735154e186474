#include "sc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sc/rng.hpp"

namespace sc {

void ModelParams::validate() const {
  if (w_tilde.size() == 0) throw std::invalid_argument("ModelParams: empty dictionary");
  for (Eigen::Index h = 0; h < w_tilde.cols(); ++h) {
    const double norm = w_tilde.col(h).norm();
    if (std::abs(norm - 1.0) > 1e-10) {
      throw std::invalid_argument("ModelParams: column " + std::to_string(h) +
                                  " has norm " + std::to_string(norm));
    }
  }
  for (Eigen::Index h = 0; h < lambdas.size(); ++h) {
    if (!(lambdas[h] > 0.0)) {
      throw std::invalid_argument("ModelParams: lambda " + std::to_string(h) +
                                  " must be positive");
    }
  }
  if (static_cast<int>(lambdas.size()) != latent_dim()) {
    throw std::invalid_argument("ModelParams: lambda size does not match dictionary");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("ModelParams: sigma2 must be positive");
}

Mat normalize_columns(const DictionaryPreimage& preimage) {
  Mat out = preimage.v;
  for (Eigen::Index h = 0; h < out.cols(); ++h) {
    const double norm = out.col(h).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("normalize_columns: column " + std::to_string(h) +
                                  " is zero");
    }
    out.col(h) /= norm;
  }
  return out;
}

Mat FullPosterior::cholesky() const {
  const Eigen::Index h = chol_store.rows();
  Mat chol = Mat::Zero(h, h);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < r; ++c) chol(r, c) = chol_store(r, c);
    chol(r, r) = std::exp(chol_store(r, r));
  }
  return chol;
}

FullPosterior FullPosterior::from_cholesky(const Vec& nu, const Mat& chol) {
  const Eigen::Index h = chol.rows();
  FullPosterior p;
  p.nu = nu;
  p.chol_store = Mat::Zero(h, h);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < r; ++c) p.chol_store(r, c) = chol(r, c);
    if (!(chol(r, r) > 0.0)) {
      throw std::invalid_argument("FullPosterior: Cholesky diagonal must be positive");
    }
    p.chol_store(r, r) = std::log(chol(r, r));
  }
  return p;
}

FullPosterior FullPosterior::identity(int latent_dim) {
  FullPosterior p;
  p.nu = Vec::Zero(latent_dim);
  p.chol_store = Mat::Zero(latent_dim, latent_dim);  // log(1) diagonal
  return p;
}

DiagonalPosterior DiagonalPosterior::identity(int latent_dim) {
  return DiagonalPosterior{Vec::Zero(latent_dim), Vec::Zero(latent_dim)};
}

LowRankPosterior LowRankPosterior::identity(int latent_dim, int rank) {
  if (rank < 1) throw std::invalid_argument("LowRankPosterior: rank must be >= 1");
  return LowRankPosterior{Vec::Zero(latent_dim), Mat::Zero(latent_dim, rank),
                          Vec::Zero(latent_dim)};
}

PosteriorVariant variant_of(const PosteriorParams& p) {
  if (std::holds_alternative<FullPosterior>(p)) return PosteriorVariant::Full;
  if (std::holds_alternative<DiagonalPosterior>(p)) return PosteriorVariant::Diagonal;
  return PosteriorVariant::LowRank;
}

int latent_dim_of(const PosteriorParams& p) {
  return static_cast<int>(mean_of(p).size());
}

Mat covariance_of(const PosteriorParams& p) {
  if (const auto* full = std::get_if<FullPosterior>(&p)) {
    const Mat chol = full->cholesky();
    return chol * chol.transpose();
  }
  if (const auto* diag = std::get_if<DiagonalPosterior>(&p)) {
    return diag->tau().array().square().matrix().asDiagonal();
  }
  const auto& lr = std::get<LowRankPosterior>(p);
  Mat t = lr.v_factor * lr.v_factor.transpose();
  t.diagonal() += (2.0 * lr.log_s).array().exp().matrix();
  return t;
}

Vec marginal_std(const PosteriorParams& p) {
  if (const auto* full = std::get_if<FullPosterior>(&p)) {
    const Mat chol = full->cholesky();
    return chol.rowwise().norm();
  }
  if (const auto* diag = std::get_if<DiagonalPosterior>(&p)) {
    return diag->tau();
  }
  const auto& lr = std::get<LowRankPosterior>(p);
  return (lr.v_factor.rowwise().squaredNorm().array() +
          (2.0 * lr.log_s).array().exp())
      .sqrt();
}

const Vec& mean_of(const PosteriorParams& p) {
  return std::visit([](const auto& v) -> const Vec& { return v.nu; }, p);
}

int param_count(const PosteriorParams& p) {
  const int h = latent_dim_of(p);
  if (std::holds_alternative<FullPosterior>(p)) return h + h * (h + 1) / 2;
  if (std::holds_alternative<DiagonalPosterior>(p)) return 2 * h;
  const auto& lr = std::get<LowRankPosterior>(p);
  return 2 * h + h * static_cast<int>(lr.v_factor.cols());
}

Vec flatten(const PosteriorParams& p) {
  Vec flat(param_count(p));
  const int h = latent_dim_of(p);
  if (const auto* full = std::get_if<FullPosterior>(&p)) {
    flat.head(h) = full->nu;
    int k = h;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c <= r; ++c) flat[k++] = full->chol_store(r, c);
  } else if (const auto* diag = std::get_if<DiagonalPosterior>(&p)) {
    flat.head(h) = diag->nu;
    flat.tail(h) = diag->log_tau;
  } else {
    const auto& lr = std::get<LowRankPosterior>(p);
    const int rank = static_cast<int>(lr.v_factor.cols());
    flat.head(h) = lr.nu;
    int k = h;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < rank; ++c) flat[k++] = lr.v_factor(r, c);
    flat.tail(h) = lr.log_s;
  }
  return flat;
}

void unflatten(const Vec& flat, PosteriorParams& p) {
  if (flat.size() != param_count(p)) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  const int h = latent_dim_of(p);
  if (auto* full = std::get_if<FullPosterior>(&p)) {
    full->nu = flat.head(h);
    int k = h;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c <= r; ++c) full->chol_store(r, c) = flat[k++];
  } else if (auto* diag = std::get_if<DiagonalPosterior>(&p)) {
    diag->nu = flat.head(h);
    diag->log_tau = flat.tail(h);
  } else {
    auto& lr = std::get<LowRankPosterior>(p);
    const int rank = static_cast<int>(lr.v_factor.cols());
    lr.nu = flat.head(h);
    int k = h;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < rank; ++c) lr.v_factor(r, c) = flat[k++];
    lr.log_s = flat.tail(h);
  }
}

PosteriorSet PosteriorSet::identity(int n, int latent_dim, PosteriorVariant variant,
                                    int rank) {
  if (n < 1) throw std::invalid_argument("PosteriorSet: need at least one entry");
  PosteriorSet set;
  set.entries.reserve(n);
  for (int i = 0; i < n; ++i) {
    switch (variant) {
      case PosteriorVariant::Full:
        set.entries.emplace_back(FullPosterior::identity(latent_dim));
        break;
      case PosteriorVariant::Diagonal:
        set.entries.emplace_back(DiagonalPosterior::identity(latent_dim));
        break;
      case PosteriorVariant::LowRank:
        set.entries.emplace_back(LowRankPosterior::identity(latent_dim, rank));
        break;
    }
  }
  return set;
}

void PosteriorSet::validate() const {
  if (entries.empty()) throw std::invalid_argument("PosteriorSet: empty");
  const auto v = variant_of(entries.front());
  const int h = latent_dim_of(entries.front());
  for (const auto& e : entries) {
    if (variant_of(e) != v || latent_dim_of(e) != h) {
      throw std::invalid_argument("PosteriorSet: inconsistent entries");
    }
  }
}

Mat round_to_float32(const Mat& m) {
  return m.cast<float>().cast<double>();
}

Dataset sample_generative(const Mat& w, const Vec& lambdas, double sigma2, int n,
                          std::uint64_t seed) {
  const int d = static_cast<int>(w.rows());
  const int h = static_cast<int>(w.cols());
  Mat x(n, d);
  Rng rng(seed);
  Vec z(h);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) z[j] = rng.laplace(lambdas[j]);
    Vec row = w * z;
    const double noise = std::sqrt(sigma2);
    for (int j = 0; j < d; ++j) row[j] += noise * rng.normal();
    x.row(i) = row;
  }
  Dataset ds;
  ds.x = round_to_float32(x);
  ds.source = DataSource::Imported;
  ds.seed = seed;
  return ds;
}

Dataset sample_generative(const ModelParams& theta, int n, std::uint64_t seed) {
  theta.validate();
  return sample_generative(theta.w_tilde, theta.lambdas, theta.sigma2, n, seed);
}

}  // namespace sc
