#pragma once

#include <cstdint>

#include "sc/model.hpp"

namespace sc {

// Deep encoder mapping a datapoint to variational parameters: a linear
// projection into the trunk width, two additive residual blocks
// (h <- h + tanh(A h + c)), and separate linear heads. The diagonal head
// emits log tau; the low-rank heads emit the factor rows and log s.
struct EncoderParams {
  PosteriorVariant variant = PosteriorVariant::Diagonal;
  int rank = 5;  // LowRank only

  Mat input_proj;  // hidden x D
  Vec input_bias;
  Mat block1;      // hidden x hidden
  Vec block1_bias;
  Mat block2;
  Vec block2_bias;
  Mat head_nu;     // H x hidden
  Vec head_nu_bias;
  Mat head_cov;    // Diagonal: H x hidden (log tau); LowRank: (H r) x hidden (factor, row-major)
  Vec head_cov_bias;
  Mat head_logs;   // LowRank only: H x hidden
  Vec head_logs_bias;

  int input_dim() const { return static_cast<int>(input_proj.cols()); }
  int hidden_dim() const { return static_cast<int>(input_proj.rows()); }
  int latent_dim() const { return static_cast<int>(head_nu.rows()); }

  // Trunk and nu head get uniform(-1, 1)/sqrt(fan_in) weights, biases are
  // zero, and the covariance heads start at zero so the initial posterior has
  // unit covariance.
  static EncoderParams init(PosteriorVariant variant, int input_dim, int hidden_dim,
                            int latent_dim, int rank, std::uint64_t seed);

  int param_count() const;
  Vec flatten() const;
  void unflatten(const Vec& flat);
};

PosteriorParams encode(const EncoderParams& params, const Vec& x);

// Gradients of <upstream, encode(params, x)> with respect to the encoder
// parameters, where upstream is laid out like the posterior's flat parameter
// vector (model.hpp). Returned in EncoderParams::flatten layout.
Vec encode_backward(const EncoderParams& params, const Vec& x, const Vec& upstream);

}  // namespace sc
