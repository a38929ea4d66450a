#pragma once

#include <cstdint>
#include <vector>

#include "koss/linalg.hpp"
#include "koss/rng.hpp"
#include "koss/sdu.hpp"
#include "koss/tensor.hpp"

namespace koss {
namespace layer {

enum class DiscretizeMode { kEuler, kExpm };

// phi: scalar innovation -> N-vector gain, two-layer net with silu hidden
// and tanh output scaled into (-scale, scale).
struct GainNet {
  std::vector<double> w1;  // hidden x 1
  std::vector<double> b1;  // hidden
  Matrix w2;               // n_state x hidden
  std::vector<double> b2;  // n_state
  double scale = 0.5;
};

struct KossParams {
  int d_model = 0;
  int n_state = 0;

  Matrix a_log;                  // d_model x n_state; A = -exp(a_log), diagonal
  std::vector<double> w_delta;   // d_model; Delta = softplus(b_delta + x * w_delta)
  std::vector<double> b_delta;   // d_model
  Matrix w_c;                    // n_state x d_model; C_t = w_c x_t, shared across channels
  GainNet gain;
  bool gain_from_input = false;  // ablation: feed x_t instead of the innovation
  DiscretizeMode disc_mode = DiscretizeMode::kEuler;
  sdu::SpectralConfig spectral;  // n is set to the sequence length per call

  Matrix out_proj;               // d_model x d_model (block output path)
  Matrix mlp_w1;                 // mlp_hidden x d_model
  std::vector<double> mlp_b1;
  Matrix mlp_w2;                 // d_model x mlp_hidden
  std::vector<double> mlp_b2;

  std::vector<double> a_diag_row(int channel) const;  // -exp(a_log[channel, :])

  // Stable defaults: A spans [-1, -1/N] log-uniformly, softplus(b_delta) in
  // [1e-3, 1e-1], small-normal projections, soft half-Nyquist mask.
  static KossParams init(int d_model, int n_state, int mlp_hidden, CounterRng& rng);
};

struct LayerState {
  Tensor h;      // B x D x N, state at the last processed position
  Tensor h_ctx;  // B x D x N, boundary state feeding the next segment's innovation
};

// Discrete per-step dynamics h' = a_bar h + b_bar x + k dx.
struct StepDynamics {
  SquareMatrix a_bar;
  std::vector<double> b_bar;
  std::vector<double> k;
};

// Innov = x_t - c_t . h_ctx.
double innovation(double x_t, const std::vector<double>& c_t, const std::vector<double>& h_ctx);

// K = scale * tanh(w2 silu(w1 innov + b1) + b2).
std::vector<double> gain_net(double innov, const GainNet& net);

struct Dynamics {
  SquareMatrix a_k;
  std::vector<double> b_k;
};

// A_K = M (I + K C), B_K = -M K with M = A - K (C A); assembled from the
// diagonal and rank-one pieces in O(N^2).
Dynamics build_dynamics(const std::vector<double>& a_diag, const std::vector<double>& k,
                        const std::vector<double>& c_row);

// euler: I + delta A_K / delta B_K. expm: exp(delta A_K) and the exact ZOH
// input map, series fallback for near-singular A_K with ||delta A_K|| < 0.5.
StepDynamics discretize(const SquareMatrix& a_k, const std::vector<double>& b_k, double delta,
                        DiscretizeMode mode);

std::vector<double> recurrence_step(const std::vector<double>& h, double x_t, double dx_t,
                                    const StepDynamics& dyn);

struct LayerOutput {
  Tensor y;  // B x L x D
  LayerState final_state;
};

// Full segment-wise layer: SDU derivative over the whole sequence, innovation
// against the previous segment's boundary state, gain -> dynamics ->
// segment-wise scan, y_t = C_t . h_t.
LayerOutput layer_forward(const Tensor& x, const KossParams& params, int64_t segment_len);

// x + out_proj(layer(x)), then a residual two-layer silu MLP.
Tensor block_forward(const Tensor& x, const KossParams& params, int64_t segment_len);

}  // namespace layer
}  // namespace koss
