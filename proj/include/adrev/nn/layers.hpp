#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "adrev/parameters.hpp"
#include "adrev/tensor.hpp"

namespace adrev::nn {

/// Training flag plus the generator that drives dropout masks.
struct ForwardContext {
  bool training = false;
  Rng* rng = nullptr;
};

/// Affine map on the last axis; inputs of any rank >= 2 are treated as rows.
struct Linear {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out], undefined when bias-free
  std::size_t in = 0;
  std::size_t out = 0;

  static Linear create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t out, bool bias,
                       Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

struct GluParams {
  Linear gate;   // W4, b4
  Linear value;  // W5, b5

  static GluParams create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t out, Rng& rng);
};

/// sigmoid(x W4 + b4) * (x W5 + b5)
Tensor glu(const Tensor& x, const GluParams& params);

struct GrnParams {
  Linear primary;                 // W2, b2
  std::optional<Linear> context;  // W3, bias-free
  Linear inner;                   // W1, b1
  GluParams gate;
  Tensor norm_gain;
  Tensor norm_bias;
  std::optional<Linear> resize;  // bias-free, only when in != out
  double dropout = 0.0;

  /// context_width == 0 builds a context-free network.
  static GrnParams create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t hidden,
                          std::size_t out, std::size_t context_width, double dropout, Rng& rng);
  std::size_t input_width() const { return primary.in; }
  std::size_t output_width() const { return norm_gain.numel(); }
};

/// LayerNorm(resize(a) + GLU(W1 ELU(W2 a + W3 c + b2) + b1)). The context,
/// when given, has one row per row of `a`.
Tensor grn(const Tensor& a, const Tensor* context, const GrnParams& params, const ForwardContext& ctx = {});

/// LayerNorm(skip + GLU(dropout(x))), the gated skip used between TFT stages.
struct GatedResidualParams {
  GluParams gate;
  Tensor norm_gain;
  Tensor norm_bias;
  double dropout = 0.0;

  static GatedResidualParams create(ParameterSet& ps, const std::string& name, std::size_t width, double dropout,
                                    Rng& rng);
};
Tensor gated_residual(const Tensor& x, const Tensor& skip, const GatedResidualParams& params,
                      const ForwardContext& ctx = {});

struct VsnParams {
  std::vector<int> cardinality;     // 0 for a real variable, vocabulary size otherwise
  std::vector<Linear> real_embed;   // populated for real variables only
  std::vector<Tensor> lookup;       // populated for categorical variables only
  std::vector<GrnParams> variable;  // one per variable
  GrnParams selection;
  std::size_t width = 0;

  static VsnParams create(ParameterSet& ps, const std::string& name, const std::vector<int>& cardinality,
                          std::size_t width, std::size_t context_width, double dropout, Rng& rng);
  std::size_t variables() const { return cardinality.size(); }
};

struct VsnOutput {
  Tensor combined;  // [N, width]
  Tensor weights;   // [N, m], rows on the simplex
};

/// Variable selection over raw inputs x [N, m]. Categorical columns hold
/// integer codes.
VsnOutput vsn(const Tensor& x, const Tensor* context, const VsnParams& params, const ForwardContext& ctx = {});

/// Gate columns are ordered input, forget, candidate, output.
struct LstmParams {
  Linear input;      // [in, 4h] with bias
  Linear recurrent;  // [h, 4h] with bias
  std::size_t hidden = 0;

  static LstmParams create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng);
};

struct LstmState {
  Tensor h;
  Tensor c;
};

LstmState lstm_cell_step(const Tensor& x, const LstmState& state, const LstmParams& params);
/// Same step with the input projection x W + b already applied.
LstmState lstm_cell_step_projected(const Tensor& projected, const LstmState& state, const LstmParams& params);

/// Stacked LSTM over a time-major sequence [T*B, in].
struct LstmStack {
  std::vector<LstmParams> layers;
  double dropout = 0.0;

  static LstmStack create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t hidden,
                          std::size_t layers, double dropout, Rng& rng);
  std::size_t hidden() const { return layers.front().hidden; }
};

struct SequenceResult {
  Tensor outputs;                  // [T*B, h] of the top layer, time-major
  std::vector<LstmState> final;    // per layer
};

SequenceResult run_lstm(const LstmStack& stack, const Tensor& inputs, std::size_t steps,
                        const std::vector<LstmState>& initial, const ForwardContext& ctx = {});
std::vector<LstmState> zero_states(const LstmStack& stack, std::size_t batch);

struct BahdanauParams {
  Linear query;  // decoder state -> attention width, bias-free
  Linear key;    // encoder state -> attention width, with bias
  Linear score;  // attention width -> 1, bias-free (the v vector)

  static BahdanauParams create(ParameterSet& ps, const std::string& name, std::size_t query_width,
                               std::size_t key_width, std::size_t attention_width, Rng& rng);
};

struct AttentionResult {
  Tensor context;  // [B, d]
  Tensor weights;  // [B, k]
};

/// Encoder keys W_k h_j + b, flattened to [B*k, a]; reusable across decode steps.
Tensor bahdanau_keys(const Tensor& encoder_states, const BahdanauParams& params);
AttentionResult bahdanau_attention(const Tensor& decoder_state, const Tensor& encoder_states,
                                   const BahdanauParams& params);
AttentionResult bahdanau_attention(const Tensor& decoder_state, const Tensor& encoder_states, const Tensor& keys,
                                   const BahdanauParams& params);

struct ImhaParams {
  std::vector<Linear> query;  // one per head
  std::vector<Linear> key;    // one per head
  Linear value;               // shared by all heads
  Linear output;
  std::size_t heads = 1;
  std::size_t head_width = 0;

  /// width must be divisible by heads.
  static ImhaParams create(ParameterSet& ps, const std::string& name, std::size_t width, std::size_t heads,
                           Rng& rng);
};

/// Row i may attend column j. Rows are the last `rows` positions of a
/// sequence of length `cols`.
struct CausalMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<bool> keep;

  bool operator()(std::size_t r, std::size_t c) const { return keep[r * cols + c]; }
  std::size_t count() const;
};

CausalMask causal_mask(std::size_t total, std::size_t decode);

struct ImhaResult {
  Tensor out;        // [B, Tq, d]
  Tensor attention;  // [B, Tq, Tk], mean over heads
};

ImhaResult interpretable_mha(const Tensor& q, const Tensor& k, const Tensor& v, const CausalMask& mask,
                             const ImhaParams& params, const ForwardContext& ctx = {});

}  // namespace adrev::nn
