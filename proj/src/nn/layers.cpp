#include "adrev/nn/layers.hpp"

#include <cmath>

#include "adrev/error.hpp"
#include "adrev/ops.hpp"

namespace adrev::nn {

namespace {

// Large enough that exp(fill - max) underflows to exactly zero.
constexpr double kMaskedLogit = -1e9;

Shape with_last(Shape s, std::size_t last) {
  s.back() = last;
  return s;
}

}  // namespace

Linear Linear::create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t out, bool bias,
                      Rng& rng) {
  Linear l;
  l.in = in;
  l.out = out;
  l.weight = ps.add_glorot(name + ".weight", {in, out}, rng);
  if (bias) l.bias = ps.add(name + ".bias", {out});
  return l;
}

Tensor Linear::operator()(const Tensor& x) const {
  if (x.shape().back() != in) {
    throw ShapeError("linear: input " + shape_str(x.shape()) + " does not end in width " + std::to_string(in));
  }
  const bool flat = x.rank() == 2;
  Tensor rows = flat ? x : reshape(x, {x.numel() / in, in});
  Tensor y = matmul(rows, weight);
  if (bias.defined()) y = add_bias(y, bias);
  return flat ? y : reshape(y, with_last(x.shape(), out));
}

GluParams GluParams::create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
  return {Linear::create(ps, name + ".gate", in, out, true, rng),
          Linear::create(ps, name + ".value", in, out, true, rng)};
}

Tensor glu(const Tensor& x, const GluParams& params) { return mul(sigmoid(params.gate(x)), params.value(x)); }

GrnParams GrnParams::create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t hidden,
                            std::size_t out, std::size_t context_width, double dropout, Rng& rng) {
  GrnParams p;
  p.primary = Linear::create(ps, name + ".primary", in, hidden, true, rng);
  if (context_width > 0) p.context = Linear::create(ps, name + ".context", context_width, hidden, false, rng);
  p.inner = Linear::create(ps, name + ".inner", hidden, hidden, true, rng);
  p.gate = GluParams::create(ps, name + ".glu", hidden, out, rng);
  p.norm_gain = ps.add(name + ".norm.gain", {out});
  std::fill(p.norm_gain.data().begin(), p.norm_gain.data().end(), 1.0);
  p.norm_bias = ps.add(name + ".norm.bias", {out});
  if (in != out) p.resize = Linear::create(ps, name + ".resize", in, out, false, rng);
  p.dropout = dropout;
  return p;
}

Tensor grn(const Tensor& a, const Tensor* context, const GrnParams& params, const ForwardContext& ctx) {
  if (context && !params.context) throw ContractError("grn: context supplied to a context-free network");
  if (!context && params.context) throw ContractError("grn: network expects a context input");
  Tensor hidden = params.primary(a);
  if (context) {
    if (context->shape().front() != a.shape().front()) {
      throw ShapeError("grn: context " + shape_str(context->shape()) + " does not align with input " +
                       shape_str(a.shape()));
    }
    hidden = add(hidden, (*params.context)(*context));
  }
  hidden = elu(hidden);
  hidden = params.inner(hidden);
  hidden = dropout(hidden, params.dropout, ctx.training, ctx.rng);
  Tensor skip = params.resize ? (*params.resize)(a) : a;
  return layer_norm(add(skip, glu(hidden, params.gate)), params.norm_gain, params.norm_bias);
}

GatedResidualParams GatedResidualParams::create(ParameterSet& ps, const std::string& name, std::size_t width,
                                                double dropout, Rng& rng) {
  GatedResidualParams p;
  p.gate = GluParams::create(ps, name + ".glu", width, width, rng);
  p.norm_gain = ps.add(name + ".norm.gain", {width});
  std::fill(p.norm_gain.data().begin(), p.norm_gain.data().end(), 1.0);
  p.norm_bias = ps.add(name + ".norm.bias", {width});
  p.dropout = dropout;
  return p;
}

Tensor gated_residual(const Tensor& x, const Tensor& skip, const GatedResidualParams& params,
                      const ForwardContext& ctx) {
  Tensor gated = glu(dropout(x, params.dropout, ctx.training, ctx.rng), params.gate);
  return layer_norm(add(skip, gated), params.norm_gain, params.norm_bias);
}

VsnParams VsnParams::create(ParameterSet& ps, const std::string& name, const std::vector<int>& cardinality,
                            std::size_t width, std::size_t context_width, double dropout, Rng& rng) {
  if (cardinality.empty()) throw ConfigError("vsn: at least one variable is required");
  VsnParams p;
  p.cardinality = cardinality;
  p.width = width;
  p.real_embed.resize(cardinality.size());
  p.lookup.resize(cardinality.size());
  for (std::size_t j = 0; j < cardinality.size(); ++j) {
    const std::string var = name + ".var" + std::to_string(j);
    if (cardinality[j] == 0) {
      p.real_embed[j] = Linear::create(ps, var + ".embed", 1, width, true, rng);
    } else {
      Tensor table = ps.add(var + ".lookup", {static_cast<std::size_t>(cardinality[j]), width});
      std::normal_distribution<double> init(0.0, 1.0);
      for (auto& v : table.data()) v = init(rng);
      p.lookup[j] = table;
    }
    p.variable.push_back(GrnParams::create(ps, var + ".grn", width, width, width, 0, dropout, rng));
  }
  p.selection = GrnParams::create(ps, name + ".select", cardinality.size() * width, width, cardinality.size(),
                                  context_width, dropout, rng);
  return p;
}

VsnOutput vsn(const Tensor& x, const Tensor* context, const VsnParams& params, const ForwardContext& ctx) {
  const std::size_t m = params.variables();
  if (x.rank() != 2 || x.dim(1) != m) {
    throw ShapeError("vsn: expected [N, " + std::to_string(m) + "] inputs, got " + shape_str(x.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t d = params.width;
  std::vector<Tensor> embedded;
  embedded.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Tensor column = slice(x, 1, j, 1);
    if (params.cardinality[j] == 0) {
      embedded.push_back(params.real_embed[j](column));
    } else {
      std::vector<int> codes(n);
      const auto cv = column.data();
      for (std::size_t r = 0; r < n; ++r) {
        const double code = cv[r];
        if (code != std::floor(code)) {
          throw DataError("vsn: categorical variable " + std::to_string(j) + " has non-integer code");
        }
        codes[r] = static_cast<int>(code);
      }
      embedded.push_back(embedding(params.lookup[j], codes));
    }
  }
  Tensor flat = m == 1 ? embedded.front() : concat(embedded, 1);
  Tensor weights = softmax(grn(flat, context, params.selection, ctx), 1);

  std::vector<Tensor> processed;
  processed.reserve(m);
  for (std::size_t j = 0; j < m; ++j) processed.push_back(grn(embedded[j], nullptr, params.variable[j], ctx));
  Tensor stacked = reshape(m == 1 ? processed.front() : concat(processed, 1), {n, m, d});
  Tensor combined = bmm(reshape(weights, {n, 1, m}), stacked);
  return {reshape(combined, {n, d}), weights};
}

LstmParams LstmParams::create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t hidden,
                              Rng& rng) {
  LstmParams p;
  p.hidden = hidden;
  p.input = Linear::create(ps, name + ".input", in, 4 * hidden, true, rng);
  p.recurrent = Linear::create(ps, name + ".recurrent", hidden, 4 * hidden, true, rng);
  // Forget-gate bias starts at one.
  auto b = p.input.bias.data();
  for (std::size_t j = hidden; j < 2 * hidden; ++j) b[j] = 1.0;
  return p;
}

LstmState lstm_cell_step_projected(const Tensor& projected, const LstmState& state, const LstmParams& params) {
  const std::size_t h = params.hidden;
  if (state.h.rank() != 2 || state.h.dim(1) != h || state.c.shape() != state.h.shape()) {
    throw ShapeError("lstm: state " + shape_str(state.h.shape()) + " does not match hidden width " +
                     std::to_string(h));
  }
  Tensor z = add(projected, params.recurrent(state.h));
  Tensor i = sigmoid(slice(z, 1, 0, h));
  Tensor f = sigmoid(slice(z, 1, h, h));
  Tensor g = tanh(slice(z, 1, 2 * h, h));
  Tensor o = sigmoid(slice(z, 1, 3 * h, h));
  Tensor c = add(mul(f, state.c), mul(i, g));
  return {mul(o, tanh(c)), c};
}

LstmState lstm_cell_step(const Tensor& x, const LstmState& state, const LstmParams& params) {
  return lstm_cell_step_projected(params.input(x), state, params);
}

LstmStack LstmStack::create(ParameterSet& ps, const std::string& name, std::size_t in, std::size_t hidden,
                            std::size_t layers, double dropout, Rng& rng) {
  if (layers == 0) throw ConfigError("lstm: layer count must be positive");
  LstmStack s;
  s.dropout = dropout;
  for (std::size_t l = 0; l < layers; ++l) {
    s.layers.push_back(LstmParams::create(ps, name + ".layer" + std::to_string(l), l == 0 ? in : hidden, hidden, rng));
  }
  return s;
}

std::vector<LstmState> zero_states(const LstmStack& stack, std::size_t batch) {
  std::vector<LstmState> out;
  for (const auto& l : stack.layers) out.push_back({Tensor::zeros({batch, l.hidden}), Tensor::zeros({batch, l.hidden})});
  return out;
}

SequenceResult run_lstm(const LstmStack& stack, const Tensor& inputs, std::size_t steps,
                        const std::vector<LstmState>& initial, const ForwardContext& ctx) {
  if (steps == 0 || inputs.dim(0) % steps != 0) {
    throw ShapeError("run_lstm: " + shape_str(inputs.shape()) + " is not a time-major sequence of " +
                     std::to_string(steps) + " steps");
  }
  if (initial.size() != stack.layers.size()) throw ShapeError("run_lstm: one initial state per layer required");
  const std::size_t batch = inputs.dim(0) / steps;
  SequenceResult result;
  Tensor layer_input = inputs;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const auto& params = stack.layers[l];
    if (l > 0) layer_input = dropout(layer_input, stack.dropout, ctx.training, ctx.rng);
    Tensor projected = params.input(layer_input);
    LstmState state = initial[l];
    std::vector<Tensor> outputs;
    outputs.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      state = lstm_cell_step_projected(slice_rows(projected, t * batch, batch), state, params);
      outputs.push_back(state.h);
    }
    layer_input = steps == 1 ? outputs.front() : concat(outputs, 0);
    result.final.push_back(state);
  }
  result.outputs = layer_input;
  return result;
}

BahdanauParams BahdanauParams::create(ParameterSet& ps, const std::string& name, std::size_t query_width,
                                      std::size_t key_width, std::size_t attention_width, Rng& rng) {
  return {Linear::create(ps, name + ".query", query_width, attention_width, false, rng),
          Linear::create(ps, name + ".key", key_width, attention_width, true, rng),
          Linear::create(ps, name + ".score", attention_width, 1, false, rng)};
}

Tensor bahdanau_keys(const Tensor& encoder_states, const BahdanauParams& params) {
  if (encoder_states.rank() != 3) {
    throw ShapeError("bahdanau: encoder states must be [B, k, d], got " + shape_str(encoder_states.shape()));
  }
  const std::size_t rows = encoder_states.dim(0) * encoder_states.dim(1);
  return params.key(reshape(encoder_states, {rows, encoder_states.dim(2)}));
}

AttentionResult bahdanau_attention(const Tensor& decoder_state, const Tensor& encoder_states,
                                   const BahdanauParams& params) {
  return bahdanau_attention(decoder_state, encoder_states, bahdanau_keys(encoder_states, params), params);
}

AttentionResult bahdanau_attention(const Tensor& decoder_state, const Tensor& encoder_states, const Tensor& keys,
                                   const BahdanauParams& params) {
  const std::size_t batch = encoder_states.dim(0), steps = encoder_states.dim(1), width = encoder_states.dim(2);
  if (decoder_state.rank() != 2 || decoder_state.dim(0) != batch) {
    throw ShapeError("bahdanau: decoder state " + shape_str(decoder_state.shape()) + " vs encoder " +
                     shape_str(encoder_states.shape()));
  }
  Tensor query = repeat_interleave(params.query(decoder_state), steps);
  Tensor energy = params.score(tanh(add(keys, query)));
  Tensor weights = softmax(reshape(energy, {batch, steps}), 1);
  Tensor context = bmm(reshape(weights, {batch, 1, steps}), encoder_states);
  return {reshape(context, {batch, width}), weights};
}

ImhaParams ImhaParams::create(ParameterSet& ps, const std::string& name, std::size_t width, std::size_t heads,
                              Rng& rng) {
  if (heads == 0 || width % heads != 0) {
    throw ConfigError("attention width " + std::to_string(width) + " is not divisible by " + std::to_string(heads) +
                      " heads");
  }
  ImhaParams p;
  p.heads = heads;
  p.head_width = width / heads;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string head = name + ".head" + std::to_string(h);
    p.query.push_back(Linear::create(ps, head + ".query", width, p.head_width, false, rng));
    p.key.push_back(Linear::create(ps, head + ".key", width, p.head_width, false, rng));
  }
  p.value = Linear::create(ps, name + ".value", width, p.head_width, false, rng);
  p.output = Linear::create(ps, name + ".output", p.head_width, width, false, rng);
  return p;
}

std::size_t CausalMask::count() const {
  std::size_t n = 0;
  for (bool b : keep) n += b ? 1 : 0;
  return n;
}

CausalMask causal_mask(std::size_t total, std::size_t decode) {
  if (decode > total) throw ContractError("causal_mask: decode length exceeds total length");
  CausalMask m{decode, total, std::vector<bool>(decode * total, false)};
  const std::size_t offset = total - decode;
  for (std::size_t r = 0; r < decode; ++r)
    for (std::size_t c = 0; c <= offset + r; ++c) m.keep[r * total + c] = true;
  return m;
}

ImhaResult interpretable_mha(const Tensor& q, const Tensor& k, const Tensor& v, const CausalMask& mask,
                             const ImhaParams& params, const ForwardContext&) {
  if (q.rank() != 3 || k.rank() != 3 || v.shape() != k.shape() || q.dim(0) != k.dim(0)) {
    throw ShapeError("attention: incompatible q " + shape_str(q.shape()) + ", k " + shape_str(k.shape()) + ", v " +
                     shape_str(v.shape()));
  }
  const std::size_t tq = q.dim(1), tk = k.dim(1);
  if (mask.rows != tq || mask.cols != tk || mask.keep.size() != tq * tk) {
    throw ContractError("attention: mask " + std::to_string(mask.rows) + "x" + std::to_string(mask.cols) +
                        " does not match " + std::to_string(tq) + "x" + std::to_string(tk) + " scores");
  }
  for (std::size_t r = 0; r < tq; ++r) {
    bool any = false;
    for (std::size_t c = 0; c < tk; ++c) any = any || mask(r, c);
    if (!any) throw ContractError("attention: mask row " + std::to_string(r) + " hides every position");
  }
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(params.head_width));
  Tensor values = params.value(v);
  Tensor head_sum, attn_sum;
  for (std::size_t h = 0; h < params.heads; ++h) {
    Tensor scores = scale(bmm(params.query[h](q), params.key[h](k), true), inv_sqrt);
    Tensor attn = softmax(masked_fill(scores, mask.keep, kMaskedLogit), 2);
    Tensor head = bmm(attn, values);
    head_sum = h == 0 ? head : add(head_sum, head);
    attn_sum = h == 0 ? attn : add(attn_sum, attn);
  }
  const double inv_heads = 1.0 / static_cast<double>(params.heads);
  return {params.output(scale(head_sum, inv_heads)), scale(attn_sum, inv_heads)};
}

}  // namespace adrev::nn
