#include "adrev/models/architectures.hpp"
#include "adrev/ops.hpp"
#include "features.hpp"

namespace adrev::models {

Seq2Seq::Seq2Seq(ModelConfig config) : ForecastModel(std::move(config)) {
  Rng rng(config_.seed);
  const auto& s = config_.schema;
  const std::size_t e = config_.static_embedding;
  const std::size_t enc = config_.hidden;
  const std::size_t dec = config_.decoder_width();
  for (const auto& st : s.statics) {
    static_tables_.push_back(
        params_.add_glorot("static_embedding." + st.name, {static_cast<std::size_t>(st.cardinality), e}, rng));
  }
  encoder_ = nn::LstmStack::create(params_, "encoder", detail::one_hot_width(s.past_columns()), enc, config_.layers,
                                   config_.dropout, rng);
  const std::size_t dec_in = detail::one_hot_width(s.known) + e * s.statics.size() + enc + 1;
  decoder_ = nn::LstmParams::create(params_, "decoder", dec_in, dec, rng);
  if (dec != enc) {
    bridge_hidden_ = nn::Linear::create(params_, "bridge.hidden", enc, dec, true, rng);
    bridge_cell_ = nn::Linear::create(params_, "bridge.cell", enc, dec, true, rng);
  }
  attention_ = nn::BahdanauParams::create(params_, "attention", dec, enc, dec, rng);
  head_ = nn::Linear::create(params_, "head", dec + enc, 1, true, rng);
}

ForecastOutput Seq2Seq::forward(const data::Batch& batch, const ForwardOptions& options) const {
  check_batch(batch);
  const std::size_t b = batch.size, k = batch.lookback, tau = batch.horizon;
  const nn::ForwardContext ctx{options.training, options.rng};
  const auto& s = config_.schema;

  const Tensor enc_in = detail::one_hot(batch.encoder, s.past_columns());
  const auto encoded = nn::run_lstm(encoder_, enc_in, k, nn::zero_states(encoder_, b), ctx);
  const Tensor states = detail::batch_major(encoded.outputs, k, b);
  const Tensor keys = nn::bahdanau_keys(states, attention_);

  nn::LstmState state = encoded.final.back();
  if (bridge_hidden_) state = {(*bridge_hidden_)(state.h), (*bridge_cell_)(state.c)};

  const Tensor statics = detail::embed_statics(static_tables_, batch.statics);
  const Tensor known = detail::one_hot(batch.decoder, s.known);
  Tensor previous = slice(detail::target_history(batch), 1, k - 1, 1);

  std::vector<Tensor> predictions, weights;
  for (std::size_t t = 0; t < tau; ++t) {
    const auto att = nn::bahdanau_attention(state.h, states, keys, attention_);
    const Tensor parts[] = {slice_rows(known, t * b, b), statics, att.context, previous};
    state = nn::lstm_cell_step(concat(parts, 1), state, decoder_);
    const Tensor h = dropout(state.h, config_.decoder_dropout_rate(), ctx.training, ctx.rng);
    const Tensor features[] = {h, att.context};
    previous = head_(concat(features, 1));
    predictions.push_back(previous);
    weights.push_back(att.weights.detach());
  }

  ForecastOutput out;
  out.predictions = reshape(tau == 1 ? predictions.front() : concat(predictions, 1), {b, tau, 1});
  out.attention = reshape(tau == 1 ? weights.front() : concat(weights, 1), {b, tau, k}).detach();
  return out;
}

}  // namespace adrev::models
