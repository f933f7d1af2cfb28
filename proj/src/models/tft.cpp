#include <algorithm>
#include <cmath>

#include "adrev/error.hpp"
#include "adrev/losses.hpp"
#include "adrev/models/architectures.hpp"
#include "adrev/ops.hpp"
#include "features.hpp"

namespace adrev::models {

namespace {

std::vector<int> cardinalities(const std::vector<data::FeatureSpec>& cols) {
  std::vector<int> out;
  for (const auto& c : cols) out.push_back(c.cardinality);
  return out;
}

// Rows of a [B, Tq, Tk] tensor written into the last Tq rows of [B, Tk, Tk].
Tensor pad_attention(const Tensor& rows) {
  const std::size_t b = rows.dim(0), tq = rows.dim(1), tk = rows.dim(2);
  std::vector<double> out(b * tk * tk, 0.0);
  const auto rv = rows.data();
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t r = 0; r < tq; ++r)
      std::copy_n(rv.data() + (i * tq + r) * tk, tk, out.data() + (i * tk + (tk - tq + r)) * tk);
  return Tensor::from({b, tk, tk}, std::move(out));
}

Tensor detached_batch_major(const Tensor& x, std::size_t steps, std::size_t batch) {
  return detail::batch_major(x.detach(), steps, batch).detach();
}

}  // namespace

Tft::Tft(ModelConfig config) : ForecastModel(std::move(config)) {
  Rng rng(config_.seed);
  const auto& s = config_.schema;
  const std::size_t d = config_.hidden;
  const double p = config_.dropout;
  static_vsn_ = nn::VsnParams::create(params_, "static_vsn", cardinalities(s.statics), d, 0, p, rng);
  context_selection_ = nn::GrnParams::create(params_, "static_context.selection", d, d, d, 0, p, rng);
  context_hidden_ = nn::GrnParams::create(params_, "static_context.hidden", d, d, d, 0, p, rng);
  context_cell_ = nn::GrnParams::create(params_, "static_context.cell", d, d, d, 0, p, rng);
  context_enrichment_ = nn::GrnParams::create(params_, "static_context.enrichment", d, d, d, 0, p, rng);
  encoder_vsn_ = nn::VsnParams::create(params_, "encoder_vsn", cardinalities(s.past_columns()), d, d, p, rng);
  decoder_vsn_ = nn::VsnParams::create(params_, "decoder_vsn", cardinalities(s.known), d, d, p, rng);
  encoder_ = nn::LstmStack::create(params_, "encoder_lstm", d, d, config_.layers, p, rng);
  decoder_ = nn::LstmStack::create(params_, "decoder_lstm", d, d, config_.layers, p, rng);
  lstm_gate_ = nn::GatedResidualParams::create(params_, "lstm_gate", d, p, rng);
  enrichment_ = nn::GrnParams::create(params_, "enrichment", d, d, d, d, p, rng);
  attention_ = nn::ImhaParams::create(params_, "attention", d, config_.heads, rng);
  attention_gate_ = nn::GatedResidualParams::create(params_, "attention_gate", d, p, rng);
  positionwise_ = nn::GrnParams::create(params_, "positionwise", d, d, d, 0, p, rng);
  output_gate_ = nn::GatedResidualParams::create(params_, "output_gate", d, 0.0, rng);
  head_ = nn::Linear::create(params_, "head", d, config_.quantiles.size(), true, rng);
}

ForecastOutput Tft::forward(const data::Batch& batch, const ForwardOptions& options) const {
  check_batch(batch);
  const std::size_t b = batch.size, k = batch.lookback, tau = batch.horizon, total = k + tau;
  const nn::ForwardContext ctx{options.training, options.rng};

  const auto statics = nn::vsn(batch.statics, nullptr, static_vsn_, ctx);
  const Tensor c_selection = nn::grn(statics.combined, nullptr, context_selection_, ctx);
  const Tensor c_hidden = nn::grn(statics.combined, nullptr, context_hidden_, ctx);
  const Tensor c_cell = nn::grn(statics.combined, nullptr, context_cell_, ctx);
  const Tensor c_enrichment = nn::grn(statics.combined, nullptr, context_enrichment_, ctx);

  const Tensor enc_context = repeat_tile(c_selection, k);
  const Tensor dec_context = repeat_tile(c_selection, tau);
  const auto past = nn::vsn(batch.encoder, &enc_context, encoder_vsn_, ctx);
  const auto future = nn::vsn(batch.decoder, &dec_context, decoder_vsn_, ctx);

  const std::vector<nn::LstmState> init(config_.layers, nn::LstmState{c_hidden, c_cell});
  const auto encoded = nn::run_lstm(encoder_, past.combined, k, init, ctx);
  const auto decoded = nn::run_lstm(decoder_, future.combined, tau, encoded.final, ctx);

  const Tensor lstm_out[] = {encoded.outputs, decoded.outputs};
  const Tensor selected[] = {past.combined, future.combined};
  const Tensor temporal = nn::gated_residual(concat(lstm_out, 0), concat(selected, 0), lstm_gate_, ctx);

  const Tensor enrich_context = repeat_tile(c_enrichment, total);
  const Tensor enriched = detail::batch_major(nn::grn(temporal, &enrich_context, enrichment_, ctx), total, b);
  const Tensor queries = slice(enriched, 1, k, tau);
  const auto attended =
      nn::interpretable_mha(queries, enriched, enriched, nn::causal_mask(total, tau), attention_, ctx);
  const Tensor gated = nn::gated_residual(attended.out, queries, attention_gate_, ctx);
  const Tensor transformed = nn::grn(gated, nullptr, positionwise_, ctx);
  const Tensor skip = slice(detail::batch_major(temporal, total, b), 1, k, tau);
  const Tensor out = nn::gated_residual(transformed, skip, output_gate_, ctx);

  ForecastOutput result;
  result.predictions = head_(out);
  result.attention = pad_attention(attended.attention.detach());
  result.encoder_weights = detached_batch_major(past.weights, k, b);
  result.decoder_weights = detached_batch_major(future.weights, tau, b);
  result.static_weights = statics.weights.detach();
  const auto& q = config_.quantiles;
  result.point_column = static_cast<std::size_t>(
      std::min_element(q.begin(), q.end(), [](double a, double c) { return std::abs(a - 0.5) < std::abs(c - 0.5); }) -
      q.begin());
  return result;
}

Tensor Tft::loss(const ForecastOutput& output, const data::Batch& batch) const {
  return quantile_loss(batch.target, output.predictions, config_.quantiles);
}

}  // namespace adrev::models
