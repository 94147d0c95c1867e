#include "flux/pricing.hpp"

#include <cmath>

namespace flux {

PriceProcess::PriceProcess(const PriceParams& params, uint64_t stream_seed)
    : params_(params), rng_(stream_seed) {
  spike_decay_ = params_.jump_revert_halflife_ticks > 0
                     ? std::pow(0.5, 1.0 / static_cast<double>(params_.jump_revert_halflife_ticks))
                     : 1.0;
  price_ = params_.initial;
}

void PriceProcess::step() {
  if (params_.vol_bps_per_tick > 0.0) {
    base_log_ += (params_.drift_bps_per_tick + params_.vol_bps_per_tick * rng_.next_normal()) / 10000.0;
  } else if (params_.drift_bps_per_tick != 0.0) {
    base_log_ += params_.drift_bps_per_tick / 10000.0;
  }
  spike_log_ *= spike_decay_;
  if (params_.jump_prob > 0.0 && rng_.next_bool(params_.jump_prob)) {
    double sign = rng_.next_bool(0.5) ? 1.0 : -1.0;
    spike_log_ += sign * params_.jump_size_bps / 10000.0;
  }
  refresh();
}

void PriceProcess::refresh() {
  double factor = std::exp(base_log_ + spike_log_);
  if (factor == 1.0) {
    price_ = params_.initial;
    return;
  }
  // Quantize the multiplicative factor at 9 decimals and scale exactly.
  double scaled = std::round(factor * 1e9);
  if (scaled < 1.0) scaled = 1.0;
  price_ = params_.initial * Rational(BigInt::from_i128(static_cast<__int128>(scaled)),
                                      BigInt::from_u64(1000000000ull));
}

}  // namespace flux
