#pragma once

#include "flux/rational.hpp"
#include "flux/rng.hpp"
#include "flux/scenario.hpp"

namespace flux {

// Seeded geometric walk with optional transient jumps. The path depends only
// on (params, stream seed), never on agent behaviour, so paired runs see
// identical prices. Emitted prices are quantized to 9 decimals and exact
// from there on.
class PriceProcess {
 public:
  PriceProcess(const PriceParams& params, uint64_t stream_seed);

  void step();
  const Rational& price() const { return price_; }  // human units, quote per base

 private:
  PriceParams params_;
  Rng rng_;
  double base_log_ = 0.0;
  double spike_log_ = 0.0;
  double spike_decay_ = 0.0;  // per-tick multiplier on spike_log
  Rational price_;

  void refresh();
};

}  // namespace flux
