#include "ltrawl/rng.hpp"

#include <gsl/gsl_randist.h>

namespace ltrawl {

Rng::Rng(std::uint64_t seed) : state_(gsl_rng_alloc(gsl_rng_mt19937)) {
  // mt19937 consumes 32 bits of seed; fold the upper half in.
  const auto folded = static_cast<unsigned long>((seed ^ (seed >> 32)) & 0xffffffffULL);
  gsl_rng_set(state_.get(), folded);
}

double Rng::uniform() { return gsl_rng_uniform_pos(state_.get()); }

double Rng::gamma(double shape, double rate) {
  if (shape <= 0.0) return 0.0;
  return gsl_ran_gamma(state_.get(), shape, 1.0 / rate);
}

double Rng::exponential(double rate) { return gsl_ran_exponential(state_.get(), 1.0 / rate); }

double Rng::beta(double a, double b) { return gsl_ran_beta(state_.get(), a, b); }

}  // namespace ltrawl
