#pragma once

#include <cstdint>
#include <memory>

#include <gsl/gsl_rng.h>

namespace ltrawl {

// Seeded Mersenne Twister stream. Draws are reproducible across platforms
// because every variate is generated by GSL, not by <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng(Rng&&) noexcept = default;
  Rng& operator=(Rng&&) noexcept = default;

  double uniform();            // (0, 1)
  double gamma(double shape, double rate);
  double exponential(double rate);
  double beta(double a, double b);

  gsl_rng* get() noexcept { return state_.get(); }

 private:
  struct Deleter {
    void operator()(gsl_rng* r) const noexcept { gsl_rng_free(r); }
  };
  std::unique_ptr<gsl_rng, Deleter> state_;
};

}  // namespace ltrawl
