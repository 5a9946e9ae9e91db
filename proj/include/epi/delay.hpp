#ifndef EPI_DELAY_HPP
#define EPI_DELAY_HPP

#include <string>
#include <vector>

namespace epi {

// Discretized, truncated delay distribution over intervals of length delta:
// probs[d] = P(delay in [delta*d, delta*(d+1))), renormalized after cutting
// the tail once the untruncated mass beyond the support drops below tail_tol.
struct DelayPmf {
  double delta = 1.0;
  std::vector<double> probs;

  int max_delay() const { return static_cast<int>(probs.size()) - 1; }
  double sum() const;
};

enum class DelayFamily { exponential, gamma };

DelayFamily delay_family_from_string(const std::string& name);

// family parameters: exponential uses rate; gamma uses (shape, rate).
DelayPmf discretize_delay(DelayFamily family, double shape, double rate,
                          double delta = 1.0, double tail_tol = 1e-6);

inline DelayPmf discretize_exponential(double rate, double delta = 1.0,
                                       double tail_tol = 1e-6) {
  return discretize_delay(DelayFamily::exponential, 1.0, rate, delta, tail_tol);
}

}  // namespace epi

#endif
