#pragma once

#include <functional>
#include <string>

namespace deblur {

/// One line of solver progress. Fields that do not apply to the emitting
/// stage stay at zero.
struct TraceRecord {
  std::string solver;  // "latent", "kernel" or "level"
  int level = -1;      // pyramid level, -1 outside the pyramid
  int stage = 0;       // continuation stage or alternation index
  double beta = 0.0;
  double mu = 0.0;
  double xi = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

}  // namespace deblur
