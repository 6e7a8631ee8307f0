#pragma once
// Time-change constructions: Lamperti's representation for positive
// self-similar processes and the alternating-stage (Lamperti-Kiu) gluing
// construction for real-valued processes away from zero.

#include "ssmp/levy_sim.hpp"
#include "ssmp/measures.hpp"
#include "ssmp/rng.hpp"
#include "ssmp/sample_path.hpp"

namespace ssmp {

// Internal bookkeeping of the alternating-stage construction, exposed for
// verification: completed stage lifetimes (exponential in internal time),
// the sampled sign-jump magnitudes, and the log-magnitude immediately before
// and after each sign change.
struct KiuDiagnostics {
  std::vector<double> stage_lifetimes;
  std::vector<double> v_magnitudes;
  std::vector<double> pre_flip_log;
  std::vector<double> post_flip_log;
};

// Z_t = z exp(xi_{tau(t/z)}) with tau the left-continuous inverse of the
// exponential functional of xi; absorbed at zero when the functional
// saturates (killing or drift to -infinity).
SamplePath lamperti_positive(const LevyTriplet& triplet, double z,
                             double horizon, double dt, RngStream& rng);

// Alternating-stage construction: stages carry xi-segments from the triplet
// of the current sign's quintuple, stage lifetimes are Exp(V(R)) in internal
// time, and each stage end flips the sign while multiplying the magnitude by
// the sampled |V| factor.  The symmetric case passes the same quintuple
// twice.
SamplePath lamperti_kiu(const Quintuple& plus, const Quintuple& minus,
                        double z, double horizon, double dt, RngStream& rng,
                        KiuDiagnostics* diagnostics = nullptr);

}  // namespace ssmp
