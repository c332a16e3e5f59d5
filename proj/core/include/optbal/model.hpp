#pragma once

#include "optbal/potential.hpp"
#include "optbal/ramp.hpp"
#include "optbal/state.hpp"

namespace optbal {

/// (dq, dp) = (p, Jp - eps grad V(q)).
State full_rhs(const State& s, SmallParam eps, const Potential& V);

/// (dq, dp) = (p, Jp - eps rho(t/T) grad V(q)) for t in [0, T].
State ramped_rhs(const State& s, double t, SmallParam eps, double ramp_time,
                 const RampSpec& ramp, const Potential& V);

/// Shared kernel: (dq, dp) = (p, Jp - weight grad V(q)), written into out.
void scaled_rhs(const State& s, double weight, const Potential& V, State& out);

/// E = |p|^2 / 2 + eps V(q), conserved by the flow of full_rhs.
double energy(const State& s, SmallParam eps, const Potential& V);

}  // namespace optbal
