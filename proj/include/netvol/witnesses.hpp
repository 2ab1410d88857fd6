#pragma once

#include <array>
#include <string>

#include "netvol/scenario.hpp"

// Closed-form incompatibility tests for the triangle network: the Finner
// inequality p(a,b,c) <= sqrt(pA pB pC), the Shannon-type entropic
// inequality I(X:Y) + I(X:Z) <= H(X) over the three pivots, and the
// covariance decomposition test (each pairwise covariance must be carried
// by the single source shared by that pair).

namespace netvol::witness {

enum class WitnessId { Finner, Entropic, Covariance };

std::string to_string(WitnessId w);

struct WitnessReport {
    WitnessId witness_id = WitnessId::Finner;
    bool violated = false;
    double margin = 0.0;                  // positive = violated
    std::array<double, 3> details{};      // per-inequality slacks
};

WitnessReport finner_check(const Behavior& p);

/// Entropies in bits, 0 log 0 = 0.
WitnessReport entropic_check(const Behavior& p);

/// Binary outcomes in the +-1 encoding. Feasibility of the variance splits
/// Var(A)=xL+xM, Var(B)=yL+yG, Var(C)=zG+zM with xL*yL >= Cov(A,B)^2,
/// yG*zG >= Cov(B,C)^2, xM*zM >= Cov(A,C)^2, decided by 1-D interval
/// reasoning over yL.
WitnessReport covariance_check(const Behavior& p);

/// Shannon entropy (bits) of a distribution given as a flat table.
double shannon_entropy(std::span<const double> p);

}  // namespace netvol::witness
