#pragma once
// Internal pieces of the phase-space transforms shared with the propagator.

#include <vector>

#include "dw/phase_grid.hpp"

namespace dw::detail {

enum class AxisOp { None, XToLambda, LambdaToX, ThetaToP, PToTheta };

// out_m = post_m sum_l pre_l in_l exp(sign 2 pi i l m / n)
struct AxisPhases {
  int sign = -1;
  std::vector<cplx> pre;
  std::vector<cplx> post;
};

AxisPhases make_phases(const PhaseGrid& g, AxisOp op);

/// Unnormalized in-place 2D DFT with the same sign on both axes.
void fft2_inplace(cplx* data, int n1, int n2, int sign);

}  // namespace dw::detail
